//! Deterministic sampling of chart points and admissible directions.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::ChartRegion;
use crate::Result;

/// Default β-margin: samples need `β > margin · α · ‖β‖_α`.
pub const DEFAULT_MARGIN: f64 = 0.1;
pub const MAX_TRIES: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    /// Indices of requested samples for which no admissible draw was found.
    pub skipped: Vec<usize>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Sample> {
        self.samples.iter()
    }
}

/// A seeded source of chart points and unit directions.
pub struct Sampler {
    rng: ChaCha8Rng,
    region: ChartRegion,
}

impl Sampler {
    pub fn new(region: &ChartRegion, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            region: region.clone(),
        }
    }

    pub fn point(&mut self) -> Vec<f64> {
        match &self.region {
            ChartRegion::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| self.rng.gen_range(l..=u))
                .collect(),
            ChartRegion::Ball { center, radius } => loop {
                let v = cube(&mut self.rng, center.len());
                if norm2(&v) <= 1.0 {
                    break v.iter().zip(center).map(|(a, c)| c + radius * a).collect();
                }
            },
        }
    }

    /// A direction uniform on the Euclidean unit sphere.
    pub fn direction(&mut self) -> Vec<f64> {
        let n = self.region.dimension();
        loop {
            let v = cube(&mut self.rng, n);
            let r2 = norm2(&v);
            if r2 <= 1.0 && r2 > 1e-6 {
                let r = libm::sqrt(r2);
                break v.into_iter().map(|a| a / r).collect();
            }
        }
    }
}

fn cube(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// `count` chart points from `seed`.
pub fn points(region: &ChartRegion, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut s = Sampler::new(region, seed);
    (0..count).map(|_| s.point()).collect()
}

/// Draws `count` samples `(x, y)` with `ratio(x, y) > margin`.
///
/// Each requested sample gets up to [`MAX_TRIES`] fresh `(x, y)` draws; a
/// sample that never qualifies is recorded as skipped. Errors from `ratio`
/// (for instance a degenerate metric) abort the draw.
pub fn admissible_samples(
    region: &ChartRegion,
    count: usize,
    seed: u64,
    margin: f64,
    mut ratio: impl FnMut(&[f64], &[f64]) -> Result<f64>,
) -> Result<SampleSet> {
    let mut s = Sampler::new(region, seed);
    let mut set = SampleSet::default();
    for index in 0..count {
        let mut found = None;
        for _ in 0..MAX_TRIES {
            let x = s.point();
            let y = s.direction();
            if ratio(&x, &y)? > margin {
                found = Some(Sample { index, x, y });
                break;
            }
        }
        match found {
            Some(sample) => set.samples.push(sample),
            None => set.skipped.push(index),
        }
    }
    Ok(set)
}
