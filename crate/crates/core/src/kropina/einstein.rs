use alloc::vec::Vec;

use super::spray::ricci_direct;
use super::KropinaMetric;
use crate::residual::{normalized, Stats, Worst};
use crate::riemannian::BetaInvariants;
use crate::sampling::SampleSet;
use crate::{Error, Result};

/// Fewest admissible samples accepted by [`einstein_check`].
pub const MIN_SAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Einstein,
    NotEinstein,
    /// The characterization holds but `σ` and `Ric/F²` disagree.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Einstein => "einstein",
            Verdict::NotEinstein => "not_einstein",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Per-sample values of the characterization.
#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinSample {
    pub index: usize,
    pub c: f64,
    /// `λ` of `α` when `n = 2`, otherwise `f`.
    pub scalar: f64,
    pub sigma: f64,
    /// `Ric/F²` from the definitional Ricci curvature.
    pub sigma_direct: f64,
    pub residuals: [f64; 3],
    /// Normalized `|S|`.
    pub s_curvature: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinReport {
    pub dimension: usize,
    pub tolerance: f64,
    pub samples: Vec<EinsteinSample>,
    pub skipped: Vec<usize>,
    /// Worst residual of each of the three equations.
    pub residuals: [Worst; 3],
    pub sigma_agreement: Worst,
    pub c: Stats,
    pub scalar: Stats,
    pub sigma: Stats,
    pub sigma_direct: Stats,
    pub max_s: Worst,
    /// Mean of `Ric/(F²(n−1))`, the flag curvature if it is constant.
    pub flag_estimate: f64,
    pub verdict: Verdict,
}

impl EinsteinReport {
    /// `spread(σ) / (1 + |mean σ|)`.
    pub fn sigma_spread(&self) -> f64 {
        self.sigma.spread() / (1.0 + self.sigma.mean().abs())
    }

    pub fn max_residual(&self) -> Worst {
        let mut w = Worst::default();
        for r in &self.residuals {
            w.merge(r);
        }
        w
    }
}

/// `σ = −(1/2b²)s^k s_k − ¼ s^i_j s^j_i`.
pub fn einstein_sigma(v: &BetaInvariants) -> f64 {
    -0.5 / v.b2 * v.sk_sk - 0.25 * v.ss_trace
}

/// `f` solved from the contracted third equation, `n ≥ 3`.
pub fn einstein_f(v: &BetaInvariants) -> f64 {
    let m = v.n as f64 - 2.0;
    let b2 = v.b2;
    -m * b2 * v.c * v.c - b2 * v.bk_ck + m * v.sk_sk - b2 * v.sk_k - b2 * v.ss_trace
}

/// The three residuals and the auxiliary scalar (`λ` or `f`).
pub fn einstein_residuals(v: &BetaInvariants) -> ([f64; 3], f64) {
    let n = v.n as f64;
    let (a2, beta, b2, c) = (v.alpha2, v.beta, v.b2, v.c);
    if v.n == 2 {
        let t = [
            v.lambda * b2 * beta,
            -c * v.s_0,
            v.bk_ck * beta,
            v.bk_s_0k,
            -b2 * v.sk_0k,
            v.sk0_sk,
        ];
        let e3 = normalized(t.iter().sum(), &t);
        return (
            [v.conformality_residual, v.alpha_einstein_residual, e3],
            v.lambda,
        );
    }
    let f = einstein_f(v);
    let lhs = f * a2;
    let bracket = [
        b2 * v.s_0_0,
        b2 * v.c_0 * beta,
        -2.0 * c * beta * v.s_0,
        -v.s_0 * v.s_0,
        -c * c * beta * beta,
    ];
    let rhs_terms = [
        v.ricci_alpha * b2 * b2,
        (n - 2.0) * bracket.iter().sum::<f64>(),
    ];
    let mut terms2 = Vec::with_capacity(8);
    terms2.push(lhs);
    terms2.push(rhs_terms[0]);
    terms2.extend(bracket.iter().map(|t| (n - 2.0) * t));
    let e2 = normalized(lhs - rhs_terms[0] - rhs_terms[1], &terms2);

    let t3 = [
        (n - 2.0) * v.sk_sk * beta,
        -b2 * v.sk_k * beta,
        -b2 * v.ss_trace * beta,
        (n - 3.0) * b2 * c * v.s_0,
        b2 * v.bk_s_0k,
        -b2 * b2 * v.sk_0k,
        (n - 1.0) * b2 * v.sk0_sk,
    ];
    let e3 = normalized(t3.iter().sum(), &t3);
    ([v.conformality_residual, e2, e3], f)
}

/// Normalized `|S|` from the invariant table.
fn s_normalized(v: &BetaInvariants) -> f64 {
    let k = (v.n as f64 + 1.0) / v.b2;
    let t = [k * v.r_0, k * v.beta / v.alpha2 * v.r_00];
    normalized(t[0] - t[1], &t)
}

/// Evaluates the Einstein characterization over `samples`.
pub fn einstein_check(k: &KropinaMetric, samples: &SampleSet, tol: f64) -> Result<EinsteinReport> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            found: samples.len(),
        });
    }
    let n = k.dimension();
    let mut report = EinsteinReport {
        dimension: n,
        tolerance: tol,
        samples: Vec::with_capacity(samples.len()),
        skipped: samples.skipped.clone(),
        residuals: [Worst::default(); 3],
        sigma_agreement: Worst::default(),
        c: Stats::default(),
        scalar: Stats::default(),
        sigma: Stats::default(),
        sigma_direct: Stats::default(),
        max_s: Worst::default(),
        flag_estimate: 0.0,
        verdict: Verdict::NotEinstein,
    };
    let mut flag = Stats::default();
    for s in samples.iter() {
        let v = k.invariants(&s.x, &s.y)?;
        let (residuals, scalar) = einstein_residuals(&v);
        let sigma = einstein_sigma(&v);
        let f2 = {
            let f = v.alpha2 / v.beta;
            f * f
        };
        let sigma_direct = ricci_direct(k, &s.x, &s.y)? / f2;
        let agreement = normalized(sigma - sigma_direct, &[sigma, sigma_direct]);
        let s_curvature = s_normalized(&v);

        for (w, r) in report.residuals.iter_mut().zip(residuals) {
            w.record(r, s.index);
        }
        report.sigma_agreement.record(agreement, s.index);
        report.max_s.record(s_curvature, s.index);
        report.c.push(v.c);
        report.scalar.push(scalar);
        report.sigma.push(sigma);
        report.sigma_direct.push(sigma_direct);
        if n > 1 {
            flag.push(sigma_direct / (n as f64 - 1.0));
        }
        report.samples.push(EinsteinSample {
            index: s.index,
            c: v.c,
            scalar,
            sigma,
            sigma_direct,
            residuals,
            s_curvature,
        });
    }
    report.flag_estimate = flag.mean();
    report.verdict = if !report.residuals.iter().all(|w| w.below(tol)) {
        Verdict::NotEinstein
    } else if report.sigma_agreement.below(tol) {
        Verdict::Einstein
    } else {
        Verdict::Inconclusive
    };
    Ok(report)
}
