mod common;

use common::{polynomial, sphere};
use kropina_core::kropina::{
    fundamental_tensor, riemann_curvature_finsler, spray_closed, spray_first_principles,
};
use kropina_core::navigation::{from_navigation, to_navigation};
use kropina_core::residual::normalized;
use kropina_core::sampling::Sampler;
use kropina_core::{Error, KropinaMetric};
use proptest::prelude::*;

fn admissible(k: &KropinaMetric, seed: u64) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut s = Sampler::new(k.alpha().region(), seed);
    let (x, y) = (s.point(), s.direction());
    match k.check_domain(&x, &y) {
        Ok(()) => Some((x, y)),
        Err(Error::OutsideDomain { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fundamental_tensor_is_symmetric_and_reproduces_f(seed in any::<u64>()) {
        let k = polynomial();
        if let Some((x, y)) = admissible(&k, seed) {
            let g = fundamental_tensor(&k, &x, &y).unwrap();
            let f = k.f(&x, &y).unwrap();
            prop_assert!((g.contract2(&y, &y) - f * f).abs() <= 1e-10 * f * f);
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((g[(i, j)] - g[(j, i)]).abs() <= 1e-12 * g.max_abs());
                }
            }
            let det = kropina_core::linalg::determinant(&g.rows()).unwrap();
            prop_assert!(det > 0.0);
        }
    }

    #[test]
    fn spray_paths_agree(seed in any::<u64>()) {
        let k = polynomial();
        if let Some((x, y)) = admissible(&k, seed) {
            let a = spray_closed(&k, &x, &y).unwrap();
            let b = spray_first_principles(&k, &x, &y).unwrap();
            let norm = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - v).abs() <= 1e-8 * (1.0 + norm));
            }
        }
    }

    #[test]
    fn curvature_operator_kills_y(seed in any::<u64>()) {
        let k = sphere();
        if let Some((x, y)) = admissible(&k, seed) {
            let r = riemann_curvature_finsler(&k, &x, &y).unwrap();
            for v in r.apply(&y) {
                prop_assert!(normalized(v, &[r.max_abs()]) < 1e-8);
            }
        }
    }

    #[test]
    fn navigation_round_trip(seed in any::<u64>()) {
        for k in [polynomial(), sphere()] {
            if let Some((x, y)) = admissible(&k, seed) {
                let back = from_navigation(&to_navigation(&k).unwrap()).unwrap();
                let (f, g) = (k.f(&x, &y).unwrap(), back.f(&x, &y).unwrap());
                prop_assert!((f - g).abs() <= 1e-12 * f);
            }
        }
    }
}
