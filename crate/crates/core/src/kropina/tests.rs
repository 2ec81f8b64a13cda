use super::*;
use crate::field::{ChartRegion, Params};
use crate::residual::normalized;
use crate::spaceforms::{einstein_kropina_from_spaceform, example41};
use alloc::vec::Vec;

fn flat(n: usize, b: &[&str]) -> KropinaMetric {
    let alpha = MetricField::euclidean(n, ChartRegion::cube(n, 1.0)).unwrap();
    KropinaMetric::new(alpha, OneFormField::parse(b, Params::new()).unwrap()).unwrap()
}

fn sphere() -> KropinaMetric {
    einstein_kropina_from_spaceform(&example41(1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0).unwrap())
        .unwrap()
}

fn perturbed() -> KropinaMetric {
    flat(3, &["2 + 0.1*x1", "0", "0"])
}

fn polynomial() -> KropinaMetric {
    let alpha = MetricField::parse(
        3,
        &[
            "1 + 0.2*x1^2",
            "0.1*x1*x2",
            "0.05*x3",
            "1.2 + 0.1*sin(x2*x3)",
            "0.1*x1",
            "0.9 + 0.15*x3^2 + 0.1*x1",
        ],
        ChartRegion::cube(3, 0.5),
        Params::new(),
    )
    .unwrap();
    let beta = OneFormField::parse(
        &[
            "1.5 + 0.3*x1*x2 - 0.2*x3^2",
            "0.4*x1 + 0.2*x2*x3 - 0.3",
            "0.25*x2^2 + 0.5*x3 + 0.1",
        ],
        Params::new(),
    )
    .unwrap();
    KropinaMetric::new(alpha, beta).unwrap()
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let scale: Vec<f64> = a.iter().chain(b).copied().collect();
    a.iter()
        .zip(b)
        .map(|(x, y)| normalized(x - y, &scale))
        .fold(0.0, f64::max)
}

#[test]
fn fundamental_tensor_of_flat_pair() {
    let k = flat(2, &["2", "0"]);
    let x = [0.1, 0.2];
    let y = [1.0, 0.0];
    assert!((k.f(&x, &y).unwrap() - 0.5).abs() < 1e-15);
    let g = fundamental_tensor(&k, &x, &y).unwrap();
    assert!((g.contract2(&y, &y) - 0.25).abs() < 1e-14);
    let g2 = fundamental_tensor(&k, &x, &[2.0, 0.0]).unwrap();
    assert!(g
        .as_slice()
        .iter()
        .zip(g2.as_slice())
        .all(|(a, b)| (a - b).abs() < 1e-14));
}

#[test]
fn outside_domain_is_rejected() {
    let k = flat(2, &["2", "0"]);
    assert!(matches!(
        k.f(&[0.0, 0.0], &[-1.0, 0.2]),
        Err(Error::OutsideDomain { .. })
    ));
    assert!(matches!(
        spray_closed(&k, &[0.0, 0.0], &[0.05, 1.0]),
        Err(Error::OutsideDomain { .. })
    ));
}

#[test]
fn flat_parallel_vanishes() {
    let k = flat(3, &["2", "0", "0"]);
    let x = [0.3, -0.2, 0.1];
    let y = [0.8, 0.3, -0.2];
    assert!(spray_closed(&k, &x, &y)
        .unwrap()
        .iter()
        .all(|g| g.abs() < 1e-14));
    assert!(spray_first_principles(&k, &x, &y)
        .unwrap()
        .iter()
        .all(|g| g.abs() < 1e-13));
    assert!(ricci_closed(&k, &x, &y).unwrap().abs() < 1e-14);
    assert!(ricci_direct(&k, &x, &y).unwrap().abs() < 1e-12);
    assert!(s_curvature_closed(&k, &x, &y).unwrap().abs() < 1e-14);
    assert!(s_curvature_direct(&k, &x, &y).unwrap().abs() < 1e-13);
    assert!(berwald_residual(&k, &x, &y).unwrap() < 1e-12);
    assert!(flag_curvature_residual(&k, &x, &y, 0.0).unwrap() < 1e-12);
}

#[test]
fn spray_cross_oracle() {
    for k in [sphere(), perturbed(), polynomial()] {
        for s in k.samples(25, 3).unwrap().iter() {
            let a = spray_closed(&k, &s.x, &s.y).unwrap();
            let b = spray_first_principles(&k, &s.x, &s.y).unwrap();
            assert!(rel(&a, &b) < 1e-10, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn ricci_cross_oracle() {
    for k in [sphere(), perturbed(), polynomial()] {
        for s in k.samples(10, 4).unwrap().iter() {
            let a = ricci_closed(&k, &s.x, &s.y).unwrap();
            let b = ricci_direct(&k, &s.x, &s.y).unwrap();
            assert!(normalized(a - b, &[a, b]) < 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn s_curvature_cross_oracle() {
    for k in [sphere(), perturbed(), polynomial()] {
        for s in k.samples(10, 5).unwrap().iter() {
            let a = s_curvature_closed(&k, &s.x, &s.y).unwrap();
            let b = s_curvature_direct(&k, &s.x, &s.y).unwrap();
            assert!(normalized(a - b, &[a, b]) < 1e-9, "{a} vs {b}");
            let d = riemannian_s_defect(k.alpha(), &s.x, &s.y).unwrap();
            assert!(d.abs() < 1e-10);
        }
    }
}

#[test]
fn perturbed_s_curvature_is_nonzero() {
    let k = perturbed();
    let s = k.samples(1, 9).unwrap();
    let v = s_curvature_closed(&k, &s.samples[0].x, &s.samples[0].y).unwrap();
    assert!(v.abs() > 1e-4);
}

#[test]
fn riemann_curvature_annihilates_y() {
    for k in [sphere(), polynomial()] {
        for s in k.samples(5, 6).unwrap().iter() {
            let r = riemann_curvature_finsler(&k, &s.x, &s.y).unwrap();
            let ry = r.apply(&s.y);
            assert!(
                ry.iter().all(|v| normalized(*v, &[r.max_abs()]) < 1e-9),
                "{ry:?}"
            );
        }
    }
}

#[test]
fn sphere_is_einstein_with_sigma_two() {
    let k = sphere();
    let report = einstein_check(&k, &k.samples(20, 1).unwrap(), 1e-6).unwrap();
    assert_eq!(report.verdict, Verdict::Einstein);
    assert!((report.sigma.mean() - 2.0).abs() < 1e-6);
    assert!((report.sigma_direct.mean() - 2.0).abs() < 1e-6);
    assert!(report.sigma_spread() < 1e-6);
    assert!(report.max_s.value < 1e-8);
    assert!((report.flag_estimate - 1.0).abs() < 1e-6);
}

#[test]
fn perturbed_fails_on_conformality() {
    let k = perturbed();
    let report = einstein_check(&k, &k.samples(20, 1).unwrap(), 1e-6).unwrap();
    assert_eq!(report.verdict, Verdict::NotEinstein);
    assert!(report.residuals[0].value > 1e-3);
}

#[test]
fn too_few_samples() {
    let k = sphere();
    let err = einstein_check(&k, &k.samples(5, 1).unwrap(), 1e-6).unwrap_err();
    assert_eq!(
        err,
        Error::TooFewSamples {
            needed: 20,
            found: 5
        }
    );
}

#[test]
fn sphere_flag_curvature_is_one() {
    let k = sphere();
    for s in k.samples(10, 2).unwrap().iter() {
        assert!(flag_curvature_residual(&k, &s.x, &s.y, 1.0).unwrap() < 1e-6);
        let f = k.f(&s.x, &s.y).unwrap();
        let off = flag_curvature_residual(&k, &s.x, &s.y, 0.0).unwrap();
        assert!(off > 0.0 && off.is_finite(), "{off} {f}");
    }
}

#[test]
fn sphere_is_not_berwald() {
    let k = sphere();
    let s = k.samples(3, 2).unwrap();
    let worst = s
        .iter()
        .map(|s| berwald_residual(&k, &s.x, &s.y).unwrap())
        .fold(0.0, f64::max);
    assert!(worst > 1e-3);
}

#[test]
fn conformal_factor_two_is_homothety() {
    let k = sphere();
    let scaled = conformal_transform(&k, &Expr::constant(2.0)).unwrap();
    let samples = scaled.samples(20, 8).unwrap();
    let report = einstein_check(&scaled, &samples, 1e-6).unwrap();
    assert_eq!(report.verdict, Verdict::Einstein);
    assert!((report.sigma.mean() - 8.0).abs() < 1e-6);
}

#[test]
fn non_positive_conformal_factor() {
    let k = sphere();
    let phi = crate::parse("x1", 3, &[]).unwrap();
    assert!(matches!(
        conformal_transform(&k, &phi),
        Err(Error::NonPositiveConformalFactor { .. })
    ));
}

#[test]
fn closed_parts_vanish_for_parallel_form() {
    let k = flat(3, &["1", "1", "0"]);
    let v = k.invariants(&[0.1, 0.1, 0.1], &[1.0, 0.5, 0.0]).unwrap();
    let (ric, t) = ricci_closed_parts(&v);
    assert_eq!(ric, 0.0);
    assert_eq!(t.len(), 21);
    assert!(t.iter().all(|x| *x == 0.0));
}

#[test]
fn sigma_matches_raw_s_contractions() {
    for k in [sphere(), perturbed(), polynomial()] {
        for s in k.samples(10, 4).unwrap().iter() {
            let v = k.invariants(&s.x, &s.y).unwrap();
            let a_inv = crate::linalg::inverse(&k.alpha().eval_checked(&s.x).unwrap()).unwrap();
            let n = v.n;
            // s_j = b^i s_ij, s^i_j = a^ik s_kj
            let s_low: Vec<f64> = (0..n)
                .map(|j| (0..n).map(|i| v.b_up[i] * v.s[(i, j)]).sum())
                .collect();
            let mixed = |i: usize, j: usize| (0..n).map(|m| a_inv[i][m] * v.s[(m, j)]).sum::<f64>();
            let sk_sk: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| a_inv[i][j] * s_low[i] * s_low[j])
                .sum();
            let trace: f64 = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| mixed(i, j) * mixed(j, i))
                .sum();
            let oracle = -sk_sk / (2.0 * v.b2) - 0.25 * trace;
            let got = einstein_sigma(&v);
            assert!(
                normalized(got - oracle, &[got, oracle]) < 1e-12,
                "{got} vs {oracle}"
            );
        }
    }
}
