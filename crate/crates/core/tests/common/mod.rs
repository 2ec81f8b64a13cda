#![allow(dead_code)]

use kropina_core::field::{ChartRegion, MetricField, OneFormField, Params};
use kropina_core::spaceforms::{einstein_kropina_from_spaceform, example41};
use kropina_core::KropinaMetric;

pub fn flat(b: &[&str]) -> KropinaMetric {
    let n = b.len();
    let alpha = MetricField::euclidean(n, ChartRegion::cube(n, 1.0)).unwrap();
    KropinaMetric::new(alpha, OneFormField::parse(b, Params::new()).unwrap()).unwrap()
}

pub fn sphere() -> KropinaMetric {
    einstein_kropina_from_spaceform(&example41(1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0).unwrap())
        .unwrap()
}

pub fn perturbed() -> KropinaMetric {
    flat(&["2 + 0.1*x1", "0", "0"])
}

pub fn polynomial() -> KropinaMetric {
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

pub fn fixtures() -> Vec<(&'static str, KropinaMetric)> {
    vec![
        ("sphere", sphere()),
        ("perturbed", perturbed()),
        ("polynomial", polynomial()),
    ]
}

/// `|a − b| / max(|a|, |b|, tiny)`.
pub fn relative(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s < 1e-300 {
        0.0
    } else {
        (a - b).abs() / s
    }
}
