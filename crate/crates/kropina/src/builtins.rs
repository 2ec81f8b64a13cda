//! Built-in fixtures as fully populated configurations.

use std::collections::BTreeMap;

use anyhow::{bail, Context};
use kropina_core::spaceforms::{
    killing_field, spaceform_metric, KillingSpec, SpaceFormSpec, DEFAULT_RADIUS, MU,
};
use kropina_core::Expr;

use crate::config::{Chart, Check, Mode, RunConfig, WindVariance, DEFAULT_SAMPLES, DEFAULT_SEED};

pub const NAMES: [&str; 6] = [
    "flat-parallel",
    "example41",
    "spaceform",
    "perturbed",
    "spaceform-2d",
    "random-polynomial",
];

type Overrides = BTreeMap<String, f64>;

fn strings(exprs: &[Expr]) -> Vec<String> {
    exprs.iter().map(|e| e.to_string()).collect()
}

fn cube(n: usize, half: f64) -> Chart {
    Chart::Box {
        lower: vec![-half; n],
        upper: vec![half; n],
    }
}

fn ball(n: usize) -> Chart {
    Chart::Ball {
        center: vec![0.0; n],
        radius: DEFAULT_RADIUS,
    }
}

fn euclidean_upper(n: usize) -> Vec<String> {
    (0..n)
        .flat_map(|i| (i..n).map(move |j| if i == j { "1" } else { "0" }.to_string()))
        .collect()
}

fn base(
    name: &str,
    dimension: usize,
    mode: Mode,
    metric: Vec<String>,
    chart: Chart,
    checks: &[Check],
) -> RunConfig {
    RunConfig {
        name: Some(name.into()),
        dimension,
        mode,
        metric,
        form: None,
        wind: None,
        wind_variance: WindVariance::Upper,
        chart,
        parameters: BTreeMap::new(),
        samples: DEFAULT_SAMPLES,
        seed: DEFAULT_SEED,
        margin: kropina_core::sampling::DEFAULT_MARGIN,
        tolerances: BTreeMap::new(),
        checks: checks.to_vec(),
        flag_curvature: None,
        conformal_factor: "2".into(),
    }
}

fn take(overrides: &mut Overrides, key: &str, default: f64) -> f64 {
    overrides.remove(key).unwrap_or(default)
}

fn space_form_config(
    name: &str,
    spec: &SpaceFormSpec,
    killing: &KillingSpec,
    checks: &[Check],
) -> anyhow::Result<RunConfig> {
    let h = spaceform_metric(spec)?;
    let w = killing_field(killing)?;
    let chart = ball(spec.dimension);
    let mut cfg = base(
        name,
        spec.dimension,
        Mode::Navigation,
        strings(h.upper()),
        chart,
        checks,
    );
    cfg.wind = Some(strings(w.components()));
    cfg.wind_variance = WindVariance::Upper;
    cfg.parameters.insert(MU.into(), spec.mu);
    Ok(cfg)
}

/// The configuration of builtin `name`, with `overrides` applied.
///
/// `example41` takes `a`, `b`, `c` and `sign`; `spaceform` takes `n`, `mu`,
/// `q{i}{j}` for `i < j` and `c{i}` (1-based); any other builtin takes
/// overrides of its expression parameters only.
pub fn builtin(name: &str, overrides: &Overrides) -> anyhow::Result<RunConfig> {
    let mut o = overrides.clone();
    let all = Check::ALL;
    let cfg = match name {
        "flat-parallel" => {
            let mut cfg = base(
                name,
                3,
                Mode::Kropina,
                euclidean_upper(3),
                cube(3, 1.0),
                &all,
            );
            cfg.form = Some(vec!["2".into(), "0".into(), "0".into()]);
            cfg.flag_curvature = Some(0.0);
            cfg
        }
        "example41" => {
            let (a, b, c) = (
                take(&mut o, "a", 1.0 / 3.0),
                take(&mut o, "b", 2.0 / 3.0),
                take(&mut o, "c", 2.0 / 3.0),
            );
            let sign = take(&mut o, "sign", 1.0);
            // validates the normalization and nonzero entries
            kropina_core::spaceforms::example41(a, b, c, sign)?;
            let q = vec![vec![0.0, a, b], vec![-a, 0.0, c], vec![-b, -c, 0.0]];
            let killing = KillingSpec::new(q, vec![sign * c, -sign * b, sign * a], 1.0)?;
            let mut cfg = space_form_config(name, &SpaceFormSpec::new(3, 1.0), &killing, &all)?;
            cfg.flag_curvature = Some(1.0);
            cfg
        }
        "spaceform" => {
            let n = take(&mut o, "n", 3.0);
            if n.fract() != 0.0 || !(2.0..=6.0).contains(&n) {
                bail!("spaceform dimension n must be an integer in 2..=6, got {n}");
            }
            let n = n as usize;
            let mu = take(&mut o, "mu", 0.0);
            let mut q = vec![vec![0.0; n]; n];
            #[allow(clippy::needless_range_loop)]
            for i in 0..n {
                for j in i + 1..n {
                    let v = take(&mut o, &format!("q{}{}", i + 1, j + 1), 0.0);
                    q[i][j] = v;
                    q[j][i] = -v;
                }
            }
            let c: Vec<f64> = (0..n)
                .map(|i| {
                    take(
                        &mut o,
                        &format!("c{}", i + 1),
                        if i == 0 { 1.0 } else { 0.0 },
                    )
                })
                .collect();
            let killing = KillingSpec::new(q, c, mu)?;
            let checks = [
                Check::Navigation,
                Check::Killing,
                Check::Einstein,
                Check::Spray,
                Check::Ricci,
                Check::Scurv,
            ];
            space_form_config(name, &SpaceFormSpec::new(n, mu), &killing, &checks)?
        }
        "perturbed" => {
            let checks = [
                Check::Spray,
                Check::Ricci,
                Check::Scurv,
                Check::Navigation,
                Check::Einstein,
                Check::Lemma41,
            ];
            let mut cfg = base(
                name,
                3,
                Mode::Kropina,
                euclidean_upper(3),
                cube(3, 1.0),
                &checks,
            );
            cfg.form = Some(vec!["2 + eps*x1".into(), "0".into(), "0".into()]);
            cfg.parameters.insert("eps".into(), 0.1);
            cfg
        }
        "spaceform-2d" => {
            let spec = SpaceFormSpec::new(2, 1.0);
            let h = spaceform_metric(&spec)?;
            let b = Expr::constant(2.0).div(&kropina_core::spaceforms::conformal_h_expr(2).powi(2));
            let checks = [
                Check::Spray,
                Check::Ricci,
                Check::Einstein,
                Check::Scurv,
                Check::Navigation,
                Check::Killing,
                Check::Berwald,
                Check::Lemma31,
                Check::Lemma41,
            ];
            let mut cfg = base(name, 2, Mode::Kropina, strings(h.upper()), ball(2), &checks);
            cfg.form = Some(vec![b.to_string(), "0".into()]);
            cfg.parameters.insert(MU.into(), spec.mu);
            cfg
        }
        "random-polynomial" => {
            let metric = [
                "1 + 0.2*x1^2",
                "0.1*x1*x2",
                "0.05*x3",
                "1.2 + 0.1*sin(x2*x3)",
                "0.1*x1",
                "0.9 + 0.15*x3^2 + 0.1*x1",
            ];
            let form = [
                "1.5 + 0.3*x1*x2 - 0.2*x3^2",
                "0.4*x1 + 0.2*x2*x3 - 0.3",
                "0.25*x2^2 + 0.5*x3 + 0.1",
            ];
            let checks = [Check::Spray, Check::Ricci, Check::Scurv, Check::Navigation];
            let mut cfg = base(
                name,
                3,
                Mode::Kropina,
                metric.iter().map(|s| s.to_string()).collect(),
                cube(3, 0.5),
                &checks,
            );
            cfg.form = Some(form.iter().map(|s| s.to_string()).collect());
            cfg
        }
        _ => bail!("unknown builtin {name:?}; known: {}", NAMES.join(", ")),
    };
    let mut cfg = cfg;
    for (k, v) in o {
        let slot = cfg
            .parameters
            .get_mut(&k)
            .with_context(|| format!("builtin {name} has no parameter {k:?}"))?;
        *slot = v;
    }
    Ok(cfg)
}
