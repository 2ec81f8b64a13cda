//! Executes the checks of a configuration over one seeded sample set.

use std::time::Instant;

use kropina_core::kropina::{
    berwald_residual, conformal_transform, einstein_check, flag_curvature_residual, ricci_closed,
    ricci_direct, s_curvature_closed, s_curvature_direct, spray_closed, spray_first_principles,
    EinsteinReport, Verdict,
};
use kropina_core::navigation::{
    conformal_identity_residuals, from_navigation, lemma41_residual, rho_jet, theorem42_check,
    to_navigation, NavigationData,
};
use kropina_core::residual::{normalized, Stats, Worst};
use kropina_core::riemannian::lemma31_residuals;
use kropina_core::sampling::SampleSet;
use kropina_core::{KropinaMetric, Result as CoreResult};

use crate::config::{Check, RunConfig, Subject};
use crate::report::{CheckReport, Estimates, Report, SampleRef, SamplingInfo, Status, Summary};

/// Tolerance of the conformal identities relating `r_ij`, `s_ij` to `R_ij`, `S_ij`.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Tolerance of `‖W‖_h = 1` and `e^{2ρ}b² = 4` on converted data.
pub const CONSTRAINT_TOL: f64 = 1e-8;

struct Ctx<'a> {
    cfg: &'a RunConfig,
    kropina: std::result::Result<KropinaMetric, String>,
    nav: std::result::Result<NavigationData, String>,
    samples: SampleSet,
    einstein: Option<std::result::Result<EinsteinReport, String>>,
    estimates: Estimates,
}

fn sample_ref(samples: &SampleSet, index: usize) -> Option<SampleRef> {
    samples
        .iter()
        .find(|s| s.index == index)
        .map(|s| SampleRef {
            index,
            x: s.x.clone(),
            y: s.y.clone(),
        })
}

fn fill(report: &mut CheckReport, samples: &SampleSet, worst: &Worst) {
    report.max_residual = Some(worst.value);
    report.worst_sample = worst.sample.and_then(|i| sample_ref(samples, i));
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

impl Ctx<'_> {
    fn kropina(&self) -> std::result::Result<&KropinaMetric, String> {
        self.kropina.as_ref().map_err(Clone::clone)
    }

    fn nav(&self) -> std::result::Result<&NavigationData, String> {
        self.nav.as_ref().map_err(Clone::clone)
    }

    fn einstein(&mut self) -> std::result::Result<&EinsteinReport, String> {
        if self.einstein.is_none() {
            let tol = self.cfg.tolerance(Check::Einstein);
            let r = self
                .kropina()
                .and_then(|k| einstein_check(k, &self.samples, tol).map_err(|e| e.to_string()));
            if let Ok(r) = &r {
                self.estimates.c = Summary::of(&r.c);
                if r.dimension == 2 {
                    self.estimates.lambda = Summary::of(&r.scalar);
                } else {
                    self.estimates.f = Summary::of(&r.scalar);
                }
                self.estimates.sigma = Summary::of(&r.sigma);
                self.estimates.sigma_direct = Summary::of(&r.sigma_direct);
                self.estimates.flag_curvature = Some(r.flag_estimate);
            }
            self.einstein = Some(r);
        }
        self.einstein
            .as_ref()
            .unwrap()
            .as_ref()
            .map_err(Clone::clone)
    }

    fn per_sample(
        &self,
        mut f: impl FnMut(&KropinaMetric, &[f64], &[f64]) -> CoreResult<f64>,
    ) -> std::result::Result<Worst, String> {
        let k = self.kropina()?;
        let mut w = Worst::default();
        for s in self.samples.iter() {
            let v = f(k, &s.x, &s.y).map_err(|e| format!("sample {}: {e}", s.index))?;
            w.record(v, s.index);
        }
        Ok(w)
    }

    fn run_check(&mut self, check: Check) -> CheckReport {
        let tol = self.cfg.tolerance(check);
        let mut report = CheckReport::new(check, tol);
        if let Err(message) = self.evaluate(check, tol, &mut report) {
            report.status = Status::Fail;
            report.message = Some(message);
        }
        report
    }

    fn evaluate(
        &mut self,
        check: Check,
        tol: f64,
        out: &mut CheckReport,
    ) -> std::result::Result<(), String> {
        match check {
            Check::Spray => {
                let w = self.per_sample(|k, x, y| {
                    let a = spray_closed(k, x, y)?;
                    let b = spray_first_principles(k, x, y)?;
                    let scale = 1.0 + max_norm(&a);
                    Ok(a.iter()
                        .zip(&b)
                        .map(|(u, v)| (u - v).abs() / scale)
                        .fold(0.0, f64::max))
                })?;
                fill(out, &self.samples, &w);
                out.status = Status::from_bool(w.below(tol));
            }
            Check::Ricci => {
                let w = self.per_sample(|k, x, y| {
                    let a = ricci_closed(k, x, y)?;
                    let b = ricci_direct(k, x, y)?;
                    Ok((a - b).abs() / (1.0 + a.abs()))
                })?;
                fill(out, &self.samples, &w);
                out.status = Status::from_bool(w.below(tol));
            }
            Check::Scurv => {
                let mut magnitude = Worst::default();
                let w = self.per_sample(|k, x, y| {
                    let a = s_curvature_closed(k, x, y)?;
                    let b = s_curvature_direct(k, x, y)?;
                    magnitude.record(a.abs(), 0);
                    Ok(normalized(a - b, &[a, b]))
                })?;
                fill(out, &self.samples, &w);
                out.value("max_abs_s", magnitude.value);
                out.status = Status::from_bool(w.below(tol));
            }
            Check::Einstein => {
                let r = self.einstein()?.clone();
                let mut worst = r.max_residual();
                worst.merge(&r.sigma_agreement);
                fill(out, &self.samples, &worst);
                out.value("verdict", r.verdict.as_str());
                out.value("branch", if r.dimension == 2 { "n=2" } else { "n>=3" });
                out.value(
                    "residuals",
                    r.residuals.iter().map(|w| w.value).collect::<Vec<_>>(),
                );
                out.value("sigma_agreement", r.sigma_agreement.value);
                out.value("sigma_spread", r.sigma_spread());
                out.value("max_s", r.max_s.value);
                out.status = Status::from_bool(r.verdict == Verdict::Einstein);
            }
            Check::Navigation => self.navigation(tol, out)?,
            Check::Killing => {
                let nav = self.nav()?;
                let r = theorem42_check(nav, &self.samples, tol).map_err(|e| e.to_string())?;
                let mut worst = Worst::default();
                for w in &r.residuals {
                    worst.merge(w);
                }
                worst.merge(&r.delta_identity);
                if let Some(w) = &r.sigma_agreement {
                    worst.merge(w);
                }
                fill(out, &self.samples, &worst);
                out.value("h_einstein", r.residuals[0].value);
                out.value("unit_norm", r.residuals[1].value);
                out.value("killing", r.residuals[2].value);
                out.value("delta_identity", r.delta_identity.value);
                out.value("sigma_agreement", r.sigma_agreement.map(|w| w.value));
                self.estimates.delta = Summary::of(&r.delta);
                if !r.residuals[1].below(tol) {
                    out.message = Some("unit-norm gate: W is not a unit field".into());
                } else if !r.residuals[2].below(tol) {
                    out.message = Some("Killing gate: W is not a Killing field".into());
                } else if !r.residuals[0].below(tol) {
                    out.message = Some("Einstein gate: h is not Einstein".into());
                }
                out.status = Status::from_bool(r.passes());
            }
            Check::Flag => {
                let curvature = match self.cfg.flag_curvature {
                    Some(k) => k,
                    None => self.einstein()?.flag_estimate,
                };
                let w = self.per_sample(|k, x, y| flag_curvature_residual(k, x, y, curvature))?;
                fill(out, &self.samples, &w);
                out.value("curvature", curvature);
                out.status = Status::from_bool(w.below(tol));
            }
            Check::Berwald => {
                let mut sigma = Stats::default();
                let w = self.per_sample(|k, x, y| {
                    let f = k.f(x, y)?;
                    sigma.push(ricci_direct(k, x, y)? / (f * f));
                    berwald_residual(k, x, y)
                })?;
                fill(out, &self.samples, &w);
                let flat = sigma.max.abs().max(sigma.min.abs()) < tol;
                out.value("ricci_flat", flat);
                out.value("max_abs_sigma", sigma.max.abs().max(sigma.min.abs()));
                out.status = if flat {
                    Status::from_bool(w.below(tol))
                } else {
                    out.message = Some("not Ricci-flat; Berwald property not implied".into());
                    Status::NotApplicable
                };
            }
            Check::Conformal => self.conformal(tol, out)?,
            Check::Lemma31 => {
                let k = self.kropina()?;
                let r = lemma31_residuals(k.alpha(), k.beta(), &self.samples, tol)
                    .map_err(|e| e.to_string())?;
                let worst = r.max_residual();
                fill(out, &self.samples, &worst);
                out.value("conformality", r.conformality.value);
                out.value("alpha_einstein", r.alpha_einstein.value);
                out.value(
                    "residuals",
                    r.residuals.iter().map(|w| w.value).collect::<Vec<_>>(),
                );
                out.status = match r.not_applicable {
                    Some(reason) => {
                        out.message = Some(reason.into());
                        Status::NotApplicable
                    }
                    None => Status::from_bool(worst.below(tol)),
                };
            }
            Check::Lemma41 => {
                let k = self.kropina()?;
                let r = lemma41_residual(k, &self.samples, tol).map_err(|e| e.to_string())?;
                let mut worst = r.conformality;
                worst.merge(&r.killing);
                fill(out, &self.samples, &worst);
                out.value("conformality", r.conformality.value);
                out.value("killing", r.killing.value);
                out.value("w_rho", r.w_rho.value);
                out.value("conformal", r.conformal());
                out.value("killing_holds", r.killing());
                out.status = Status::from_bool(r.equivalence_holds());
            }
        }
        Ok(())
    }

    fn navigation(&mut self, tol: f64, out: &mut CheckReport) -> std::result::Result<(), String> {
        let k = self.kropina()?.clone();
        let err = |e: kropina_core::Error| e.to_string();
        // In navigation mode `k` already came from the given data, so this
        // closes the loop on that side as well.
        let converted = to_navigation(&k).map_err(err)?;
        let back = from_navigation(&converted).map_err(err)?;
        let mut trip = Worst::default();
        let mut identities = [Worst::default(); 2];
        let mut constraint = Worst::default();
        for s in self.samples.iter() {
            let f = k.f(&s.x, &s.y).map_err(err)?;
            let g = back.f(&s.x, &s.y).map_err(err)?;
            trip.record(((f - g) / f).abs(), s.index);
            let [r, si] = conformal_identity_residuals(&k, &converted, &s.x).map_err(err)?;
            identities[0].record(r, s.index);
            identities[1].record(si, s.index);
            let rho = rho_jet(&k, &s.x).map_err(err)?;
            let b2 = k.b2_in(&s.x).map_err(err)?;
            let e = ((2.0 * *rho.value()).exp() * b2 - 4.0).abs();
            let unit = (converted.wind_norm(&s.x).map_err(err)? - 1.0).abs();
            constraint.record(e.max(unit), s.index);
        }
        fill(out, &self.samples, &trip);
        out.value("identity_r", identities[0].value);
        out.value("identity_s", identities[1].value);
        out.value("constraint", constraint.value);
        let ok = trip.below(tol)
            && identities.iter().all(|w| w.below(IDENTITY_TOL))
            && constraint.below(CONSTRAINT_TOL);
        out.status = Status::from_bool(ok);
        Ok(())
    }

    fn conformal(&mut self, tol: f64, out: &mut CheckReport) -> std::result::Result<(), String> {
        let phi = self.cfg.conformal_factor().map_err(|e| format!("{e:#}"))?;
        let base = self.einstein()?.clone();
        let k = self.kropina()?;
        let transformed = conformal_transform(k, &phi).map_err(|e| e.to_string())?;
        let samples = transformed
            .samples(self.cfg.samples, self.cfg.seed)
            .map_err(|e| e.to_string())?;
        let r = einstein_check(&transformed, &samples, tol).map_err(|e| e.to_string())?;
        let homothety = !phi.depends_on_coordinates();
        out.value("homothety", homothety);
        out.value("verdict", r.verdict.as_str());
        out.value("transformed_residual", r.max_residual().value);
        out.value("sigma", r.sigma.mean());
        if base.verdict != Verdict::Einstein {
            out.message = Some("untransformed metric is not Einstein".into());
            out.status = Status::NotApplicable;
            return Ok(());
        }
        if homothety {
            let factor = phi.evaluate(
                &vec![0.0; k.dimension()],
                &k.params().map_err(|e| e.to_string())?,
            );
            let factor = factor.map_err(|e| e.to_string())?;
            let expected = factor * factor * base.sigma.mean();
            let scaling = normalized(r.sigma.mean() - expected, &[expected]);
            out.max_residual = Some(scaling);
            out.value("expected_sigma", expected);
            out.status = Status::from_bool(r.verdict == Verdict::Einstein && scaling < tol);
        } else {
            let worst = r.max_residual();
            out.max_residual = Some(worst.value);
            out.worst_sample = worst.sample.and_then(|i| sample_ref(&samples, i));
            out.status = Status::from_bool(r.verdict == Verdict::NotEinstein);
        }
        Ok(())
    }
}

/// Runs `cfg`; an `Err` means the configuration itself is invalid.
pub fn run(cfg: &RunConfig) -> anyhow::Result<Report> {
    let start = Instant::now();
    let subject = cfg.validate()?;
    let (kropina, nav) = match subject {
        Subject::Kropina(k) => {
            let nav = to_navigation(&k).map_err(|e| e.to_string());
            (Ok(k), nav)
        }
        Subject::Navigation(n) => {
            let k = from_navigation(&n)
                .map(|k| k.with_margin(cfg.margin))
                .map_err(|e| format!("unit-norm gate: {e}"));
            (k, Ok(n))
        }
    };
    let samples = match (&kropina, &nav) {
        (Ok(k), _) => k.samples(cfg.samples, cfg.seed),
        (Err(_), Ok(n)) => n.samples(cfg.samples, cfg.seed, cfg.margin),
        (Err(_), Err(_)) => Ok(SampleSet::default()),
    };
    let (samples, sampling_error) = match samples {
        Ok(s) => (s, None),
        Err(e) => (SampleSet::default(), Some(format!("sampling: {e}"))),
    };
    let mut ctx = Ctx {
        cfg,
        kropina,
        nav,
        samples,
        einstein: None,
        estimates: Estimates::default(),
    };
    let mut checks = Vec::with_capacity(cfg.checks.len());
    for &check in &cfg.checks {
        let report = match &sampling_error {
            Some(e) => {
                let mut r = CheckReport::new(check, cfg.tolerance(check));
                r.message = Some(e.clone());
                r
            }
            None => ctx.run_check(check),
        };
        checks.push(report);
    }
    let status = Status::from_bool(checks.iter().all(|c| c.status != Status::Fail));
    let sampling = SamplingInfo {
        requested: cfg.samples,
        admissible: ctx.samples.len(),
        skipped: ctx.samples.skipped.clone(),
    };
    Ok(Report {
        tool: crate::report::TOOL,
        version: crate::report::VERSION,
        status,
        config: cfg.clone(),
        sampling,
        checks,
        estimates: ctx.estimates,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
