//! Navigation data `(h, W)` of a Kropina metric.
//!
//! `F = α²/β` solves the navigation problem of a Riemannian metric `h` and a
//! unit wind `W`: `h_ij = e^{2ρ} a_ij`, `W_i = ½ e^{2ρ} b_i` with
//! `e^{2ρ} b² = 4`, and conversely `F = h²/(2W_0)`.

use alloc::vec::Vec;

use crate::expr::Expr;
use crate::field::{MetricField, OneFormField, Params, Variance, VectorField};
use crate::jet::Jet;
use crate::kropina::{ricci_direct, KropinaMetric, MIN_B2, MIN_SAMPLES};
use crate::residual::{normalized, Stats, Worst};
use crate::riemannian::{coordinate_jets, covariant_oneform_jets, LocalMetric};
use crate::sampling::{self, SampleSet};
use crate::tensor::{dot, T2};
use crate::{Error, Result};

/// `from_navigation` accepts `|‖W‖_h − 1|` up to this.
pub const UNIT_NORM_TOL: f64 = 1e-6;
/// Chart points scanned by the unit-norm and `b²` gates.
pub const GATE_POINTS: usize = 64;
const GATE_SEED: u64 = 0x5eed;

#[derive(Clone, Debug)]
pub struct NavigationData {
    h: MetricField,
    w: VectorField,
}

impl NavigationData {
    pub fn new(h: MetricField, w: VectorField) -> Result<Self> {
        if h.dimension() != w.dimension() {
            return Err(Error::InvalidField(
                "h and W have different dimensions".into(),
            ));
        }
        Ok(Self { h, w })
    }

    pub fn h(&self) -> &MetricField {
        &self.h
    }

    pub fn w(&self) -> &VectorField {
        &self.w
    }

    pub fn dimension(&self) -> usize {
        self.h.dimension()
    }

    /// `W_i` as expressions.
    pub fn w_lower_expr(&self) -> Vec<Expr> {
        match self.w.variance() {
            Variance::Lower => self.w.components().to_vec(),
            Variance::Upper => self.h.lower_expr(self.w.components()),
        }
    }

    /// `(W^i, W_i)` at `x`.
    pub fn wind_at(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let h = self.h.eval(x)?;
        self.w.both(x, &h)
    }

    /// `‖W‖_h` at `x`.
    pub fn wind_norm(&self, x: &[f64]) -> Result<f64> {
        let (up, low) = self.wind_at(x)?;
        Ok(libm::sqrt(dot(&up, &low)))
    }

    /// Worst `|‖W‖_h − 1|` over `points`.
    pub fn unit_norm_defect(&self, points: &[Vec<f64>]) -> Result<Worst> {
        let mut w = Worst::default();
        for (i, x) in points.iter().enumerate() {
            w.record((self.wind_norm(x)? - 1.0).abs(), i);
        }
        Ok(w)
    }

    /// `W_0 / (‖W‖_h ‖y‖_h)`, the navigation form of the domain ratio.
    pub fn domain_ratio(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let h = self.h.eval_checked(x)?;
        let (up, low) = self.w.both(x, &h)?;
        let w2 = dot(&up, &low);
        if !(w2 > MIN_B2) {
            return Err(Error::DegenerateOneForm {
                value: w2,
                point: x.to_vec(),
            });
        }
        let y2 = T2::from_rows(&h).contract2(y, y);
        Ok(dot(&low, y) / libm::sqrt(w2 * y2))
    }

    /// Admissible samples with `W_0` above `margin`.
    pub fn samples(&self, count: usize, seed: u64, margin: f64) -> Result<SampleSet> {
        sampling::admissible_samples(self.h.region(), count, seed, margin, |x, y| {
            self.domain_ratio(x, y)
        })
    }
}

fn gate_points(metric: &MetricField) -> Vec<Vec<f64>> {
    sampling::points(metric.region(), GATE_POINTS, GATE_SEED)
}

/// `h = (4/b²) a`, `W_i = (2/b²) b_i`.
pub fn to_navigation(k: &KropinaMetric) -> Result<NavigationData> {
    let params = k.params()?;
    let b2 = k.b2_expr();
    let alpha = k.alpha();
    for x in gate_points(alpha) {
        let v = b2.evaluate(&x, &params)?;
        if !(v > MIN_B2) {
            return Err(Error::DegenerateOneForm { value: v, point: x });
        }
    }
    let conformal = Expr::constant(4.0).div(&b2);
    let h_comps: Vec<Expr> = alpha.upper().iter().map(|c| conformal.mul(c)).collect();
    let h = MetricField::new(
        alpha.dimension(),
        h_comps,
        alpha.region().clone(),
        params.clone(),
    )?;
    let wind = Expr::constant(2.0).div(&b2);
    let w_comps: Vec<Expr> = k.beta().components().iter().map(|c| wind.mul(c)).collect();
    let w = VectorField::new(w_comps, Variance::Lower, params)?;
    NavigationData::new(h, w)
}

/// `a = h`, `b_i = 2W_i`, after checking `‖W‖_h = 1` on the chart.
pub fn from_navigation(nav: &NavigationData) -> Result<KropinaMetric> {
    let points = gate_points(&nav.h);
    let worst = nav.unit_norm_defect(&points)?;
    if !worst.below(UNIT_NORM_TOL) {
        let x = points[worst.sample.unwrap_or(0)].clone();
        let norm = nav.wind_norm(&x)?;
        return Err(Error::NotUnitWind { norm, point: x });
    }
    from_navigation_unchecked(nav)
}

pub(crate) fn from_navigation_unchecked(nav: &NavigationData) -> Result<KropinaMetric> {
    let b: Vec<Expr> = nav.w_lower_expr().iter().map(|c| c.scale(2.0)).collect();
    let params: Params = crate::field::merge_params(nav.h.params(), nav.w.params())?;
    let alpha = MetricField::new(
        nav.dimension(),
        nav.h.upper().to_vec(),
        nav.h.region().clone(),
        params.clone(),
    )?;
    KropinaMetric::new(alpha, OneFormField::new(b, params)?)
}

/// Symmetric and antisymmetric parts of `W_{i;j}` and their contractions.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingData {
    pub w_up: Vec<f64>,
    pub w_low: Vec<f64>,
    /// `W_{i;j}` at `(i, j)`.
    pub dw: T2,
    /// `R_ij = ½(W_{i;j} + W_{j;i})`.
    pub r: T2,
    /// `S_ij = ½(W_{i;j} − W_{j;i})`.
    pub s: T2,
    /// `S^i_j = h^ik S_kj`.
    pub s_mixed: T2,
    /// `S_j = W^i S_ij`.
    pub s_j: Vec<f64>,
    /// `R_j = W^i R_ij`.
    pub r_j: Vec<f64>,
    /// `R = R_j W^j`.
    pub r_scalar: f64,
}

impl KillingData {
    /// `max |R_ij|`, normalized by the derivatives it is built from.
    pub fn killing_residual(&self) -> f64 {
        let n = self.r.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(normalized(
                    self.r[(i, j)],
                    &[self.dw[(i, j)], self.dw[(j, i)]],
                ));
            }
        }
        worst
    }

    /// `‖S‖²_h = −S^i_j S^j_i`.
    pub fn s_norm2(&self) -> f64 {
        let n = self.r.dim();
        let mut t = 0.0;
        for i in 0..n {
            for j in 0..n {
                t -= self.s_mixed[(i, j)] * self.s_mixed[(j, i)];
            }
        }
        t
    }
}

fn killing_at(nav: &NavigationData, m: &LocalMetric) -> Result<KillingData> {
    let n = m.dimension();
    let xj = m.coordinates();
    let hj = nav.h.eval(xj)?;
    let (up, low) = nav.w.both(xj, &hj)?;
    let dw_jets = covariant_oneform_jets(&low, m.christoffel_jets())?;
    let w_up: Vec<f64> = up.iter().map(|c| *c.value()).collect();
    let w_low: Vec<f64> = low.iter().map(|c| *c.value()).collect();
    let dw = T2::from_fn(n, |i, j| *dw_jets[i * n + j].value());
    let r = T2::from_fn(n, |i, j| 0.5 * (dw[(i, j)] + dw[(j, i)]));
    let s = T2::from_fn(n, |i, j| 0.5 * (dw[(i, j)] - dw[(j, i)]));
    let s_mixed = T2::from_fn(n, |i, j| (0..n).map(|k| m.a_inv[(i, k)] * s[(k, j)]).sum());
    let s_j = s.apply_left(&w_up);
    let r_j = r.apply_left(&w_up);
    let r_scalar = dot(&r_j, &w_up);
    Ok(KillingData {
        w_up,
        w_low,
        dw,
        r,
        s,
        s_mixed,
        s_j,
        r_j,
        r_scalar,
    })
}

/// Covariant derivatives of `W` with respect to `h` at `x`.
pub fn killing_tensors(nav: &NavigationData, x: &[f64]) -> Result<KillingData> {
    let m = LocalMetric::at(&nav.h, x)?;
    killing_at(nav, &m)
}

/// `ρ = ½ ln(4/b²)` as an order-1 jet at `x`.
pub fn rho_jet(k: &KropinaMetric, x: &[f64]) -> Result<Jet> {
    use crate::scalar::Scalar;
    let xj = coordinate_jets(x, 1)?;
    let b2 = k.b2_in(&xj)?;
    Ok((b2.constant_like(4.0).div(&b2)?).ln()?.scale(0.5))
}

/// Both sides of the conformal identities for `r_ij` and `s_ij`.
pub fn conformal_identity_residuals(
    k: &KropinaMetric,
    nav: &NavigationData,
    x: &[f64],
) -> Result<[f64; 2]> {
    let n = k.dimension();
    let (_, b) = k.local(x)?;
    let kd = killing_tensors(nav, x)?;
    let h = nav.h.eval(x)?;
    let rho = rho_jet(k, x)?;
    let e = libm::exp(-2.0 * *rho.value());
    let drho: Vec<f64> = (0..n).map(|i| rho.first(i)).collect();
    let w_rho = dot(&kd.w_up, &drho);
    let mut worst = [0.0f64; 2];
    for i in 0..n {
        for j in 0..n {
            let r = 0.5 * (b.db[(i, j)] + b.db[(j, i)]);
            let s = 0.5 * (b.db[(i, j)] - b.db[(j, i)]);
            let r_nav = 2.0 * e * (kd.r[(i, j)] - w_rho * h[i][j]);
            let s_nav = 2.0 * e * (kd.s[(i, j)] + drho[i] * kd.w_low[j] - drho[j] * kd.w_low[i]);
            worst[0] = worst[0].max(normalized(r - r_nav, &[r, r_nav]));
            worst[1] = worst[1].max(normalized(s - s_nav, &[s, s_nav]));
        }
    }
    Ok(worst)
}

/// The conformality ⇔ Killing equivalence checked on samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma41Report {
    /// `r_ij − c a_ij` on the `(α, β)` side.
    pub conformality: Worst,
    /// `R_ij` on the `(h, W)` side.
    pub killing: Worst,
    /// `W^k ρ_k + ½c`.
    pub w_rho: Worst,
    pub c: Stats,
    pub tolerance: f64,
}

impl Lemma41Report {
    pub fn conformal(&self) -> bool {
        self.conformality.below(self.tolerance)
    }

    pub fn killing(&self) -> bool {
        self.killing.below(self.tolerance)
    }

    /// Both sides agree; when they hold, `W^k ρ_k = −½c` as well.
    pub fn equivalence_holds(&self) -> bool {
        self.conformal() == self.killing()
            && (!self.conformal() || self.w_rho.below(self.tolerance))
    }
}

pub fn lemma41_residual(k: &KropinaMetric, samples: &SampleSet, tol: f64) -> Result<Lemma41Report> {
    let nav = to_navigation(k)?;
    let n = k.dimension();
    let mut report = Lemma41Report {
        conformality: Worst::default(),
        killing: Worst::default(),
        w_rho: Worst::default(),
        c: Stats::default(),
        tolerance: tol,
    };
    for s in samples.iter() {
        let v = k.invariants(&s.x, &s.y)?;
        let kd = killing_tensors(&nav, &s.x)?;
        let rho = rho_jet(k, &s.x)?;
        let w_rho: f64 = (0..n).map(|i| kd.w_up[i] * rho.first(i)).sum();
        report.conformality.record(v.conformality_residual, s.index);
        report.killing.record(kd.killing_residual(), s.index);
        report
            .w_rho
            .record(normalized(w_rho + 0.5 * v.c, &[w_rho, v.c]), s.index);
        report.c.push(v.c);
    }
    Ok(report)
}

/// `h` Einstein and `W` unit Killing, with the scalar identities.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem42Report {
    /// `Ric_h − δ̂ h`, `‖W‖_h − 1` and `R_ij`.
    pub residuals: [Worst; 3],
    /// `δ̂ = ‖S‖²_h`.
    pub delta_identity: Worst,
    pub delta: Stats,
    /// `Ric/F²` of `F = h²/(2W_0)` against `δ̂`, when `F` is defined.
    pub sigma_agreement: Option<Worst>,
    pub sigma_direct: Stats,
    pub tolerance: f64,
}

impl Theorem42Report {
    /// `h` is Einstein and `W` is a unit Killing field.
    pub fn holds(&self) -> bool {
        self.residuals.iter().all(|w| w.below(self.tolerance))
    }

    /// Every residual and cross identity is below tolerance.
    pub fn passes(&self) -> bool {
        self.holds()
            && self.delta_identity.below(self.tolerance)
            && self.sigma_agreement.is_none_or(|w| w.below(self.tolerance))
    }
}

pub fn theorem42_check(
    nav: &NavigationData,
    samples: &SampleSet,
    tol: f64,
) -> Result<Theorem42Report> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            found: samples.len(),
        });
    }
    let mut report = Theorem42Report {
        residuals: [Worst::default(); 3],
        delta_identity: Worst::default(),
        delta: Stats::default(),
        sigma_agreement: None,
        sigma_direct: Stats::default(),
        tolerance: tol,
    };
    let mut norms = Vec::with_capacity(samples.len());
    for s in samples.iter() {
        let m = LocalMetric::at(&nav.h, &s.x)?;
        let kd = killing_at(nav, &m)?;
        let delta = m.einstein_scalar();
        let norm = libm::sqrt(dot(&kd.w_up, &kd.w_low));
        norms.push(norm);
        report.residuals[0].record(m.einstein_residual(), s.index);
        report.residuals[1].record((norm - 1.0).abs(), s.index);
        report.residuals[2].record(kd.killing_residual(), s.index);
        let ss = kd.s_norm2();
        report
            .delta_identity
            .record(normalized(delta - ss, &[delta, ss]), s.index);
        report.delta.push(delta);
    }
    if norms.iter().all(|v| (v - 1.0).abs() < UNIT_NORM_TOL) {
        let k = from_navigation_unchecked(nav)?;
        let mut agreement = Worst::default();
        for (s, sample) in samples.iter().enumerate() {
            let f2 = libm::pow(k.f(&sample.x, &sample.y)?, 2.0);
            let sigma = ricci_direct(&k, &sample.x, &sample.y)? / f2;
            let delta = LocalMetric::at(&nav.h, &sample.x)?.einstein_scalar();
            agreement.record(
                normalized(sigma - delta, &[sigma, delta]),
                samples.samples[s].index,
            );
            report.sigma_direct.push(sigma);
        }
        report.sigma_agreement = Some(agreement);
    }
    Ok(report)
}

/// `max |F − F'| / |F|` over samples, with `F'` the metric rebuilt from its
/// navigation data.
pub fn round_trip_defect(k: &KropinaMetric, samples: &SampleSet) -> Result<Worst> {
    let back = from_navigation(&to_navigation(k)?)?;
    let mut w = Worst::default();
    for s in samples.iter() {
        let f = k.f(&s.x, &s.y)?;
        let g = back.f(&s.x, &s.y)?;
        w.record(((f - g) / f).abs(), s.index);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ChartRegion;
    use crate::spaceforms::example41;
    use alloc::vec;

    fn flat(b: &[&str]) -> KropinaMetric {
        let n = b.len();
        let alpha = MetricField::euclidean(n, ChartRegion::cube(n, 1.0)).unwrap();
        KropinaMetric::new(alpha, OneFormField::parse(b, Params::new()).unwrap()).unwrap()
    }

    #[test]
    fn unit_length_form_is_its_own_data() {
        let nav = to_navigation(&flat(&["2", "0", "0"])).unwrap();
        let x = [0.2, 0.1, -0.3];
        let h = nav.h().eval(&x).unwrap();
        assert_eq!(
            h,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0]
            ]
        );
        assert_eq!(nav.wind_at(&x).unwrap().1, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn half_length_form() {
        let nav = to_navigation(&flat(&["1", "0", "0"])).unwrap();
        let x = [0.0; 3];
        assert_eq!(nav.h().eval(&x).unwrap()[1][1], 4.0);
        let (up, low) = nav.wind_at(&x).unwrap();
        assert_eq!(low, vec![2.0, 0.0, 0.0]);
        assert!((dot(&up, &low) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn flat_wind_gives_expected_f() {
        let h = MetricField::euclidean(2, ChartRegion::cube(2, 1.0)).unwrap();
        let w = VectorField::parse(&["1", "0"], Variance::Upper, Params::new()).unwrap();
        let k = from_navigation(&NavigationData::new(h, w).unwrap()).unwrap();
        let y = [0.7, 0.4];
        let f = k.f(&[0.1, 0.2], &y).unwrap();
        assert!((f - (0.49 + 0.16) / 1.4).abs() < 1e-15);
    }

    #[test]
    fn short_wind_is_rejected() {
        let h = MetricField::euclidean(2, ChartRegion::cube(2, 1.0)).unwrap();
        let w = VectorField::parse(&["0.9", "0"], Variance::Upper, Params::new()).unwrap();
        let err = from_navigation(&NavigationData::new(h, w).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotUnitWind { norm, .. } if (norm - 0.9).abs() < 1e-15));
    }

    #[test]
    fn non_killing_wind() {
        let h = MetricField::euclidean(3, ChartRegion::cube(3, 1.0)).unwrap();
        let w = VectorField::parse(&["x1", "0", "0"], Variance::Upper, Params::new()).unwrap();
        let kd = killing_tensors(&NavigationData::new(h, w).unwrap(), &[0.3, 0.1, 0.2]).unwrap();
        assert!((kd.r[(0, 0)] - 1.0).abs() < 1e-15);
        assert_eq!(kd.s.max_abs(), 0.0);
    }

    #[test]
    fn conformal_identities_on_sphere_pair() {
        let sphere =
            from_navigation(&example41(1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0).unwrap()).unwrap();
        let k = flat(&["2 + 0.1*x1", "0.3*x2*x3", "0.2"]);
        for k in [sphere, k] {
            let nav = to_navigation(&k).unwrap();
            for x in sampling::points(k.alpha().region(), 10, 3) {
                let [r, s] = conformal_identity_residuals(&k, &nav, &x).unwrap();
                assert!(r < 1e-10 && s < 1e-10, "{r} {s}");
            }
        }
    }

    #[test]
    fn constraint_holds_by_construction() {
        let k = flat(&["2 + 0.1*x1", "0.3*x2", "0.2"]);
        let nav = to_navigation(&k).unwrap();
        for x in sampling::points(k.alpha().region(), 10, 1) {
            let rho = rho_jet(&k, &x).unwrap();
            let b2 = k.b2_in(&x).unwrap();
            assert!((libm::exp(2.0 * *rho.value()) * b2 - 4.0).abs() < 1e-12);
            assert!((nav.wind_norm(&x).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn killing_tensor_decomposition() {
        let nav = example41(1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0).unwrap();
        for x in sampling::points(nav.h().region(), 10, 5) {
            let t = killing_tensors(&nav, &x).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(t.r[(i, j)], t.r[(j, i)]);
                    assert_eq!(t.s[(i, j)], -t.s[(j, i)]);
                    assert!((t.r[(i, j)] + t.s[(i, j)] - t.dw[(i, j)]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn conformal_killing_equivalence_both_directions() {
        let conformal = flat(&["x1 + 3", "x2", "x3"]);
        let s = conformal.samples(20, 2).unwrap();
        let r = lemma41_residual(&conformal, &s, 1e-8).unwrap();
        assert!(
            r.conformal() && r.killing() && r.equivalence_holds(),
            "{r:?}"
        );
        assert!((r.c.mean() - 1.0).abs() < 1e-12);

        let perturbed = flat(&["2 + 0.1*x1", "0", "0"]);
        let s = perturbed.samples(20, 2).unwrap();
        let r = lemma41_residual(&perturbed, &s, 1e-8).unwrap();
        assert!(
            !r.conformal() && !r.killing() && r.equivalence_holds(),
            "{r:?}"
        );
    }

    #[test]
    fn sphere_unit_killing_criterion() {
        let nav = example41(1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0).unwrap();
        let s = nav.samples(20, 4, 0.1).unwrap();
        let r = theorem42_check(&nav, &s, 1e-6).unwrap();
        assert!(r.passes(), "{r:?}");
        assert!((r.delta.mean() - 2.0).abs() < 1e-9);
        assert!((r.sigma_direct.mean() - 2.0).abs() < 1e-6);
    }
}
