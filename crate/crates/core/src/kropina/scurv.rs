use alloc::vec::Vec;

use super::spray::spray_first_jets;
use super::KropinaMetric;
use crate::field::MetricField;
use crate::jet::Jet;
use crate::linalg;
use crate::riemannian::{coordinate_jets, LocalMetric};
use crate::scalar::Scalar;
use crate::Result;

/// `S = (n+1)/b² (r_0 − β/α² r_00)`.
pub fn s_curvature_closed(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let v = k.invariants(x, y)?;
    Ok((v.n as f64 + 1.0) / v.b2 * (v.r_0 - v.beta / v.alpha2 * v.r_00))
}

/// `ln √det a` as an order-1 jet at `x`.
fn ln_sqrt_det(metric: &MetricField, xj: &[Jet]) -> Result<Jet> {
    let a = metric.eval(xj)?;
    Ok(linalg::determinant(&a)?.ln()?.scale(0.5))
}

/// `∂G^m/∂y^m − y^m ∂_m ln σ_F` with `σ_F = (2/b)^n √det a`.
pub fn s_curvature_direct(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    k.check_domain(x, y)?;
    let n = k.dimension();
    let g = spray_first_jets(k, x, y)?;
    let divergence: f64 = (0..n).map(|m| g[m].first(n + m)).sum();

    let xj = coordinate_jets(x, 1)?;
    let b2 = k.b2_in(&xj)?;
    let ln_sigma = ln_sqrt_det(k.alpha(), &xj)? - b2.ln()?.scale(0.5 * n as f64);
    let along: f64 = (0..n).map(|m| y[m] * ln_sigma.first(m)).sum();
    Ok(divergence - along)
}

/// `∂Ḡ^m/∂y^m − y^m ∂_m ln √det a`, which vanishes for every metric.
pub fn riemannian_s_defect(metric: &MetricField, x: &[f64], y: &[f64]) -> Result<f64> {
    let m = LocalMetric::at(metric, x)?;
    let n = m.dimension();
    let divergence: f64 = (0..n)
        .map(|i| (0..n).map(|kk| m.gamma[(i, i, kk)] * y[kk]).sum::<f64>())
        .sum();
    let xj: Vec<Jet> = coordinate_jets(x, 1)?;
    let ln_vol = ln_sqrt_det(metric, &xj)?;
    let along: f64 = (0..n).map(|i| y[i] * ln_vol.first(i)).sum();
    Ok(divergence - along)
}
