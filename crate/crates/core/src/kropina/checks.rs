use alloc::vec::Vec;

use super::spray::{fundamental_tensor, riemann_curvature_finsler, spray_closed};
use super::KropinaMetric;
use crate::expr::Expr;
use crate::field::{MetricField, OneFormField};
use crate::navigation::to_navigation;
use crate::residual::normalized;
use crate::riemannian::LocalMetric;
use crate::sampling;
use crate::{Error, Result};

/// Chart points at which a conformal factor must be positive.
pub const CONFORMAL_CHECK_POINTS: usize = 64;

/// `max |R^i_k − K(F²δ^i_k − y^i g_kj y^j)|`, normalized.
pub fn flag_curvature_residual(
    k: &KropinaMetric,
    x: &[f64],
    y: &[f64],
    curvature: f64,
) -> Result<f64> {
    let n = k.dimension();
    let r = riemann_curvature_finsler(k, x, y)?;
    let g = fundamental_tensor(k, x, y)?;
    let f = k.f(x, y)?;
    let f2 = f * f;
    let gy = g.apply(y);
    let mut scale = 0.0f64;
    let mut worst = 0.0f64;
    let mut diffs = Vec::with_capacity(n * n);
    for i in 0..n {
        for kk in 0..n {
            let delta = if i == kk { f2 } else { 0.0 };
            let model = curvature * (delta - y[i] * gy[kk]);
            scale = scale
                .max(r[(i, kk)].abs())
                .max((curvature * f2).abs())
                .max((curvature * y[i] * gy[kk]).abs());
            diffs.push(r[(i, kk)] - model);
        }
    }
    for d in diffs {
        worst = worst.max(normalized(d, &[scale]));
    }
    Ok(worst)
}

/// `max |G^i − G̃^i|` with `G̃` the spray of the navigation metric `h`.
pub fn berwald_residual(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let g = spray_closed(k, x, y)?;
    let nav = to_navigation(k)?;
    let gh = LocalMetric::at(nav.h(), x)?.spray(y);
    let scale: Vec<f64> = g.iter().chain(&gh).copied().collect();
    Ok(g.iter()
        .zip(&gh)
        .map(|(a, b)| normalized(a - b, &scale))
        .fold(0.0, f64::max))
}

/// `ã_ij = φ⁻² a_ij`, `b̃_i = φ⁻¹ b_i`, with `φ > 0` checked on the chart.
pub fn conformal_transform(k: &KropinaMetric, phi: &Expr) -> Result<KropinaMetric> {
    let params = k.params()?;
    let region = k.alpha().region();
    let mut points = sampling::points(region, CONFORMAL_CHECK_POINTS, 0);
    points.push(region_center(region));
    for x in points {
        let value = phi.evaluate(&x, &params)?;
        if !(value > 0.0) {
            return Err(Error::NonPositiveConformalFactor { value, point: x });
        }
    }
    let inv = Expr::constant(1.0).div(phi);
    let inv2 = inv.powi(2);
    let alpha = MetricField::new(
        k.dimension(),
        k.alpha().upper().iter().map(|c| inv2.mul(c)).collect(),
        region.clone(),
        params.clone(),
    )?;
    let beta = OneFormField::new(
        k.beta().components().iter().map(|c| inv.mul(c)).collect(),
        params,
    )?;
    Ok(KropinaMetric::new(alpha, beta)?.with_margin(k.margin()))
}

fn region_center(region: &crate::field::ChartRegion) -> Vec<f64> {
    use crate::field::ChartRegion;
    match region {
        ChartRegion::Box { lower, upper } => lower
            .iter()
            .zip(upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect(),
        ChartRegion::Ball { center, .. } => center.clone(),
    }
}
