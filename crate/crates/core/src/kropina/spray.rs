use alloc::vec::Vec;

use super::KropinaMetric;
use crate::jet::{Jet, JetSpace};
use crate::linalg;
use crate::riemannian::BetaInvariants;
use crate::scalar::Scalar;
use crate::tensor::T2;
use crate::Result;

/// `g_ij = ½ ∂²F²/∂y^i∂y^j`.
pub fn fundamental_tensor(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<T2> {
    k.check_domain(x, y)?;
    let n = k.dimension();
    let space = JetSpace::new(2, n)?;
    let xj: Vec<Jet> = x.iter().map(|&v| Jet::constant(&space, v)).collect();
    let yj = y
        .iter()
        .enumerate()
        .map(|(i, &v)| Jet::variable(&space, v, i))
        .collect::<Result<Vec<_>>>()?;
    let f2 = k.f_squared(&xj, &yj)?;
    Ok(T2::from_fn(n, |i, j| 0.5 * f2.second(i, j)))
}

/// `G^i = ¼ g^il {[F²]_{x^k y^l} y^k − [F²]_{x^l}}` with `x`, `y` in `T`.
///
/// `F²` is expanded as an order-2 jet over `(x, y)` whose coefficients are
/// themselves `T`, so when `T` is a jet seeded in the same directions the
/// result carries exact derivatives of `G^i`.
pub(crate) fn spray_in<T: Scalar>(k: &KropinaMetric, x: &[T], y: &[T]) -> Result<Vec<T>> {
    let n = k.dimension();
    let outer = JetSpace::new(2, 2 * n)?;
    let xs = x
        .iter()
        .enumerate()
        .map(|(i, v)| Jet::variable(&outer, v.clone(), i))
        .collect::<Result<Vec<_>>>()?;
    let ys = y
        .iter()
        .enumerate()
        .map(|(i, v)| Jet::variable(&outer, v.clone(), n + i))
        .collect::<Result<Vec<_>>>()?;
    let f2 = k.f_squared(&xs, &ys)?;
    let g: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| f2.second(n + i, n + j).scale(0.5)).collect())
        .collect();
    let rhs: Vec<T> = (0..n)
        .map(|l| {
            let mut acc = -f2.first(l);
            for (kk, yk) in y.iter().enumerate() {
                acc.add_product(&f2.second(kk, n + l), yk);
            }
            acc.scale(0.25)
        })
        .collect();
    linalg::solve(&g, &rhs)
}

/// Spray coefficients straight from the definition.
pub fn spray_first_principles(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    k.check_domain(x, y)?;
    spray_in(k, x, y)
}

/// The closed form of the Kropina spray.
pub fn spray_closed(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    k.check_domain(x, y)?;
    let (m, b) = k.local(x)?;
    let inv = BetaInvariants::compute(&m, &b, y);
    Ok(spray_from(&m.spray(y), &inv, y))
}

pub(crate) fn spray_from(g_alpha: &[f64], v: &BetaInvariants, y: &[f64]) -> Vec<f64> {
    let (a2, beta, b2) = (v.alpha2, v.beta, v.b2);
    let along_b = 0.5 / b2 * (a2 / beta * v.s_0 + v.r_00);
    let along_y = (v.s_0 + beta / a2 * v.r_00) / b2;
    (0..v.n)
        .map(|i| {
            g_alpha[i] - a2 / (2.0 * beta) * v.s_up_0[i] + along_b * v.b_up[i] - along_y * y[i]
        })
        .collect()
}

/// `G^i` as order-2 jets in `(x, y)`, flattened over `2n` directions.
fn spray_jets(k: &KropinaMetric, x: &[f64], y: &[f64], order: usize) -> Result<Vec<Jet>> {
    let n = k.dimension();
    let inner = JetSpace::new(order, 2 * n)?;
    let xs = x
        .iter()
        .enumerate()
        .map(|(i, &v)| Jet::variable(&inner, v, i))
        .collect::<Result<Vec<_>>>()?;
    let ys = y
        .iter()
        .enumerate()
        .map(|(i, &v)| Jet::variable(&inner, v, n + i))
        .collect::<Result<Vec<_>>>()?;
    spray_in(k, &xs, &ys)
}

pub(crate) fn spray_first_jets(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<Vec<Jet>> {
    spray_jets(k, x, y, 1)
}

/// `R^i_k` from the spray definition, at `(i, k)`.
pub fn riemann_curvature_finsler(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<T2> {
    k.check_domain(x, y)?;
    let n = k.dimension();
    let g = spray_jets(k, x, y, 2)?;
    // dy[i][m] = ∂G^i/∂y^m
    let dy: Vec<Vec<f64>> = g
        .iter()
        .map(|gi| (0..n).map(|m| gi.first(n + m)).collect())
        .collect();
    Ok(T2::from_fn(n, |i, kk| {
        let gi = &g[i];
        let mut r = 2.0 * gi.first(kk);
        for m in 0..n {
            r -= y[m] * gi.second(m, n + kk);
            r += 2.0 * *g[m].value() * gi.second(n + m, n + kk);
            r -= dy[i][m] * dy[m][kk];
        }
        r
    }))
}

/// `Ric = R^m_m` from the spray definition.
pub fn ricci_direct(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let r = riemann_curvature_finsler(k, x, y)?;
    Ok((0..k.dimension()).map(|m| r[(m, m)]).sum())
}

/// `(R̄ic, T)` with `Ric = R̄ic + T` from the closed form.
pub fn ricci_closed_parts(v: &BetaInvariants) -> (f64, Vec<f64>) {
    let n = v.n as f64;
    let (a2, beta, b2) = (v.alpha2, v.beta, v.b2);
    let b4 = b2 * b2;
    let a4 = a2 * a2;
    let t = alloc::vec![
        -a2 / (b4 * beta) * v.s_0 * v.r_bb,
        -v.r_bb * v.r_00 / b4,
        a2 / (b2 * beta) * v.bk_s_0k,
        v.bk_r_00k / b2,
        (n - 2.0) / b2 * v.s_0_0,
        (n - 1.0) / (b2 * a2) * beta * v.r_00_0,
        (a2 / beta * v.s_0 + v.r_00) * v.r_trace / b2,
        -a2 / beta * v.sk_0k,
        -v.r_0_0 / b2,
        -2.0 * (2.0 * n - 3.0) / b4 * v.r_0 * v.s_0,
        -(n - 2.0) / b4 * v.s_0 * v.s_0,
        -4.0 * (n - 1.0) / (b4 * a2) * beta * v.r_00 * v.r_0,
        2.0 * (n - 1.0) / (b4 * a2) * beta * v.r_00 * v.s_0,
        3.0 * (n - 1.0) / (b4 * a4) * beta * beta * v.r_00 * v.r_00,
        2.0 * n / b2 * v.sk0_r0k,
        v.r_0 * v.r_0 / b4,
        -a2 / (b2 * beta) * v.sk0_rk,
        (n - 1.0) / (b2 * beta) * a2 * v.sk0_sk,
        -a4 / (2.0 * b2 * beta * beta) * v.sk_sk,
        -a2 / (b2 * beta) * v.r0k_sk,
        -a4 / (4.0 * beta * beta) * v.ss_trace,
    ];
    (v.ricci_alpha, t)
}

/// The closed form of the Kropina Ricci curvature.
pub fn ricci_closed(k: &KropinaMetric, x: &[f64], y: &[f64]) -> Result<f64> {
    let v = k.invariants(x, y)?;
    let (ric, t) = ricci_closed_parts(&v);
    Ok(ric + t.iter().sum::<f64>())
}
