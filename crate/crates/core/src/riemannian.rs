//! Levi-Civita calculus of a chart metric and the invariants of a 1-form.
//!
//! Conventions: `Γ^i_jk = ½ a^il (∂_j a_lk + ∂_k a_lj − ∂_l a_jk)`,
//! `R^i_jkl = ∂_k Γ^i_jl − ∂_l Γ^i_jk + Γ^i_km Γ^m_jl − Γ^i_lm Γ^m_jk` and
//! `Ric_jl = R^k_jkl`, so the round sphere has positive curvature. With
//! these, `b_{j|k|l} − b_{j|l|k} = b_m R^m_jkl`.
//!
//! Everything is computed from order-2 jets of the components at the point,
//! so the first derivatives of `Γ`, `b_{i|j}` and the trace estimator `c`
//! are exact to roundoff.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::field::{MetricField, OneFormField};
use crate::jet::{Jet, JetSpace};
use crate::linalg;
use crate::residual::{normalized, Worst};
use crate::sampling::SampleSet;
use crate::scalar::Scalar;
use crate::tensor::{dot, T2, T3, T4};
use crate::{Error, Result};

/// Order-2 coordinate jets at `x`.
pub fn coordinate_jets(x: &[f64], order: usize) -> Result<Vec<Jet>> {
    let space = JetSpace::new(order, x.len())?;
    x.iter()
        .enumerate()
        .map(|(k, &v)| Jet::variable(&space, v, k))
        .collect()
}

fn square_jets(n: usize, f: impl Fn(usize, usize) -> Jet) -> Vec<Jet> {
    (0..n * n).map(|p| f(p / n, p % n)).collect()
}

/// `Γ^i_jk` as jets one order below `a`, flattened as `(i·n + j)·n + k`.
pub fn christoffel_jets(a: &[Vec<Jet>], a_inv: &[Vec<Jet>]) -> Result<Vec<Jet>> {
    let n = a.len();
    let low = a[0][0].order() - 1;
    let mut da: Vec<Vec<Vec<Jet>>> = Vec::with_capacity(n);
    for l in 0..n {
        let mut rows = Vec::with_capacity(n);
        for row in a {
            rows.push(
                row.iter()
                    .map(|c| c.derivative(l))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        da.push(rows);
    }
    let inv: Vec<Vec<Jet>> = a_inv
        .iter()
        .map(|r| r.iter().map(|c| c.truncate(low)).collect())
        .collect();
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = inv[0][0].constant_like(0.0);
                for l in 0..n {
                    let first_kind = &(&da[j][l][k] + &da[k][l][j]) - &da[l][j][k];
                    acc.add_product(&inv[i][l], &first_kind);
                }
                out.push(acc.scale(0.5));
            }
        }
    }
    Ok(out)
}

/// `t_{i|j} = ∂_j t_i − Γ^m_ij t_m`, one order below `t`.
pub fn covariant_oneform_jets(t: &[Jet], gamma: &[Jet]) -> Result<Vec<Jet>> {
    let n = t.len();
    let low = t[0].order() - 1;
    let tl: Vec<Jet> = t.iter().map(|c| c.truncate(low)).collect();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = t[i].derivative(j)?;
            for m in 0..n {
                let g = gamma[(m * n + i) * n + j].truncate(low);
                acc = acc - &g * &tl[m];
            }
            out.push(acc);
        }
    }
    Ok(out)
}

/// `t_{ij|k} = ∂_k t_ij − Γ^m_ik t_mj − Γ^m_jk t_im`, one order below `t`.
pub fn covariant_twotensor_jets(t: &[Jet], gamma: &[Jet], n: usize) -> Result<Vec<Jet>> {
    let low = t[0].order() - 1;
    let tl: Vec<Jet> = t.iter().map(|c| c.truncate(low)).collect();
    let g: Vec<Jet> = gamma.iter().map(|c| c.truncate(low)).collect();
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = t[i * n + j].derivative(k)?;
                for m in 0..n {
                    acc = acc - &g[(m * n + i) * n + k] * &tl[m * n + j];
                    acc = acc - &g[(m * n + j) * n + k] * &tl[i * n + m];
                }
                out.push(acc);
            }
        }
    }
    Ok(out)
}

/// The Levi-Civita data of a metric at one chart point.
#[derive(Clone, Debug)]
pub struct LocalMetric {
    pub point: Vec<f64>,
    pub a: T2,
    pub a_inv: T2,
    /// `∂_k a_ij` at `(i, j, k)`.
    pub da: T3,
    /// `Γ^i_jk` at `(i, j, k)`.
    pub gamma: T3,
    /// `∂_l Γ^i_jk` at `(i, j, k, l)`.
    pub dgamma: T4,
    /// `R^i_jkl` at `(i, j, k, l)`.
    pub riemann: T4,
    pub ricci: T2,
    space: Arc<JetSpace>,
    x_jets: Vec<Jet>,
    a_inv_jets: Vec<Jet>,
    gamma_jets: Vec<Jet>,
}

impl LocalMetric {
    pub fn at(metric: &MetricField, x: &[f64]) -> Result<Self> {
        let n = metric.dimension();
        let x_jets = coordinate_jets(x, 2)?;
        let space = x_jets[0].space().clone();
        let a_jets = metric.eval(&x_jets)?;
        let a_real: Vec<Vec<f64>> = a_jets
            .iter()
            .map(|r| r.iter().map(|c| *c.value()).collect())
            .collect();
        if !linalg::is_positive_definite(&a_real) {
            return Err(Error::NotPositiveDefinite { point: x.to_vec() });
        }
        let inv = linalg::inverse(&a_jets)?;
        let gamma_jets = christoffel_jets(&a_jets, &inv)?;
        let a_inv_jets = square_jets(n, |i, j| inv[i][j].truncate(1));

        let a = T2::from_rows(&a_real);
        let a_inv = T2::from_fn(n, |i, j| *inv[i][j].value());
        let da = T3::from_fn(n, |i, j, k| a_jets[i][j].first(k));
        let gamma = T3::from_fn(n, |i, j, k| *gamma_jets[(i * n + j) * n + k].value());
        let dgamma = T4::from_fn(n, |i, j, k, l| gamma_jets[(i * n + j) * n + k].first(l));
        let riemann = T4::from_fn(n, |i, j, k, l| {
            let mut r = dgamma[(i, j, l, k)] - dgamma[(i, j, k, l)];
            for m in 0..n {
                r += gamma[(i, k, m)] * gamma[(m, j, l)] - gamma[(i, l, m)] * gamma[(m, j, k)];
            }
            r
        });
        let ricci = T2::from_fn(n, |j, l| (0..n).map(|k| riemann[(k, j, k, l)]).sum());
        Ok(Self {
            point: x.to_vec(),
            a,
            a_inv,
            da,
            gamma,
            dgamma,
            riemann,
            ricci,
            space,
            x_jets,
            a_inv_jets,
            gamma_jets,
        })
    }

    pub fn dimension(&self) -> usize {
        self.a.dim()
    }

    /// Order-2 jets of the chart coordinates at this point.
    pub fn coordinates(&self) -> &[Jet] {
        &self.x_jets
    }

    pub fn jet_space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    /// `Γ^i_jk` as order-1 jets, flattened as `(i·n + j)·n + k`.
    pub fn christoffel_jets(&self) -> &[Jet] {
        &self.gamma_jets
    }

    /// `a^ij` as order-1 jets, flattened row-major.
    pub fn inverse_jets(&self) -> &[Jet] {
        &self.a_inv_jets
    }

    /// `Ḡ^i = ½ Γ^i_jk y^j y^k`.
    pub fn spray(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        (0..n)
            .map(|i| {
                let mut s = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        s += self.gamma[(i, j, k)] * y[j] * y[k];
                    }
                }
                0.5 * s
            })
            .collect()
    }

    /// `R_ijkl = a_im R^m_jkl`.
    pub fn lowered_riemann(&self) -> T4 {
        let n = self.dimension();
        T4::from_fn(n, |i, j, k, l| {
            (0..n)
                .map(|m| self.a[(i, m)] * self.riemann[(m, j, k, l)])
                .sum()
        })
    }

    /// Sectional curvature of the plane spanned by `u` and `v`.
    pub fn sectional_curvature(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.dimension();
        let r = self.lowered_riemann();
        let mut num = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        num += r[(i, j, k, l)] * u[i] * v[j] * u[k] * v[l];
                    }
                }
            }
        }
        let uu = self.a.contract2(u, u);
        let vv = self.a.contract2(v, v);
        let uv = self.a.contract2(u, v);
        num / (uu * vv - uv * uv)
    }

    /// `λ = a^jk Ric_jk / n`.
    pub fn einstein_scalar(&self) -> f64 {
        let n = self.dimension();
        let mut t = 0.0;
        for j in 0..n {
            for k in 0..n {
                t += self.a_inv[(j, k)] * self.ricci[(j, k)];
            }
        }
        t / n as f64
    }

    /// `max |Ric_jk − λ a_jk|`, normalized by the largest entry involved.
    pub fn einstein_residual(&self) -> f64 {
        let lambda = self.einstein_scalar();
        let n = self.dimension();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let term = lambda * self.a[(j, k)];
                worst = worst.max(normalized(
                    self.ricci[(j, k)] - term,
                    &[self.ricci[(j, k)], term],
                ));
            }
        }
        worst
    }

    /// `max |a_{ij|k}|`, zero for the Levi-Civita connection.
    pub fn metric_compatibility_defect(&self) -> f64 {
        let n = self.dimension();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut v = self.da[(i, j, k)];
                    for m in 0..n {
                        v -= self.gamma[(m, i, k)] * self.a[(m, j)]
                            + self.gamma[(m, j, k)] * self.a[(i, m)];
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }
}

/// `Γ^i_jk` at `x`.
pub fn christoffels(metric: &MetricField, x: &[f64]) -> Result<T3> {
    Ok(LocalMetric::at(metric, x)?.gamma)
}

/// `R^i_jkl` at `x`.
pub fn riemann_tensor(metric: &MetricField, x: &[f64]) -> Result<T4> {
    Ok(LocalMetric::at(metric, x)?.riemann)
}

/// `(Ric_jk, Ric_jk y^j y^k)` at `x`.
pub fn ricci_riemannian(metric: &MetricField, x: &[f64], y: &[f64]) -> Result<(T2, f64)> {
    let m = LocalMetric::at(metric, x)?;
    let scalar = m.ricci.contract2(y, y);
    Ok((m.ricci, scalar))
}

/// A 1-form and its first two covariant derivatives at one point.
#[derive(Clone, Debug)]
pub struct LocalOneForm {
    pub b: Vec<f64>,
    pub b_up: Vec<f64>,
    pub b2: f64,
    /// `b_{i|j}` at `(i, j)`.
    pub db: T2,
    /// `b_{i|j|k}` at `(i, j, k)`.
    pub ddb: T3,
    db_jets: Vec<Jet>,
}

impl LocalOneForm {
    pub fn at(metric: &LocalMetric, form: &OneFormField) -> Result<Self> {
        let n = metric.dimension();
        if form.dimension() != n {
            return Err(Error::InvalidField(
                "1-form and metric dimensions differ".into(),
            ));
        }
        let b_jets = form.eval(metric.coordinates())?;
        let db_jets = covariant_oneform_jets(&b_jets, metric.christoffel_jets())?;
        let ddb_jets = covariant_twotensor_jets(&db_jets, metric.christoffel_jets(), n)?;
        let b: Vec<f64> = b_jets.iter().map(|c| *c.value()).collect();
        let b_up = metric.a_inv.apply(&b);
        let b2 = dot(&b, &b_up);
        Ok(Self {
            db: T2::from_fn(n, |i, j| *db_jets[i * n + j].value()),
            ddb: T3::from_fn(n, |i, j, k| *ddb_jets[(i * n + j) * n + k].value()),
            b,
            b_up,
            b2,
            db_jets,
        })
    }

    /// `c(x) = r_ij a^ij / n` as an order-1 jet.
    pub fn conformal_trace_jet(&self, metric: &LocalMetric) -> Jet {
        let n = metric.dimension();
        let inv = metric.inverse_jets();
        let mut acc = inv[0].constant_like(0.0);
        for i in 0..n {
            for j in 0..n {
                let r = (&self.db_jets[i * n + j] + &self.db_jets[j * n + i]).scale(0.5);
                acc.add_product(&inv[i * n + j], &r);
            }
        }
        acc.scale(1.0 / n as f64)
    }
}

/// `(b_{i|j}, b_{i|j|k})` at `x`.
pub fn covariant_derivatives_oneform(
    metric: &MetricField,
    form: &OneFormField,
    x: &[f64],
) -> Result<(T2, T3)> {
    let m = LocalMetric::at(metric, x)?;
    let b = LocalOneForm::at(&m, form)?;
    Ok((b.db, b.ddb))
}

/// The `r`/`s` table of a 1-form at `(x, y)`.
///
/// Indices are raised with `a^ij`; `0` stands for contraction with `y`.
/// Covariant derivatives of composite tensors (`s_i`, `r_i`, `s^i_j`) are
/// expanded by the product rule using `a_{ij|k} = 0`.
#[derive(Clone, Debug)]
pub struct BetaInvariants {
    pub n: usize,
    pub alpha2: f64,
    pub beta: f64,
    pub b2: f64,
    pub b: Vec<f64>,
    pub b_up: Vec<f64>,
    pub r: T2,
    pub s: T2,
    pub r_00: f64,
    pub r_0: f64,
    pub s_0: f64,
    /// `s^i_0`.
    pub s_up_0: Vec<f64>,
    /// `r^k_k`.
    pub r_trace: f64,
    /// `r = r_ij b^i b^j`.
    pub r_bb: f64,
    pub r_k: Vec<f64>,
    pub s_k: Vec<f64>,
    /// `s^k`.
    pub s_up: Vec<f64>,
    pub s_0_0: f64,
    pub r_00_0: f64,
    /// `b^k s_{0|k}`.
    pub bk_s_0k: f64,
    /// `b^k r_{00|k}`.
    pub bk_r_00k: f64,
    /// `s^k_{0|k}`.
    pub sk_0k: f64,
    pub r_0_0: f64,
    /// `s^k_{|k}`.
    pub sk_k: f64,
    /// `b^k s^i_{k|i}`.
    pub bk_si_ki: f64,
    /// `s^i_j s^j_i`.
    pub ss_trace: f64,
    /// `s^k s_k`.
    pub sk_sk: f64,
    /// `s^k_0 s_k`.
    pub sk0_sk: f64,
    /// `s^k_0 r_0k`.
    pub sk0_r0k: f64,
    /// `r_0k s^k`.
    pub r0k_sk: f64,
    /// `s^k_0 r_k`.
    pub sk0_rk: f64,
    /// `c = r_ij a^ij / n` and its gradient.
    pub c: f64,
    pub c_k: Vec<f64>,
    pub c_0: f64,
    pub bk_ck: f64,
    /// `λ = Ric_jk a^jk / n` of α.
    pub lambda: f64,
    /// `Ric_jk y^j y^k` of α.
    pub ricci_alpha: f64,
    /// `max |r_ij − c a_ij|`, normalized.
    pub conformality_residual: f64,
    /// `max |Ric_jk − λ a_jk|`, normalized.
    pub alpha_einstein_residual: f64,
}

impl BetaInvariants {
    pub fn compute(metric: &LocalMetric, form: &LocalOneForm, y: &[f64]) -> Self {
        let n = metric.dimension();
        let ai = &metric.a_inv;
        let b = &form.b;
        let bu = &form.b_up;
        let r = T2::from_fn(n, |i, j| 0.5 * (form.db[(i, j)] + form.db[(j, i)]));
        let s = T2::from_fn(n, |i, j| 0.5 * (form.db[(i, j)] - form.db[(j, i)]));
        // s^i_j and r^i_j
        let s_mixed = T2::from_fn(n, |i, j| (0..n).map(|k| ai[(i, k)] * s[(k, j)]).sum());
        let r_mixed = T2::from_fn(n, |i, j| (0..n).map(|k| ai[(i, k)] * r[(k, j)]).sum());
        let r_k = r.apply_left(bu);
        let s_k = s.apply_left(bu);
        let s_up = ai.apply(&s_k);
        let s_up_0 = s_mixed.apply(y);
        let r_0k = r.apply_left(y);

        let r_sym3 = T3::from_fn(n, |i, j, k| {
            0.5 * (form.ddb[(i, j, k)] + form.ddb[(j, i, k)])
        });
        let s_anti3 = T3::from_fn(n, |i, j, k| {
            0.5 * (form.ddb[(i, j, k)] - form.ddb[(j, i, k)])
        });
        // b^j_{|k}
        let db_up = T2::from_fn(n, |j, k| (0..n).map(|m| ai[(j, m)] * form.db[(m, k)]).sum());
        let s_ik = T2::from_fn(n, |i, k| {
            (0..n)
                .map(|j| db_up[(j, k)] * s[(j, i)] + bu[j] * s_anti3[(j, i, k)])
                .sum()
        });
        let r_ik = T2::from_fn(n, |i, k| {
            (0..n)
                .map(|j| db_up[(j, k)] * r[(j, i)] + bu[j] * r_sym3[(j, i, k)])
                .sum()
        });

        let mut r_00_0 = 0.0;
        let mut bk_r_00k = 0.0;
        let mut sk_0k = 0.0;
        let mut bk_si_ki = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    r_00_0 += r_sym3[(i, j, k)] * y[i] * y[j] * y[k];
                    bk_r_00k += r_sym3[(i, j, k)] * y[i] * y[j] * bu[k];
                    // s^k_{0|k} = a^km s_{mj|k} y^j; here (k, m, j) = (i, j, k).
                    sk_0k += ai[(i, j)] * s_anti3[(j, k, i)] * y[k];
                    // b^k s^i_{k|i} = b^k a^im s_{mk|i}; here (k, i, m) = (i, j, k).
                    bk_si_ki += bu[i] * ai[(j, k)] * s_anti3[(k, i, j)];
                }
            }
        }
        let mut sk_k = 0.0;
        for k in 0..n {
            for i in 0..n {
                sk_k += ai[(k, i)] * s_ik[(i, k)];
            }
        }

        let c_jet = form.conformal_trace_jet(metric);
        let c = *c_jet.value();
        let c_k: Vec<f64> = (0..n).map(|k| c_jet.first(k)).collect();
        let lambda = metric.einstein_scalar();

        let mut conformality = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let term = c * metric.a[(i, j)];
                conformality = conformality.max(normalized(r[(i, j)] - term, &[r[(i, j)], term]));
            }
        }

        let mut ss_trace = 0.0;
        for i in 0..n {
            for j in 0..n {
                ss_trace += s_mixed[(i, j)] * s_mixed[(j, i)];
            }
        }

        Self {
            n,
            alpha2: metric.a.contract2(y, y),
            beta: dot(b, y),
            b2: form.b2,
            b: b.clone(),
            b_up: bu.clone(),
            r_00: r.contract2(y, y),
            r_0: dot(&r_k, y),
            s_0: dot(&s_k, y),
            r_trace: (0..n).map(|k| r_mixed[(k, k)]).sum(),
            r_bb: dot(&r_k, bu),
            s_0_0: s_ik.contract2(y, y),
            r_00_0,
            bk_s_0k: s_ik.contract2(y, bu),
            bk_r_00k,
            sk_0k,
            r_0_0: r_ik.contract2(y, y),
            sk_k,
            bk_si_ki,
            ss_trace,
            sk_sk: dot(&s_up, &s_k),
            sk0_sk: dot(&s_up_0, &s_k),
            sk0_r0k: dot(&s_up_0, &r_0k),
            r0k_sk: dot(&r_0k, &s_up),
            sk0_rk: dot(&s_up_0, &r_k),
            c,
            c_0: dot(&c_k, y),
            bk_ck: dot(&c_k, bu),
            c_k,
            lambda,
            ricci_alpha: metric.ricci.contract2(y, y),
            conformality_residual: conformality,
            alpha_einstein_residual: metric.einstein_residual(),
            r,
            s,
            s_up_0,
            r_k,
            s_k,
            s_up,
        }
    }
}

/// The invariant table at `(x, y)`.
pub fn beta_invariants(
    metric: &MetricField,
    form: &OneFormField,
    x: &[f64],
    y: &[f64],
) -> Result<BetaInvariants> {
    let m = LocalMetric::at(metric, x)?;
    let b = LocalOneForm::at(&m, form)?;
    Ok(BetaInvariants::compute(&m, &b, y))
}

/// Outcome of the three identities that hold under conformality and an
/// Einstein `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma31Report {
    /// `None` when the hypotheses hold on every sample; otherwise the reason.
    pub not_applicable: Option<&'static str>,
    /// Worst conformality residual `r_ij − c a_ij`.
    pub conformality: Worst,
    /// Worst Einstein residual `Ric − λ a` of `α`.
    pub alpha_einstein: Worst,
    /// `s^i_{0|i} − (n−1)c_0 − λβ`, `b^k s^i_{k|i} − (n−1)b^k c_k − λb²` and
    /// `(n−1)b^k c_k + λb² + s^k_{|k} + s^k_j s^j_k`.
    pub residuals: [Worst; 3],
}

impl Lemma31Report {
    pub fn max_residual(&self) -> Worst {
        let mut w = Worst::default();
        for r in &self.residuals {
            w.merge(r);
        }
        w
    }
}

/// The three residuals at one sample.
pub fn lemma31_at(inv: &BetaInvariants) -> [f64; 3] {
    let m = inv.n as f64 - 1.0;
    let t1 = [inv.sk_0k, m * inv.c_0, inv.lambda * inv.beta];
    let t2 = [inv.bk_si_ki, m * inv.bk_ck, inv.lambda * inv.b2];
    let t3 = [m * inv.bk_ck, inv.lambda * inv.b2, inv.sk_k, inv.ss_trace];
    [
        normalized(t1[0] - t1[1] - t1[2], &t1),
        normalized(t2[0] - t2[1] - t2[2], &t2),
        normalized(t3.iter().sum(), &t3),
    ]
}

/// Lemma residuals over `samples`; hypotheses are checked against `tol`.
pub fn lemma31_residuals(
    metric: &MetricField,
    form: &OneFormField,
    samples: &SampleSet,
    tol: f64,
) -> Result<Lemma31Report> {
    let mut report = Lemma31Report {
        not_applicable: None,
        conformality: Worst::default(),
        alpha_einstein: Worst::default(),
        residuals: [Worst::default(); 3],
    };
    for s in samples.iter() {
        let inv = beta_invariants(metric, form, &s.x, &s.y)?;
        report
            .conformality
            .record(inv.conformality_residual, s.index);
        report
            .alpha_einstein
            .record(inv.alpha_einstein_residual, s.index);
        for (w, v) in report.residuals.iter_mut().zip(lemma31_at(&inv)) {
            w.record(v, s.index);
        }
    }
    if !report.conformality.below(tol) {
        report.not_applicable = Some("r_ij is not conformal to a_ij");
    } else if !report.alpha_einstein.below(tol) {
        report.not_applicable = Some("alpha is not Einstein");
    }
    Ok(report)
}
