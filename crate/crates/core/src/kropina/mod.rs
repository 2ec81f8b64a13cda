//! The Kropina metric `F = α²/β` on the domain `β > 0`.
//!
//! Closed forms built from the [`BetaInvariants`] table are paired with
//! definitional routes that push jets in `(x, y)` through `F²` directly.

use crate::expr::Expr;
use crate::field::{merge_params, MetricField, OneFormField, Params};
use crate::riemannian::{BetaInvariants, LocalMetric, LocalOneForm};
use crate::sampling::{self, SampleSet};
use crate::scalar::Scalar;
use crate::tensor::dot;
use crate::{Error, Result};

mod checks;
mod einstein;
mod scurv;
mod spray;

pub use checks::{berwald_residual, conformal_transform, flag_curvature_residual};
pub use einstein::{
    einstein_check, einstein_f, einstein_residuals, einstein_sigma, EinsteinReport, EinsteinSample,
    Verdict, MIN_SAMPLES,
};
pub use scurv::{riemannian_s_defect, s_curvature_closed, s_curvature_direct};
pub use spray::{
    fundamental_tensor, ricci_closed, ricci_closed_parts, ricci_direct, riemann_curvature_finsler,
    spray_closed, spray_first_principles,
};

/// Components of `b²` below this are treated as a vanishing 1-form.
pub const MIN_B2: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct KropinaMetric {
    alpha: MetricField,
    beta: OneFormField,
    margin: f64,
}

impl KropinaMetric {
    pub fn new(alpha: MetricField, beta: OneFormField) -> Result<Self> {
        if alpha.dimension() != beta.dimension() {
            return Err(Error::InvalidField(
                "α and β have different dimensions".into(),
            ));
        }
        Ok(Self {
            alpha,
            beta,
            margin: sampling::DEFAULT_MARGIN,
        })
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn alpha(&self) -> &MetricField {
        &self.alpha
    }

    pub fn beta(&self) -> &OneFormField {
        &self.beta
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn dimension(&self) -> usize {
        self.alpha.dimension()
    }

    /// `b² = ‖β‖²_α` as an expression of the coordinates.
    pub fn b2_expr(&self) -> Expr {
        let b = self.beta.components();
        self.alpha.inverse_quadratic_expr(b, b)
    }

    /// `β / (α ‖β‖_α)`, the cosine between `y` and `b^i`.
    pub fn domain_ratio(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let a = self.alpha.eval_checked(x)?;
        let b = self.beta.eval(x)?;
        let up = crate::linalg::solve(&a, &b)?;
        let b2 = dot(&b, &up);
        if !(b2 > MIN_B2) {
            return Err(Error::DegenerateOneForm {
                value: b2,
                point: x.to_vec(),
            });
        }
        let alpha2: f64 = crate::tensor::T2::from_rows(&a).contract2(y, y);
        Ok(dot(&b, y) / libm::sqrt(alpha2 * b2))
    }

    pub fn check_domain(&self, x: &[f64], y: &[f64]) -> Result<()> {
        let ratio = self.domain_ratio(x, y)?;
        if ratio > self.margin {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                ratio,
                margin: self.margin,
            })
        }
    }

    /// `F(x, y)`.
    pub fn f(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_domain(x, y)?;
        let a = self.alpha.eval(x)?;
        let alpha2 = crate::tensor::T2::from_rows(&a).contract2(y, y);
        let beta = dot(&self.beta.eval(x)?, y);
        Ok(alpha2 / beta)
    }

    /// `F²` in any scalar algebra, without domain checks.
    pub fn f_squared<T: Scalar>(&self, x: &[T], y: &[T]) -> Result<T> {
        let a = self.alpha.eval(x)?;
        let b = self.beta.eval(x)?;
        let zero = y[0].constant_like(0.0);
        let mut alpha2 = zero.clone();
        for (row, yi) in a.iter().zip(y) {
            let mut ay = zero.clone();
            for (aij, yj) in row.iter().zip(y) {
                ay.add_product(aij, yj);
            }
            alpha2.add_product(&ay, yi);
        }
        let mut beta = zero;
        for (bi, yi) in b.iter().zip(y) {
            beta.add_product(bi, yi);
        }
        let ratio = alpha2.div(&beta)?;
        Ok(ratio.clone() * ratio)
    }

    /// Levi-Civita data of `α` and covariant derivatives of `β` at `x`.
    pub fn local(&self, x: &[f64]) -> Result<(LocalMetric, LocalOneForm)> {
        let m = LocalMetric::at(&self.alpha, x)?;
        let b = LocalOneForm::at(&m, &self.beta)?;
        if !(b.b2 > MIN_B2) {
            return Err(Error::DegenerateOneForm {
                value: b.b2,
                point: x.to_vec(),
            });
        }
        Ok((m, b))
    }

    /// The invariant table at an admissible `(x, y)`.
    pub fn invariants(&self, x: &[f64], y: &[f64]) -> Result<BetaInvariants> {
        self.check_domain(x, y)?;
        let (m, b) = self.local(x)?;
        Ok(BetaInvariants::compute(&m, &b, y))
    }

    /// Admissible samples drawn from the chart region of `α`.
    pub fn samples(&self, count: usize, seed: u64) -> Result<SampleSet> {
        sampling::admissible_samples(self.alpha.region(), count, seed, self.margin, |x, y| {
            self.domain_ratio(x, y)
        })
    }

    /// `b² = b_i a^ij b_j` in any scalar algebra.
    pub fn b2_in<T: Scalar>(&self, x: &[T]) -> Result<T> {
        let a = self.alpha.eval(x)?;
        let b = self.beta.eval(x)?;
        let up = crate::linalg::solve(&a, &b)?;
        let mut b2 = x[0].constant_like(0.0);
        for (lo, hi) in b.iter().zip(&up) {
            b2.add_product(lo, hi);
        }
        Ok(b2)
    }

    /// Parameters of `α` and `β` together.
    pub fn params(&self) -> Result<Params> {
        merge_params(self.alpha.params(), self.beta.params())
    }
}

#[cfg(test)]
mod tests;
