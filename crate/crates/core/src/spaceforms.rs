//! Space forms `h = ‖dx‖²/H²` with `H = 1 + (μ/4)‖x‖²`, their Killing
//! fields, and the Einstein Kropina metric of the unit 3-sphere.

use alloc::format;
use alloc::vec::Vec;

use crate::expr::Expr;
use crate::field::{ChartRegion, MetricField, Params, Variance, VectorField};
use crate::kropina::KropinaMetric;
use crate::navigation::{from_navigation, NavigationData};
use crate::{Error, Result};

/// Parameter name carrying the curvature in generated expressions.
pub const MU: &str = "mu";
pub const DEFAULT_RADIUS: f64 = 1.5;
const ANTISYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceFormSpec {
    pub dimension: usize,
    pub mu: f64,
    pub region: ChartRegion,
}

impl SpaceFormSpec {
    /// The default chart: a ball of radius 1.5 about the origin.
    pub fn new(dimension: usize, mu: f64) -> Self {
        Self {
            dimension,
            mu,
            region: ChartRegion::ball(dimension, DEFAULT_RADIUS),
        }
    }

    pub fn with_region(mut self, region: ChartRegion) -> Self {
        self.region = region;
        self
    }

    fn params(&self) -> Params {
        let mut p = Params::new();
        p.insert(MU.into(), self.mu);
        p
    }
}

fn norm2_expr(n: usize) -> Expr {
    let squares: Vec<Expr> = (0..n).map(|k| Expr::var(k).powi(2)).collect();
    Expr::sum(squares.iter())
}

/// `H = 1 + (μ/4)‖x‖²`.
pub fn conformal_h_expr(n: usize) -> Expr {
    Expr::constant(1.0).add(&Expr::param(MU).scale(0.25).mul(&norm2_expr(n)))
}

/// `h_ij = δ_ij / H²`.
pub fn spaceform_metric(spec: &SpaceFormSpec) -> Result<MetricField> {
    spec.region.validate()?;
    let n = spec.dimension;
    if spec.mu < 0.0 {
        let r = spec.region.max_radius();
        let value = 1.0 + 0.25 * spec.mu * r * r;
        if !(value > 0.0) {
            let mut point = alloc::vec![0.0; n];
            point[0] = r;
            return Err(Error::SingularChart { value, point });
        }
    }
    let diag = Expr::constant(1.0).div(&conformal_h_expr(n).powi(2));
    let upper: Vec<Expr> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            if i == j {
                diag.clone()
            } else {
                Expr::constant(0.0)
            }
        })
        .collect();
    MetricField::new(n, upper, spec.region.clone(), spec.params())
}

/// `Q` antisymmetric, `c` a vector and the curvature `μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingSpec {
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    pub mu: f64,
}

impl KillingSpec {
    pub fn new(q: Vec<Vec<f64>>, c: Vec<f64>, mu: f64) -> Result<Self> {
        let n = c.len();
        if n == 0 || q.len() != n || q.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameters(format!(
                "Q must be {n}×{n} to match c"
            )));
        }
        let mut defect = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                defect = defect.max((q[i][j] + q[j][i]).abs());
            }
        }
        if defect > ANTISYMMETRY_TOL {
            return Err(Error::NotAntisymmetric(defect));
        }
        Ok(Self { q, c, mu })
    }

    /// From the `½n(n+1)` free constants: the strict upper triangle of `Q`
    /// row by row, then `c`.
    pub fn from_constants(n: usize, constants: &[f64], mu: f64) -> Result<Self> {
        let needed = n * (n + 1) / 2;
        if constants.len() != needed {
            return Err(Error::InvalidParameters(format!(
                "{needed} constants required, got {}",
                constants.len()
            )));
        }
        let mut q = alloc::vec![alloc::vec![0.0; n]; n];
        let mut it = constants.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap_or(&0.0);
                q[i][j] = v;
                q[j][i] = -v;
            }
        }
        let c = it.copied().collect();
        Self::new(q, c, mu)
    }

    pub fn dimension(&self) -> usize {
        self.c.len()
    }
}

/// The Killing field of `h` with lowered components
/// `W_i = H⁻² {Q_ij x^j + c_i − ¼μ‖x‖² c_i + ½ μ (c·x) x^i}`.
///
/// Stored raised: since `h^ij = H² δ^ij`, `W^i` is the braced expression.
pub fn killing_field(spec: &KillingSpec) -> Result<VectorField> {
    let n = spec.dimension();
    let mu = Expr::param(MU);
    let norm2 = norm2_expr(n);
    let c_dot_x: Vec<Expr> = (0..n).map(|k| Expr::var(k).scale(spec.c[k])).collect();
    let c_dot_x = Expr::sum(c_dot_x.iter());
    let components: Vec<Expr> = (0..n)
        .map(|i| {
            let rotation: Vec<Expr> = (0..n).map(|j| Expr::var(j).scale(spec.q[i][j])).collect();
            let terms = [
                Expr::sum(rotation.iter()),
                Expr::constant(spec.c[i]),
                mu.mul(&norm2).scale(-0.25 * spec.c[i]),
                mu.mul(&c_dot_x).mul(&Expr::var(i)).scale(0.5),
            ];
            Expr::sum(terms.iter())
        })
        .collect();
    let mut params = Params::new();
    params.insert(MU.into(), spec.mu);
    VectorField::new(components, Variance::Upper, params)
}

/// Navigation data `(h_μ, W)` for a Killing field on a space form.
pub fn spaceform_navigation(spec: &SpaceFormSpec, killing: &KillingSpec) -> Result<NavigationData> {
    if killing.dimension() != spec.dimension || killing.mu.to_bits() != spec.mu.to_bits() {
        return Err(Error::InvalidParameters(
            "Killing data and space form disagree on dimension or μ".into(),
        ));
    }
    NavigationData::new(spaceform_metric(spec)?, killing_field(killing)?)
}

/// The unit Killing field on the unit 3-sphere with `Q = [[0,a,b],[−a,0,c],[−b,−c,0]]`
/// and `c = ±(c, −b, a)`, where `a² + b² + c² = 1`.
pub fn example41(a: f64, b: f64, c: f64, sign: f64) -> Result<NavigationData> {
    let norm = a * a + b * b + c * c;
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameters(format!(
            "a² + b² + c² = {norm}, expected 1"
        )));
    }
    if a == 0.0 || b == 0.0 || c == 0.0 {
        return Err(Error::InvalidParameters(
            "a, b and c must all be nonzero".into(),
        ));
    }
    if sign.abs() != 1.0 {
        return Err(Error::InvalidParameters(format!(
            "sign must be ±1, got {sign}"
        )));
    }
    let q = alloc::vec![
        alloc::vec![0.0, a, b],
        alloc::vec![-a, 0.0, c],
        alloc::vec![-b, -c, 0.0],
    ];
    let killing = KillingSpec::new(q, alloc::vec![sign * c, -sign * b, sign * a], 1.0)?;
    spaceform_navigation(&SpaceFormSpec::new(3, 1.0), &killing)
}

/// `F = h²/(2W_0)`; fails unless `W` is a unit field.
pub fn einstein_kropina_from_spaceform(nav: &NavigationData) -> Result<KropinaMetric> {
    from_navigation(nav)
}
