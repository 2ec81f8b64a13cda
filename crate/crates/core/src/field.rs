//! Chart-local tensor fields with expression components.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::{parse, Expr};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::{Error, Result};

pub type Params = BTreeMap<String, f64>;

/// The coordinate region samples are drawn from.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartRegion {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl ChartRegion {
    pub fn cube(n: usize, half_width: f64) -> Self {
        Self::Box {
            lower: alloc::vec![-half_width; n],
            upper: alloc::vec![half_width; n],
        }
    }

    pub fn ball(n: usize, radius: f64) -> Self {
        Self::Ball {
            center: alloc::vec![0.0; n],
            radius,
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::Box { lower, .. } => lower.len(),
            Self::Ball { center, .. } => center.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Box { lower, upper } => {
                if lower.len() != upper.len() || lower.is_empty() {
                    return Err(Error::InvalidField(
                        "box bounds have mismatched lengths".into(),
                    ));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                    return Err(Error::InvalidField("box is empty".into()));
                }
            }
            Self::Ball { center, radius } => {
                if center.is_empty() || !(*radius > 0.0) {
                    return Err(Error::InvalidField("ball radius must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| l <= v && v <= u),
            Self::Ball { center, radius } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                r2 <= radius * radius
            }
        }
    }

    /// Largest Euclidean distance from the origin of the coordinate chart.
    pub fn max_radius(&self) -> f64 {
        match self {
            Self::Box { lower, upper } => libm::sqrt(
                lower
                    .iter()
                    .zip(upper)
                    .map(|(l, u)| {
                        let m = l.abs().max(u.abs());
                        m * m
                    })
                    .sum(),
            ),
            Self::Ball { center, radius } => {
                libm::sqrt(center.iter().map(|c| c * c).sum::<f64>()) + radius
            }
        }
    }
}

fn check_components(components: &[Expr], dimension: usize, params: &Params) -> Result<()> {
    let mut names = BTreeSet::new();
    for c in components {
        if c.coordinate_span() > dimension {
            return Err(Error::InvalidField(format!(
                "component `{c}` references a coordinate beyond x{dimension}"
            )));
        }
        c.parameters(&mut names);
    }
    if let Some(missing) = names.into_iter().find(|n| !params.contains_key(n)) {
        return Err(Error::UnboundParameter(missing));
    }
    Ok(())
}

fn parse_all(texts: &[&str], dimension: usize, params: &Params) -> Result<Vec<Expr>> {
    let names: Vec<&str> = params.keys().map(String::as_str).collect();
    texts.iter().map(|t| parse(t, dimension, &names)).collect()
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// A Riemannian metric `a_ij(x)` stored as its upper triangle, row-major.
#[derive(Clone, Debug)]
pub struct MetricField {
    dimension: usize,
    upper: Vec<Expr>,
    region: ChartRegion,
    params: Params,
}

impl MetricField {
    pub fn new(
        dimension: usize,
        upper: Vec<Expr>,
        region: ChartRegion,
        params: Params,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidField("dimension must be positive".into()));
        }
        if upper.len() != dimension * (dimension + 1) / 2 {
            return Err(Error::InvalidField(format!(
                "a {dimension}-dimensional metric needs {} upper-triangle components, got {}",
                dimension * (dimension + 1) / 2,
                upper.len()
            )));
        }
        region.validate()?;
        if region.dimension() != dimension {
            return Err(Error::InvalidField(
                "chart region dimension mismatch".into(),
            ));
        }
        check_components(&upper, dimension, &params)?;
        Ok(Self {
            dimension,
            upper,
            region,
            params,
        })
    }

    pub fn parse(
        dimension: usize,
        upper: &[&str],
        region: ChartRegion,
        params: Params,
    ) -> Result<Self> {
        let exprs = parse_all(upper, dimension, &params)?;
        Self::new(dimension, exprs, region, params)
    }

    /// The standard Euclidean metric.
    pub fn euclidean(dimension: usize, region: ChartRegion) -> Result<Self> {
        let upper = (0..dimension)
            .flat_map(|i| {
                (i..dimension).map(move |j| Expr::constant(if i == j { 1.0 } else { 0.0 }))
            })
            .collect();
        Self::new(dimension, upper, region, Params::new())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn region(&self) -> &ChartRegion {
        &self.region
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn upper(&self) -> &[Expr] {
        &self.upper
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.upper[upper_index(self.dimension, i, j)]
    }

    /// `factor · a_ij`, in the same chart.
    pub fn scaled(&self, factor: &Expr) -> Self {
        Self {
            dimension: self.dimension,
            upper: self.upper.iter().map(|c| factor.mul(c)).collect(),
            region: self.region.clone(),
            params: self.params.clone(),
        }
    }

    /// Components at `x`, in the algebra of `x`.
    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<Matrix<T>> {
        check_binding(x, self.dimension)?;
        let values = Expr::evaluate_all(&self.upper, x, &self.params)?;
        let n = self.dimension;
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| values[upper_index(n, i, j)].clone())
                    .collect()
            })
            .collect())
    }

    /// Real components at `x`, checked for positive definiteness.
    pub fn eval_checked(&self, x: &[f64]) -> Result<Matrix<f64>> {
        let a = self.eval(x)?;
        if !linalg::is_positive_definite(&a) {
            return Err(Error::NotPositiveDefinite { point: x.to_vec() });
        }
        Ok(a)
    }
}

fn check_binding<T>(x: &[T], dimension: usize) -> Result<()> {
    if x.len() != dimension {
        return Err(Error::BindingCount {
            expected: dimension,
            found: x.len(),
        });
    }
    Ok(())
}

/// A 1-form `b_i(x) dx^i`.
#[derive(Clone, Debug)]
pub struct OneFormField {
    components: Vec<Expr>,
    params: Params,
}

impl OneFormField {
    pub fn new(components: Vec<Expr>, params: Params) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidField(
                "a 1-form needs at least one component".into(),
            ));
        }
        check_components(&components, components.len(), &params)?;
        Ok(Self { components, params })
    }

    pub fn parse(components: &[&str], params: Params) -> Result<Self> {
        let exprs = parse_all(components, components.len(), &params)?;
        Self::new(exprs, params)
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn scaled(&self, factor: &Expr) -> Self {
        Self {
            components: self.components.iter().map(|c| factor.mul(c)).collect(),
            params: self.params.clone(),
        }
    }

    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>> {
        check_binding(x, self.dimension())?;
        Expr::evaluate_all(&self.components, x, &self.params)
    }
}

/// Whether vector components carry an upper or a lower index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Upper,
    Lower,
}

/// A vector field `W^i` (or its lowered form `W_i`, as tagged).
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<Expr>,
    variance: Variance,
    params: Params,
}

impl VectorField {
    pub fn new(components: Vec<Expr>, variance: Variance, params: Params) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidField(
                "a vector field needs at least one component".into(),
            ));
        }
        check_components(&components, components.len(), &params)?;
        Ok(Self {
            components,
            variance,
            params,
        })
    }

    pub fn parse(components: &[&str], variance: Variance, params: Params) -> Result<Self> {
        let exprs = parse_all(components, components.len(), &params)?;
        Self::new(exprs, variance, params)
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn scaled(&self, factor: &Expr) -> Self {
        Self {
            components: self.components.iter().map(|c| factor.mul(c)).collect(),
            variance: self.variance,
            params: self.params.clone(),
        }
    }

    /// Stored components at `x`.
    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>> {
        check_binding(x, self.dimension())?;
        Expr::evaluate_all(&self.components, x, &self.params)
    }

    /// `(W^i, W_i)` at `x` given the metric components there.
    pub fn both<T: Scalar>(&self, x: &[T], metric: &[Vec<T>]) -> Result<(Vec<T>, Vec<T>)> {
        let w = self.eval(x)?;
        Ok(match self.variance {
            Variance::Upper => {
                let low = lower(metric, &w);
                (w, low)
            }
            Variance::Lower => {
                let up = linalg::solve(metric, &w)?;
                (up, w)
            }
        })
    }
}

/// `a_ij v^j`.
pub fn lower<T: Scalar>(a: &[Vec<T>], v: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| {
            let mut acc = v[0].constant_like(0.0);
            for (aij, vj) in row.iter().zip(v) {
                acc.add_product(aij, vj);
            }
            acc
        })
        .collect()
}

/// `det(m)` by cofactor expansion; meant for chart dimensions up to 4 or so.
pub fn determinant_expr(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut terms = Vec::with_capacity(n);
    for (j, head) in m[0].iter().enumerate() {
        if head.as_constant() == Some(0.0) {
            continue;
        }
        let t = head.mul(&determinant_expr(&minor(m, 0, j)));
        terms.push(if j % 2 == 0 { t } else { t.neg() });
    }
    Expr::sum(terms.iter())
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|&(i, _)| i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|&(j, _)| j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

/// `adj(m)`, so that `m⁻¹ = adj(m) / det(m)`.
pub fn adjugate_expr(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let n = m.len();
    if n == 1 {
        return alloc::vec![alloc::vec![Expr::constant(1.0)]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = determinant_expr(&minor(m, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        c.neg()
                    }
                })
                .collect()
        })
        .collect()
}

impl MetricField {
    fn component_rows(&self) -> Vec<Vec<Expr>> {
        let n = self.dimension;
        (0..n)
            .map(|i| (0..n).map(|j| self.component(i, j).clone()).collect())
            .collect()
    }

    /// `v_i a^ij w_j` as an expression, through the adjugate.
    pub fn inverse_quadratic_expr(&self, v: &[Expr], w: &[Expr]) -> Expr {
        let rows = self.component_rows();
        let adj = adjugate_expr(&rows);
        let det = determinant_expr(&rows);
        let mut terms = Vec::new();
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                terms.push(vi.mul(&adj[i][j]).mul(wj));
            }
        }
        Expr::sum(terms.iter()).div(&det)
    }

    /// `a_ij v^j` as expressions.
    pub fn lower_expr(&self, v: &[Expr]) -> Vec<Expr> {
        let n = self.dimension;
        (0..n)
            .map(|i| {
                let terms: Vec<Expr> = (0..n).map(|j| self.component(i, j).mul(&v[j])).collect();
                Expr::sum(terms.iter())
            })
            .collect()
    }
}

/// Merges parameter tables, rejecting conflicting values.
pub fn merge_params(a: &Params, b: &Params) -> Result<Params> {
    let mut out = a.clone();
    for (k, v) in b {
        match out.get(k) {
            Some(old) if old.to_bits() != v.to_bits() => {
                return Err(Error::InvalidParameters(format!(
                    "parameter `{k}` bound to both {old} and {v}"
                )));
            }
            _ => {
                out.insert(k.clone(), *v);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn upper_triangle_layout() {
        let m = MetricField::parse(
            3,
            &["1", "2", "3", "4", "5", "6"],
            ChartRegion::cube(3, 1.0),
            Params::new(),
        )
        .unwrap();
        let a = m.eval(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            a,
            vec![
                vec![1.0, 2.0, 3.0],
                vec![2.0, 4.0, 5.0],
                vec![3.0, 5.0, 6.0]
            ]
        );
    }

    #[test]
    fn indefinite_metric_rejected() {
        let m = MetricField::parse(
            2,
            &["1", "2", "1"],
            ChartRegion::cube(2, 1.0),
            Params::new(),
        )
        .unwrap();
        assert!(matches!(
            m.eval_checked(&[0.0, 0.0]),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn wrong_component_count() {
        assert!(
            MetricField::parse(2, &["1", "0"], ChartRegion::cube(2, 1.0), Params::new()).is_err()
        );
        assert!(matches!(
            OneFormField::parse(&["x3", "0"], Params::new()),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn unbound_parameter_rejected() {
        let e = vec![Expr::param("mu"), Expr::constant(0.0)];
        assert!(matches!(
            OneFormField::new(e, Params::new()),
            Err(Error::UnboundParameter(_))
        ));
    }

    #[test]
    fn raising_and_lowering() {
        let a = vec![vec![4.0, 0.0], vec![0.0, 1.0]];
        let w = VectorField::parse(&["1", "2"], Variance::Lower, Params::new()).unwrap();
        let (up, low) = w.both(&[0.0, 0.0], &a).unwrap();
        assert_eq!(low, vec![1.0, 2.0]);
        assert_eq!(up, vec![0.25, 2.0]);
    }

    #[test]
    fn symbolic_inverse_quadratic() {
        let m = MetricField::parse(
            3,
            &["2 + x1^2", "0.3", "0.1*x2", "1.5", "0.2", "1 + x3^2"],
            ChartRegion::cube(3, 1.0),
            Params::new(),
        )
        .unwrap();
        let b = OneFormField::parse(&["1", "x1", "x2 - 2"], Params::new()).unwrap();
        let q = m.inverse_quadratic_expr(b.components(), b.components());
        let x = [0.4, -0.3, 0.7];
        let a = m.eval(&x).unwrap();
        let bv = b.eval(&x).unwrap();
        let up = linalg::solve(&a, &bv).unwrap();
        let want: f64 = up.iter().zip(&bv).map(|(u, v)| u * v).sum();
        assert!((q.eval_real(&x, &Params::new()).unwrap() - want).abs() < 1e-13);
        assert_eq!(
            determinant_expr(&[vec![Expr::constant(3.0)]]).as_constant(),
            Some(3.0)
        );
    }

    #[test]
    fn regions() {
        assert!(ChartRegion::ball(3, 1.5).contains(&[1.0, 1.0, 0.0]));
        assert!(!ChartRegion::ball(3, 1.5).contains(&[1.0, 1.0, 1.0]));
        assert!(ChartRegion::Box {
            lower: vec![0.0],
            upper: vec![0.0]
        }
        .validate()
        .is_err());
    }
}
