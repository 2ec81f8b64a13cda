//! Truncated multivariate Taylor series ("jets").
//!
//! A [`Jet`] over a [`JetSpace`] of order `p` and `d` seeded directions stores
//! one coefficient per multi-index of total degree `≤ p`. Coefficients are
//! Taylor coefficients, i.e. the partial derivative divided by the
//! multi-index factorial, so multiplication is a truncated polynomial
//! convolution and [`Jet::partial`] multiplies the factorial back.
//!
//! Coefficients are generic over [`Scalar`], which `Jet<T>` itself
//! implements. A `Jet<Jet<f64>>` differentiates twice: the outer level
//! supplies derivatives whose inner coefficients are themselves exact jets.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;
use crate::{Error, Result};

pub const MAX_ORDER: usize = 3;

/// Layout and multiplication tables for jets of one `(order, dirs)` shape.
#[derive(Debug)]
pub struct JetSpace {
    order: usize,
    dirs: usize,
    monomials: Vec<Vec<u8>>,
    factorials: Vec<f64>,
    index: BTreeMap<Vec<u8>, usize>,
    // products[i] lists (j, k) with monomial_i * monomial_j = monomial_k.
    products: Vec<Vec<(usize, usize)>>,
    lower: Option<Arc<JetSpace>>,
    // shifts[dir] lists (index in lower, index here, multiplier) for ∂/∂dir.
    shifts: Vec<Vec<(usize, usize, f64)>>,
}

fn monomials_of_degree(dirs: usize, degree: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() + 1 == dirs {
        prefix.push(degree as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=degree).rev() {
        prefix.push(first as u8);
        monomials_of_degree(dirs, degree - first, prefix, out);
        prefix.pop();
    }
}

fn factorial(k: u8) -> f64 {
    (1..=k as u32).map(f64::from).product()
}

impl JetSpace {
    pub fn new(order: usize, dirs: usize) -> Result<Arc<Self>> {
        if order > MAX_ORDER {
            return Err(Error::OrderOutOfRange(order));
        }
        if dirs > u8::MAX as usize {
            return Err(Error::DirectionOutOfRange {
                index: dirs,
                dirs: u8::MAX as usize,
            });
        }
        let lower = if order > 0 {
            Some(Self::new(order - 1, dirs)?)
        } else {
            None
        };

        let mut monomials = vec![vec![0u8; dirs]];
        if dirs > 0 {
            for degree in 1..=order {
                monomials_of_degree(dirs, degree, &mut Vec::new(), &mut monomials);
            }
        }
        let index: BTreeMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let factorials = monomials
            .iter()
            .map(|m| m.iter().map(|&k| factorial(k)).product())
            .collect();
        let degree = |m: &[u8]| m.iter().map(|&k| k as usize).sum::<usize>();

        let products = monomials
            .iter()
            .map(|mi| {
                monomials
                    .iter()
                    .enumerate()
                    .filter(|(_, mj)| degree(mi) + degree(mj) <= order)
                    .map(|(j, mj)| {
                        let sum: Vec<u8> = mi.iter().zip(mj).map(|(a, b)| a + b).collect();
                        (j, index[&sum])
                    })
                    .collect()
            })
            .collect();

        let shifts = match &lower {
            Some(low) => (0..dirs)
                .map(|dir| {
                    low.monomials
                        .iter()
                        .enumerate()
                        .map(|(p, m)| {
                            let mut up = m.clone();
                            up[dir] += 1;
                            (p, index[&up], f64::from(up[dir]))
                        })
                        .collect()
                })
                .collect(),
            None => Vec::new(),
        };

        Ok(Arc::new(Self {
            order,
            dirs,
            monomials,
            factorials,
            index,
            products,
            lower,
            shifts,
        }))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dirs(&self) -> usize {
        self.dirs
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<u8>] {
        &self.monomials
    }

    fn same_shape(&self, other: &JetSpace) -> bool {
        self.order == other.order && self.dirs == other.dirs
    }

    fn space_of_order(self: &Arc<Self>, order: usize) -> Arc<JetSpace> {
        let mut space = self.clone();
        while space.order > order {
            space = space.lower.clone().expect("lower space");
        }
        space
    }
}

/// A truncated Taylor series with coefficients in `T`.
#[derive(Clone, Debug)]
pub struct Jet<T = f64> {
    space: Arc<JetSpace>,
    coeffs: Vec<T>,
}

/// Seeds coordinate `dir_index` at `value` in a fresh space.
pub fn lift_variable(value: f64, dir_index: usize, order: usize, dirs: usize) -> Result<Jet> {
    if order == 0 {
        return Err(Error::OrderOutOfRange(order));
    }
    let space = JetSpace::new(order, dirs)?;
    Jet::variable(&space, value, dir_index)
}

impl<T: Scalar> Jet<T> {
    pub fn constant(space: &Arc<JetSpace>, value: T) -> Self {
        let zero = value.constant_like(0.0);
        let mut coeffs = vec![zero; space.len()];
        coeffs[0] = value;
        Self {
            space: space.clone(),
            coeffs,
        }
    }

    /// The seeded variable `value + t_dir`.
    pub fn variable(space: &Arc<JetSpace>, value: T, dir: usize) -> Result<Self> {
        if space.order == 0 {
            return Err(Error::OrderOutOfRange(0));
        }
        if dir >= space.dirs {
            return Err(Error::DirectionOutOfRange {
                index: dir,
                dirs: space.dirs,
            });
        }
        let one = value.constant_like(1.0);
        let mut jet = Self::constant(space, value);
        // Degree-one monomials follow the constant in direction order.
        jet.coeffs[1 + dir] = one;
        Ok(jet)
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn dirs(&self) -> usize {
        self.space.dirs
    }

    pub fn value(&self) -> &T {
        &self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// The partial derivative for `multi_index` (one exponent per direction).
    pub fn partial(&self, multi_index: &[u8]) -> Result<T> {
        if multi_index.len() != self.space.dirs {
            return Err(Error::DirectionOutOfRange {
                index: multi_index.len(),
                dirs: self.space.dirs,
            });
        }
        let degree: usize = multi_index.iter().map(|&k| k as usize).sum();
        if degree > self.space.order {
            return Err(Error::DegreeTooHigh {
                degree,
                order: self.space.order,
            });
        }
        let i = self.space.index[multi_index];
        Ok(self.coeffs[i].scale(self.space.factorials[i]))
    }

    /// `∂/∂t_dir` at the expansion point.
    pub fn first(&self, dir: usize) -> T {
        debug_assert!(self.space.order >= 1 && dir < self.space.dirs);
        self.coeffs[1 + dir].clone()
    }

    /// `∂²/∂t_i∂t_j` at the expansion point.
    pub fn second(&self, i: usize, j: usize) -> T {
        debug_assert!(self.space.order >= 2);
        let mut mi = vec![0u8; self.space.dirs];
        mi[i] += 1;
        mi[j] += 1;
        let k = self.space.index[&mi];
        self.coeffs[k].scale(self.space.factorials[k])
    }

    /// The jet of `∂/∂t_dir`, one order lower.
    pub fn derivative(&self, dir: usize) -> Result<Self> {
        let lower = self.space.lower.clone().ok_or(Error::OrderOutOfRange(0))?;
        if dir >= self.space.dirs {
            return Err(Error::DirectionOutOfRange {
                index: dir,
                dirs: self.space.dirs,
            });
        }
        let zero = self.coeffs[0].constant_like(0.0);
        let mut coeffs = vec![zero; lower.len()];
        for &(p, q, m) in &self.space.shifts[dir] {
            coeffs[p] = self.coeffs[q].scale(m);
        }
        Ok(Self {
            space: lower,
            coeffs,
        })
    }

    /// Drops all terms above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.space.order {
            return self.clone();
        }
        let space = self.space.space_of_order(order);
        let coeffs = self.coeffs[..space.len()].to_vec();
        Self { space, coeffs }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.space.same_shape(&other.space) {
            Ok(())
        } else {
            Err(Error::IncompatibleJets(
                self.space.order,
                self.space.dirs,
                other.space.order,
                other.space.dirs,
            ))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.product(other))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.product(&other.recip()?))
    }

    /// Multiplies every coefficient by `factor`.
    pub fn mul_scalar(&self, factor: &T) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    fn accumulate_product(acc: &mut [T], a: &Self, b: &Self) {
        for (i, row) in a.space.products.iter().enumerate() {
            let ai = &a.coeffs[i];
            if ai.is_zero() {
                continue;
            }
            for &(j, k) in row {
                acc[k].add_product(ai, &b.coeffs[j]);
            }
        }
    }

    fn product(&self, other: &Self) -> Self {
        let zero = self.coeffs[0].constant_like(0.0);
        let mut coeffs = vec![zero; self.space.len()];
        Self::accumulate_product(&mut coeffs, self, other);
        Self {
            space: self.space.clone(),
            coeffs,
        }
    }

    /// `g(self)` from the derivatives `g^(k)(u₀)`, `k = 0..=order`.
    fn compose(&self, derivs: &[T]) -> Self {
        let mut result = Self::constant(&self.space, derivs[0].clone());
        if self.space.order == 0 {
            return result;
        }
        let mut du = self.clone();
        du.coeffs[0] = du.coeffs[0].constant_like(0.0);
        let mut power = du.clone();
        let mut inv_fact = 1.0;
        for (k, d) in derivs.iter().enumerate().skip(1) {
            inv_fact /= k as f64;
            let term = power.mul_scalar(&d.scale(inv_fact));
            for (r, t) in result.coeffs.iter_mut().zip(term.coeffs) {
                *r = r.clone() + t;
            }
            if k < self.space.order {
                power = power.product(&du);
            }
        }
        result
    }

    fn derivs(&self, f: impl Fn(usize) -> T) -> Vec<T> {
        (0..=self.space.order).map(f).collect()
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("jet addition")
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("jet subtraction")
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("jet multiplication")
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            space: self.space,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<T: Scalar> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: Self) -> Jet<T> {
        self.try_add(rhs).expect("jet addition")
    }
}

impl<T: Scalar> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: Self) -> Jet<T> {
        self.try_sub(rhs).expect("jet subtraction")
    }
}

impl<T: Scalar> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Self) -> Jet<T> {
        self.try_mul(rhs).expect("jet multiplication")
    }
}

impl<T: Scalar> Scalar for Jet<T> {
    fn real(&self) -> f64 {
        self.coeffs[0].real()
    }

    fn constant_like(&self, value: f64) -> Self {
        Self::constant(&self.space, self.coeffs[0].constant_like(value))
    }

    fn scale(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    fn compatible(&self, other: &Self) -> bool {
        self.space.same_shape(&other.space) && self.coeffs[0].compatible(&other.coeffs[0])
    }

    fn add_product(&mut self, a: &Self, b: &Self) {
        assert!(
            self.space.same_shape(&a.space) && a.space.same_shape(&b.space),
            "incompatible jets in product"
        );
        Self::accumulate_product(&mut self.coeffs, a, b);
    }

    fn recip(&self) -> Result<Self> {
        let u = &self.coeffs[0];
        let r = u.recip()?;
        let r2 = r.clone() * r.clone();
        let r3 = r2.clone() * r.clone();
        let r4 = r3.clone() * r.clone();
        let table = [r, -r2, r3.scale(2.0), -r4.scale(6.0)];
        Ok(self.compose(&table[..=self.space.order]))
    }

    fn exp(&self) -> Self {
        let e = self.coeffs[0].exp();
        self.compose(&self.derivs(|_| e.clone()))
    }

    fn ln(&self) -> Result<Self> {
        let u = &self.coeffs[0];
        let l = u.ln()?;
        let r = u.recip()?;
        let r2 = r.clone() * r.clone();
        let r3 = r2.clone() * r.clone();
        let table = [l, r, -r2, r3.scale(2.0)];
        Ok(self.compose(&table[..=self.space.order]))
    }

    fn sin(&self) -> Self {
        let s = self.coeffs[0].sin();
        let c = self.coeffs[0].cos();
        let table = [s.clone(), c.clone(), -s, -c];
        self.compose(&table[..=self.space.order])
    }

    fn cos(&self) -> Self {
        let s = self.coeffs[0].sin();
        let c = self.coeffs[0].cos();
        let table = [c.clone(), -s.clone(), -c, s];
        self.compose(&table[..=self.space.order])
    }

    fn tan(&self) -> Result<Self> {
        let t = self.coeffs[0].tan()?;
        let t2 = t.clone() * t.clone();
        let sec2 = t2.clone() + t.constant_like(1.0);
        let d2 = (t.clone() * sec2.clone()).scale(2.0);
        let d3 = sec2.clone() * (t2.scale(6.0) + t.constant_like(2.0));
        let table = [t, sec2, d2, d3];
        Ok(self.compose(&table[..=self.space.order]))
    }

    fn atan(&self) -> Self {
        let u = &self.coeffs[0];
        let u2 = u.clone() * u.clone();
        let q = (u2.clone() + u.constant_like(1.0))
            .recip()
            .expect("1 + u² is positive");
        let q2 = q.clone() * q.clone();
        let q3 = q2.clone() * q.clone();
        let d2 = -(u.clone() * q2).scale(2.0);
        let d3 = (u2.scale(6.0) - u.constant_like(2.0)) * q3;
        let table = [u.atan(), q, d2, d3];
        self.compose(&table[..=self.space.order])
    }

    fn sqrt(&self) -> Result<Self> {
        let s = self.coeffs[0].sqrt()?;
        if self.space.order == 0 {
            return Ok(Self::constant(&self.space, s));
        }
        let inv = s.recip()?;
        let inv2 = inv.clone() * inv.clone();
        let inv3 = inv2.clone() * inv.clone();
        let inv5 = inv3.clone() * inv2;
        let table = [s, inv.scale(0.5), inv3.scale(-0.25), inv5.scale(0.375)];
        Ok(self.compose(&table[..=self.space.order]))
    }

    fn powf(&self, exponent: f64) -> Result<Self> {
        if libm::trunc(exponent) == exponent && exponent.abs() <= 64.0 {
            return self.powi(exponent as i32);
        }
        let u = &self.coeffs[0];
        if self.space.order == 0 {
            return Ok(Self::constant(&self.space, u.powf(exponent)?));
        }
        if u.real() <= 0.0 {
            return Err(Error::Domain {
                func: "pow",
                value: u.real(),
            });
        }
        let p = u.powf(exponent)?;
        let inv = u.recip()?;
        let mut table = Vec::with_capacity(self.space.order + 1);
        let mut current = p;
        let mut falling = 1.0;
        for k in 0..=self.space.order {
            table.push(current.scale(falling));
            falling *= exponent - k as f64;
            current = current * inv.clone();
        }
        Ok(self.compose(&table))
    }
}
