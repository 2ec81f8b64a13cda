//! Small dense linear algebra over any [`Scalar`].
//!
//! Partial pivoting selects on the real part, which is what decides
//! conditioning for jets as well as for plain reals.

use alloc::vec::Vec;

use crate::scalar::Scalar;
use crate::{Error, Result};

pub type Matrix<T> = Vec<Vec<T>>;

fn eliminate<T: Scalar>(
    mut a: Matrix<T>,
    mut rhs: Matrix<T>,
) -> Result<(Matrix<T>, Matrix<T>, bool)> {
    let n = a.len();
    let mut flipped = false;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].real().abs().total_cmp(&a[q][col].real().abs()))
            .expect("non-empty column");
        if pivot != col {
            a.swap(pivot, col);
            rhs.swap(pivot, col);
            flipped = !flipped;
        }
        let inv = a[col][col].recip()?;
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() * inv.clone();
            for k in col..n {
                let v = a[col][k].clone() * factor.clone();
                a[row][k] = a[row][k].clone() - v;
            }
            for k in 0..rhs[row].len() {
                let v = rhs[col][k].clone() * factor.clone();
                rhs[row][k] = rhs[row][k].clone() - v;
            }
        }
    }
    Ok((a, rhs, flipped))
}

/// Solves `A X = B` for a square `A` and a block of right-hand sides.
pub fn solve_many<T: Scalar>(a: &[Vec<T>], rhs: &[Vec<T>]) -> Result<Matrix<T>> {
    let n = a.len();
    let (u, mut b, _) = eliminate(a.to_vec(), rhs.to_vec())?;
    let cols = b.first().map_or(0, Vec::len);
    for col in 0..cols {
        for row in (0..n).rev() {
            let mut acc = b[row][col].clone();
            for k in row + 1..n {
                acc = acc - u[row][k].clone() * b[k][col].clone();
            }
            b[row][col] = acc.div(&u[row][row])?;
        }
    }
    Ok(b)
}

pub fn solve<T: Scalar>(a: &[Vec<T>], rhs: &[T]) -> Result<Vec<T>> {
    let block: Matrix<T> = rhs.iter().map(|v| alloc::vec![v.clone()]).collect();
    Ok(solve_many(a, &block)?
        .into_iter()
        .map(|mut r| r.remove(0))
        .collect())
}

pub fn inverse<T: Scalar>(a: &[Vec<T>]) -> Result<Matrix<T>> {
    let n = a.len();
    let template = &a[0][0];
    let identity: Matrix<T> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| template.constant_like(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    solve_many(a, &identity)
}

pub fn determinant<T: Scalar>(a: &[Vec<T>]) -> Result<T> {
    let n = a.len();
    let (u, _, flipped) = eliminate(a.to_vec(), alloc::vec![Vec::new(); n])?;
    let mut det = u[0][0].clone();
    for (i, row) in u.iter().enumerate().skip(1) {
        det = det * row[i].clone();
    }
    Ok(if flipped { -det } else { det })
}

/// Whether a symmetric real matrix admits a Cholesky factorization.
pub fn is_positive_definite(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let mut l = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return false;
                }
                l[i][i] = libm::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

pub fn check_square<T>(a: &[Vec<T>]) -> Result<()> {
    if a.iter().any(|row| row.len() != a.len()) {
        return Err(Error::InvalidField("matrix is not square".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet, JetSpace};
    use alloc::vec;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = vec![
            vec![2.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 1.5],
        ];
        let inv = inverse(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn determinant_with_pivoting() {
        let a = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        assert!((determinant(&a).unwrap() + 6.0).abs() < 1e-15);
    }

    #[test]
    fn jet_determinant_derivative() {
        // det [[x, 1], [1, x]] = x² − 1, derivative 2x.
        let space = JetSpace::new(1, 1).unwrap();
        let x = Jet::variable(&space, 1.7, 0).unwrap();
        let one = Jet::constant(&space, 1.0);
        let det = determinant(&[vec![x.clone(), one.clone()], vec![one, x]]).unwrap();
        assert!((det.first(0) - 3.4).abs() < 1e-14);
    }

    #[test]
    fn cholesky_detects_indefinite() {
        assert!(is_positive_definite(&[vec![2.0, 0.1], vec![0.1, 1.0]]));
        assert!(!is_positive_definite(&[vec![1.0, 2.0], vec![2.0, 1.0]]));
    }

    #[test]
    fn singular_matrix_errors() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(solve(&a, &[1.0, 1.0]).is_err());
    }
}
