//! Dense component arrays indexed by chart indices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

macro_rules! dense {
    ($name:ident, $rank:literal, ($($i:ident),+)) => {
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            n: usize,
            data: Vec<f64>,
        }

        impl $name {
            pub fn zeros(n: usize) -> Self {
                Self { n, data: vec![0.0; n.pow($rank)] }
            }

            pub fn from_fn(n: usize, mut f: impl FnMut($(dense!(@usize $i)),+) -> f64) -> Self {
                let mut t = Self::zeros(n);
                dense!(@loop n, t, f, (), ($($i),+));
                t
            }

            pub fn dim(&self) -> usize {
                self.n
            }

            /// Largest absolute component.
            pub fn max_abs(&self) -> f64 {
                self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.data
            }

            #[inline]
            fn offset(&self, ($($i),+): ($(dense!(@usize $i)),+)) -> usize {
                let mut off = 0;
                $( off = off * self.n + $i; )+
                off
            }
        }

        impl Index<($(dense!(@usize $i)),+)> for $name {
            type Output = f64;
            fn index(&self, idx: ($(dense!(@usize $i)),+)) -> &f64 {
                &self.data[self.offset(idx)]
            }
        }

        impl IndexMut<($(dense!(@usize $i)),+)> for $name {
            fn index_mut(&mut self, idx: ($(dense!(@usize $i)),+)) -> &mut f64 {
                let off = self.offset(idx);
                &mut self.data[off]
            }
        }
    };
    (@usize $i:ident) => { usize };
    (@loop $n:ident, $t:ident, $f:ident, ($($done:ident),*), ($head:ident $(, $rest:ident)*)) => {
        for $head in 0..$n {
            dense!(@loop $n, $t, $f, ($($done,)* $head), ($($rest),*));
        }
    };
    (@loop $n:ident, $t:ident, $f:ident, ($($done:ident),*), ()) => {
        $t[($($done),*)] = $f($($done),*);
    };
}

dense!(T2, 2, (i, j));
dense!(T3, 3, (i, j, k));
dense!(T4, 4, (i, j, k, l));

impl T2 {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        Self::from_fn(rows.len(), |i, j| rows[i][j])
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)]).collect())
            .collect()
    }

    /// `v^i w^j t_ij`.
    pub fn contract2(&self, v: &[f64], w: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self[(i, j)] * v[i] * w[j];
            }
        }
        s
    }

    /// `t_ij w^j`.
    pub fn apply(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * w[j]).sum())
            .collect()
    }

    /// `v^i t_ij`.
    pub fn apply_left(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| v[i] * self[(i, j)]).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
