//! Dense matrices and Gaussian elimination over any [`Scalar`].

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<S> {
        (0..self.rows)
            .map(|i| self.row(i).iter().cloned().fold(S::zero(), |a, b| a + b))
            .collect()
    }

    /// `selfᵀ · v`.
    pub fn transpose_mul(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![S::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, a) in self.row(i).iter().enumerate() {
                if !a.is_zero() {
                    out[j] = out[j].clone() + a.clone() * vi.clone();
                }
            }
        }
        out
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves `a · x = b` by elimination with partial pivoting (largest
/// magnitude pivot). Over rationals every step is exact; the pivot choice
/// then only affects intermediate fraction sizes.
pub fn solve<S: Scalar>(mut a: Matrix<S>, mut b: Vec<S>) -> Result<Vec<S>> {
    let n = a.rows;
    assert_eq!(a.cols, n, "solve needs a square matrix");
    assert_eq!(b.len(), n);

    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[(r, col)].is_zero())
            .max_by(|&r1, &r2| {
                a[(r1, col)]
                    .abs()
                    .partial_cmp(&a[(r2, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .ok_or(Error::Singular("zero pivot column"))?;
        if pivot != col {
            for j in col..n {
                a.data.swap(pivot * n + j, col * n + j);
            }
            b.swap(pivot, col);
        }
        let p = a[(col, col)].clone();
        if !S::EXACT && p.to_f64().abs() < f64::EPSILON * 1e-3 {
            return Err(Error::Singular("vanishing float pivot"));
        }
        for r in col + 1..n {
            if a[(r, col)].is_zero() {
                continue;
            }
            let factor = a[(r, col)].clone() / p.clone();
            a[(r, col)] = S::zero();
            for j in col + 1..n {
                let delta = factor.clone() * a[(col, j)].clone();
                a[(r, j)] = a[(r, j)].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[r] = b[r].clone() - delta;
        }
    }

    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut acc = b[i].clone();
        for j in i + 1..n {
            acc = acc - a[(i, j)].clone() * x[j].clone();
        }
        x[i] = acc / a[(i, i)].clone();
    }
    Ok(x)
}
