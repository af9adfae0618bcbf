//! Small dense row-major matrices.
//!
//! Everything here is sized for 3×3 rotations, 7×7 automorphisms and the
//! modest least-squares systems of the spline fitter; no blocking, no SIMD.

use std::ops::{Index, IndexMut, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row_major(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn frobenius_distance(&self, rhs: &Self) -> T {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Max-norm of `MᵀM − I`.
    pub fn orthogonality_residual(&self) -> T {
        let gram = self.transpose() * self;
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    /// Determinant by partial-pivot LU.
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[(x, c)].abs().partial_cmp(&a[(y, c)].abs()).unwrap())
                .unwrap();
            if a[(p, c)] == T::zero() {
                return T::zero();
            }
            if p != c {
                for j in 0..n {
                    a.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = a[(c, c)];
            det *= piv;
            for r in c + 1..n {
                let f = a[(r, c)] / piv;
                for j in c..n {
                    let v = a[(c, j)];
                    a[(r, j)] -= f * v;
                }
            }
        }
        det
    }

    /// Householder QR. Returns `(Q, R)` with `Q` square orthogonal
    /// (`rows × rows`) and `R` upper trapezoidal (`rows × cols`).
    pub fn qr(&self) -> (Self, Self) {
        let (m, n) = (self.rows, self.cols);
        let mut r = self.clone();
        let mut q = Self::identity(m);
        for k in 0..n.min(m.saturating_sub(1)) {
            let Some(v) = householder_vector(&r, k) else {
                continue;
            };
            apply_reflector_left(&mut r, &v, k);
            apply_reflector_right(&mut q, &v, k);
        }
        (q, r)
    }

    /// Least-squares solution of `self · X = rhs` for a tall full-rank
    /// system. Rank deficiency (relative to the largest pivot) is an error.
    pub fn least_squares(&self, rhs: &Self) -> Result<Self> {
        let (m, n) = (self.rows, self.cols);
        if rhs.rows != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: rhs.rows,
            });
        }
        if m < n {
            return Err(Error::Underdetermined {
                points: m,
                unknowns: n,
            });
        }
        let mut r = self.clone();
        let mut b = rhs.clone();
        for k in 0..n.min(m - 1) {
            let Some(v) = householder_vector(&r, k) else {
                continue;
            };
            apply_reflector_left(&mut r, &v, k);
            apply_reflector_left(&mut b, &v, k);
        }
        let max_pivot = (0..n).fold(T::zero(), |acc, i| acc.max(r[(i, i)].abs()));
        let tol = max_pivot * T::epsilon() * T::lit((m.max(n) * 16) as f64);
        if max_pivot == T::zero() || (0..n).any(|i| r[(i, i)].abs() <= tol) {
            return Err(Error::Degenerate("rank-deficient least-squares system".into()));
        }
        let mut x = Self::zeros(n, rhs.cols);
        for c in 0..rhs.cols {
            for i in (0..n).rev() {
                let mut s = b[(i, c)];
                for j in i + 1..n {
                    s -= r[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s / r[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Householder vector zeroing column `k` below the diagonal; `None` when the
/// column is already zero there.
fn householder_vector<T: Real>(a: &Matrix<T>, k: usize) -> Option<Vec<T>> {
    let m = a.rows;
    let mut v: Vec<T> = (k..m).map(|i| a[(i, k)]).collect();
    let norm = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    if norm == T::zero() {
        return None;
    }
    let alpha = if v[0] > T::zero() { -norm } else { norm };
    v[0] -= alpha;
    let vnorm = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    if vnorm == T::zero() {
        return None;
    }
    for x in &mut v {
        *x /= vnorm;
    }
    Some(v)
}

fn apply_reflector_left<T: Real>(a: &mut Matrix<T>, v: &[T], k: usize) {
    let two = T::lit(2.0);
    for j in 0..a.cols {
        let dot = v
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &vi)| acc + vi * a[(k + i, j)]);
        for (i, &vi) in v.iter().enumerate() {
            a[(k + i, j)] -= two * vi * dot;
        }
    }
}

fn apply_reflector_right<T: Real>(a: &mut Matrix<T>, v: &[T], k: usize) {
    let two = T::lit(2.0);
    for i in 0..a.rows {
        let dot = v
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (j, &vj)| acc + a[(i, k + j)] * vj);
        for (j, &vj) in v.iter().enumerate() {
            a[(i, k + j)] -= two * dot * vj;
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul<&Matrix<T>> for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_mul(rhs).expect("matrix shape mismatch")
    }
}

impl<T: Real> Mul<&Matrix<T>> for Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        &self * rhs
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn distance<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}
