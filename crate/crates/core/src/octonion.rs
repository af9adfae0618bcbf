//! Octonions over a fixed Fano-plane multiplication table, and the
//! seven-dimensional cross product they carry.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Oriented triples `(a, b, c)` with `e_a e_b = e_c`; cyclic shifts hold as
/// well and reversing any pair flips the sign.
pub const FANO_TRIPLES: [(usize, usize, usize); 7] = [
    (1, 2, 3),
    (1, 4, 5),
    (1, 7, 6),
    (2, 4, 6),
    (2, 5, 7),
    (3, 4, 7),
    (3, 6, 5),
];

/// `e_i e_j = sign · e_k` for every pair of basis elements, `e_0` the unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplicationTable {
    entries: [[(usize, i8); 8]; 8],
}

impl MultiplicationTable {
    pub fn from_triples(triples: &[(usize, usize, usize); 7]) -> Self {
        let mut entries = [[(0usize, 0i8); 8]; 8];
        for (i, row) in entries.iter_mut().enumerate() {
            row[0] = (i, 1);
        }
        for (j, cell) in entries[0].iter_mut().enumerate() {
            *cell = (j, 1);
        }
        for (i, row) in entries.iter_mut().enumerate().skip(1) {
            row[i] = (0, -1);
        }
        for &(a, b, c) in triples {
            for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                entries[x][y] = (z, 1);
                entries[y][x] = (z, -1);
            }
        }
        Self { entries }
    }

    pub fn standard() -> Self {
        Self::from_triples(&FANO_TRIPLES)
    }

    /// `(k, sign)` with `e_i e_j = sign · e_k`.
    pub fn product(&self, i: usize, j: usize) -> (usize, i8) {
        self.entries[i][j]
    }

    /// CSV with header `i,j,k,sign`, one row per ordered basis pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,k,sign\n");
        for i in 0..8 {
            for j in 0..8 {
                let (k, s) = self.entries[i][j];
                let _ = writeln!(out, "{i},{j},{k},{s}");
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut entries = [[(usize::MAX, 0i8); 8]; 8];
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next().map(str::trim) != Some("i,j,k,sign") {
            return Err(Error::Parse("expected header `i,j,k,sign`".into()));
        }
        for line in lines {
            let fields: Vec<&str> = line.trim().split(',').collect();
            let parse = |s: &str| s.trim().parse::<i64>().map_err(|e| Error::Parse(format!("`{line}`: {e}")));
            let [i, j, k, s] = fields[..] else {
                return Err(Error::Parse(format!("`{line}`: expected four fields")));
            };
            let (i, j, k, s) = (parse(i)?, parse(j)?, parse(k)?, parse(s)?);
            if ![i, j, k].iter().all(|v| (0..8).contains(v)) || s.abs() != 1 {
                return Err(Error::Parse(format!("`{line}`: entry out of range")));
            }
            entries[i as usize][j as usize] = (k as usize, s as i8);
        }
        if entries.iter().flatten().any(|e| e.0 == usize::MAX) {
            return Err(Error::Parse("table is missing entries".into()));
        }
        Ok(Self { entries })
    }
}

/// `e0` is the real part, `e1..e7` the imaginary units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Octonion<T>(pub [T; 8]);

impl<T: Real> Octonion<T> {
    pub fn zero() -> Self {
        Self([T::zero(); 8])
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [T::zero(); 8];
        c[i] = T::one();
        Self(c)
    }

    pub fn from_imaginary(v: &[T]) -> Result<Self> {
        if v.len() != 7 {
            return Err(Error::DimensionMismatch { expected: 7, found: v.len() });
        }
        let mut c = [T::zero(); 8];
        c[1..].copy_from_slice(v);
        Ok(Self(c))
    }

    pub fn real(&self) -> T {
        self.0[0]
    }

    pub fn imaginary(&self) -> [T; 7] {
        let mut v = [T::zero(); 7];
        v.copy_from_slice(&self.0[1..]);
        v
    }

    pub fn pure(&self) -> Self {
        let mut c = self.0;
        c[0] = T::zero();
        Self(c)
    }

    pub fn conj(&self) -> Self {
        let mut c = self.0.map(|x| -x);
        c[0] = self.0[0];
        Self(c)
    }

    pub fn norm(&self) -> T {
        self.0.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self(self.0.map(|x| x * s))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn mul_with(&self, other: &Self, table: &MultiplicationTable) -> Self {
        let mut out = [T::zero(); 8];
        for (i, &a) in self.0.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                let (k, s) = table.product(i, j);
                let p = a * b;
                if s > 0 {
                    out[k] += p;
                } else {
                    out[k] -= p;
                }
            }
        }
        Self(out)
    }
}

impl<T: Real> Add for Octonion<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.0;
        c.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        Self(c)
    }
}

impl<T: Real> Sub for Octonion<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.0;
        c.iter_mut().zip(rhs.0).for_each(|(a, b)| *a -= b);
        Self(c)
    }
}

impl<T: Real> Neg for Octonion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

impl<T: Real> Mul for Octonion<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        oct_mul(&self, &rhs)
    }
}

static TABLE: std::sync::LazyLock<MultiplicationTable> = std::sync::LazyLock::new(MultiplicationTable::standard);

pub fn table() -> &'static MultiplicationTable {
    &TABLE
}

pub fn oct_mul<T: Real>(x: &Octonion<T>, y: &Octonion<T>) -> Octonion<T> {
    x.mul_with(y, table())
}

/// `(xy − yx) / 2` of the imaginary parts.
pub fn cross<T: Real>(x: &Octonion<T>, y: &Octonion<T>) -> Octonion<T> {
    let (x, y) = (x.pure(), y.pure());
    (oct_mul(&x, &y) - oct_mul(&y, &x)).scale(T::lit(0.5))
}

/// `(xy)z − x(yz)`.
pub fn associator<T: Real>(x: &Octonion<T>, y: &Octonion<T>, z: &Octonion<T>) -> Octonion<T> {
    oct_mul(&oct_mul(x, y), z) - oct_mul(x, &oct_mul(y, z))
}
