//! Dense complex square matrices, row-major.

use num_complex::Complex64;

use crate::config::LIMITS;
use crate::error::{Error, Result};

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense `dim x dim` complex matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C_ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C_ONE);
        }
        m
    }

    /// Build from nested rows; every row must have length `rows.len()`.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "ComplexMatrix::from_rows",
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m.check_finite("ComplexMatrix::from_rows")?;
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Rank-1 outer product `ket * bra^dag` of two coordinate vectors.
    pub fn outer(ket: &[Complex64], bra: &[Complex64]) -> Result<Self> {
        if ket.len() != bra.len() {
            return Err(Error::DimensionMismatch {
                context: "ComplexMatrix::outer",
                expected: ket.len(),
                got: bra.len(),
            });
        }
        let dim = ket.len();
        let mut m = Self::zeros(dim);
        for (i, &k) in ket.iter().enumerate() {
            for (j, &b) in bra.iter().enumerate() {
                m.set(i, j, k * b.conj());
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn check_finite(&self, context: &'static str) -> Result<()> {
        if self
            .data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            Ok(())
        } else {
            Err(Error::NonFinite { context })
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// `self += c * rhs`, the integrator hot path.
    pub fn axpy(&mut self, c: Complex64, rhs: &Self) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * b;
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C_ZERO {
                    continue;
                }
                let rrow = &rhs.data[k * n..(k + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] += a * rrow[j];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(self.dim, v.len());
        let n = self.dim;
        let mut out = vec![C_ZERO; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            *slot = row.iter().zip(v).map(|(&a, &x)| a * x).sum();
        }
        out
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn anticommutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).add(&rhs.matmul(self))
    }

    /// Kronecker product; `self` is the slow-varying (left) factor.
    pub fn kron(&self, rhs: &Self) -> Result<Self> {
        let dim = self
            .dim
            .checked_mul(rhs.dim)
            .filter(|&d| d <= LIMITS.dense_dim)
            .ok_or(Error::DenseCapExceeded {
                context: "kron",
                requested: self.dim.saturating_mul(rhs.dim),
                cap: LIMITS.dense_dim,
            })?;
        let (n, m) = (self.dim, rhs.dim);
        let mut out = Self::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.get(i, j);
                if a == C_ZERO {
                    continue;
                }
                for p in 0..m {
                    for q in 0..m {
                        out.set(i * m + p, j * m + q, a * rhs.get(p, q));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Max entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max entrywise |self - rhs|.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max entrywise |A - A^dag|.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let r = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }
}
