//! Dense complex linear algebra and quantum primitives: operators, states,
//! tensor products, Pauli algebra, Hermitian eigendecomposition.

mod eig;
mod matrix;
pub mod random;

pub use eig::{eig_hermitian_matrix, expm, min_eigenvalue, sqrt_psd};
pub use matrix::{ComplexMatrix, C_I, C_ONE, C_ZERO};

use num_complex::Complex64;

use crate::config::{LIMITS, TOL};
use crate::error::{Error, Result};

/// One of the three Pauli axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// A square operator with validated Hermitian / positive flags.
///
/// The flags are trusted downstream, so they can only be set through the
/// checking constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: ComplexMatrix,
    hermitian: bool,
    positive: bool,
}

impl Operator {
    /// Wrap a matrix with no structural claims.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.check_finite("Operator::new")?;
        Ok(Self {
            matrix,
            hermitian: false,
            positive: false,
        })
    }

    /// Wrap a matrix, checking `|A - A^dag| <= 1e-12` entrywise.
    pub fn hermitian(matrix: ComplexMatrix) -> Result<Self> {
        matrix.check_finite("Operator::hermitian")?;
        let residual = matrix.hermitian_residual();
        if residual > TOL.hermitian_residual {
            return Err(Error::NotHermitian {
                residual,
                tolerance: TOL.hermitian_residual,
            });
        }
        Ok(Self {
            matrix,
            hermitian: true,
            positive: false,
        })
    }

    /// Wrap a matrix, checking hermiticity and `min eig >= -1e-9`.
    pub fn positive(matrix: ComplexMatrix) -> Result<Self> {
        let op = Self::hermitian(matrix)?;
        let min = min_eigenvalue(&op.matrix)?;
        if min < -TOL.positivity_floor {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
                tolerance: TOL.positivity_floor,
            });
        }
        Ok(Self {
            positive: true,
            ..op
        })
    }

    /// Internal constructor for flag propagation where the invariant is
    /// guaranteed structurally (tensor products, embeddings).
    pub(crate) fn with_flags(matrix: ComplexMatrix, hermitian: bool, positive: bool) -> Self {
        Self {
            matrix,
            hermitian,
            positive,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// Eigenvalues ascending plus orthonormal eigenvector columns.
    pub fn eig_hermitian(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        if !self.hermitian {
            return Err(Error::NotHermitian {
                residual: self.matrix.hermitian_residual(),
                tolerance: TOL.hermitian_residual,
            });
        }
        eig_hermitian_matrix(&self.matrix)
    }

    /// Smallest eigenvalue (requires the hermitian flag).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig_hermitian()?.0.first().copied().unwrap_or(0.0))
    }

    /// Hermitian square root of a positive operator.
    pub fn sqrt(&self) -> Result<Operator> {
        if !self.positive {
            let min = if self.hermitian {
                min_eigenvalue(&self.matrix)?
            } else {
                f64::NEG_INFINITY
            };
            return Err(Error::NotPositive {
                min_eigenvalue: min,
                tolerance: TOL.positivity_floor,
            });
        }
        let root = sqrt_psd(&self.matrix, TOL.positivity_floor)?;
        Ok(Operator::with_flags(root, true, true))
    }
}

/// Trace-one positive operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Full validation: Hermitian, positive, unit trace.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let op = Operator::positive(matrix)?;
        Self::from_positive(op)
    }

    /// Validate the trace of an operator already carrying both flags.
    pub fn from_positive(op: Operator) -> Result<Self> {
        if !op.positive {
            return Err(Error::NotPositive {
                min_eigenvalue: f64::NEG_INFINITY,
                tolerance: TOL.positivity_floor,
            });
        }
        let trace = op.matrix.trace();
        if (trace.re - 1.0).abs() > TOL.trace_one || trace.im.abs() > TOL.trace_one {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                tolerance: TOL.trace_one,
            });
        }
        Ok(Self { op })
    }

    /// Internal path for evolution snapshots: checks trace, trusts the flags
    /// (positivity is monitored separately by the integrators).
    pub(crate) fn trusted(matrix: ComplexMatrix) -> Result<Self> {
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TOL.trace_drift || trace.im.abs() > TOL.trace_drift {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                tolerance: TOL.trace_drift,
            });
        }
        Ok(Self {
            op: Operator::with_flags(matrix, true, true),
        })
    }

    pub fn pure(ket: &Ket) -> Result<Self> {
        let matrix = ComplexMatrix::outer(&ket.amplitudes, &ket.amplitudes)?;
        let norm_sq = ket.norm_sqr();
        Self::new(matrix.scale(Complex64::new(1.0 / norm_sq, 0.0)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let matrix = ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        Self {
            op: Operator::with_flags(matrix, true, true),
        }
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn purity(&self) -> f64 {
        self.matrix().matmul(self.matrix()).trace().re
    }

    /// Population of basis state `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.matrix().get(i, i).re
    }
}

/// A state vector, optionally validated as normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
    normalized: bool,
}

impl Ket {
    /// A ket that must be normalized to 1e-12.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL.ket_norm {
            return Err(Error::NotNormalized {
                norm,
                tolerance: TOL.ket_norm,
            });
        }
        Ok(Self {
            amplitudes,
            normalized: true,
        })
    }

    /// An unnormalized coordinate vector.
    pub fn raw(amplitudes: Vec<Complex64>) -> Self {
        Self {
            amplitudes,
            normalized: false,
        }
    }

    /// Computational basis state |index> in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                context: "Ket::basis",
                index,
                limit: dim,
            });
        }
        let mut amplitudes = vec![C_ZERO; dim];
        amplitudes[index] = C_ONE;
        Ok(Self {
            amplitudes,
            normalized: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Rank-1 projector |psi><psi| (normalizing if necessary).
    pub fn projector(&self) -> Result<Operator> {
        let m = ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)?;
        let m = m.scale(Complex64::new(1.0 / self.norm_sqr(), 0.0));
        Ok(Operator::with_flags(m, true, true))
    }
}

/// The 2x2 Pauli matrix for the given axis, in the basis {|+>, |->}.
pub fn pauli(axis: PauliAxis) -> Operator {
    let m = match axis {
        PauliAxis::X => {
            ComplexMatrix::from_rows(&[vec![C_ZERO, C_ONE], vec![C_ONE, C_ZERO]]).unwrap()
        }
        PauliAxis::Y => ComplexMatrix::from_rows(&[
            vec![C_ZERO, Complex64::new(0.0, -1.0)],
            vec![C_I, C_ZERO],
        ])
        .unwrap(),
        PauliAxis::Z => ComplexMatrix::from_rows(&[
            vec![C_ONE, C_ZERO],
            vec![C_ZERO, Complex64::new(-1.0, 0.0)],
        ])
        .unwrap(),
    };
    Operator::with_flags(m, true, false)
}

/// Identity operator (hermitian, positive).
pub fn identity_op(dim: usize) -> Operator {
    Operator::with_flags(ComplexMatrix::identity(dim), true, true)
}

/// Kronecker product of a sequence of operators, first factor slowest
/// varying. Flags propagate by conjunction.
pub fn tensor(ops: &[Operator]) -> Result<Operator> {
    let mut iter = ops.iter();
    let first = iter.next().ok_or(Error::DimensionMismatch {
        context: "tensor of empty sequence",
        expected: 1,
        got: 0,
    })?;
    let mut matrix = first.matrix().clone();
    let mut hermitian = first.hermitian;
    let mut positive = first.positive;
    for op in iter {
        matrix = matrix.kron(op.matrix())?;
        hermitian &= op.hermitian;
        positive &= op.positive;
    }
    Ok(Operator::with_flags(matrix, hermitian, positive))
}

/// Tr(M rho).
pub fn expectation(m: &Operator, rho: &DensityMatrix) -> Result<Complex64> {
    if m.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            context: "expectation",
            expected: rho.dim(),
            got: m.dim(),
        });
    }
    let a = m.matrix();
    let b = rho.matrix();
    let n = a.dim();
    let mut sum = C_ZERO;
    for i in 0..n {
        for k in 0..n {
            sum += a.get(i, k) * b.get(k, i);
        }
    }
    Ok(sum)
}

/// Embed a local operator at copy slot `copy_index` (1-based) of an
/// `n_copies`-fold product of `local.dim()`-dimensional systems; identity on
/// every other slot. Copy 1 is the leftmost (slowest-varying) tensor factor.
pub fn embed(local: &Operator, copy_index: usize, n_copies: usize) -> Result<Operator> {
    if copy_index == 0 || copy_index > n_copies {
        return Err(Error::IndexOutOfRange {
            context: "embed",
            index: copy_index,
            limit: n_copies,
        });
    }
    let d = local.dim();
    let total = checked_power(d, n_copies, "embed")?;
    let left = d.pow((copy_index - 1) as u32);
    let right = total / (left * d);

    let mut out = ComplexMatrix::zeros(total);
    let a = local.matrix();
    for l in 0..left {
        for i in 0..d {
            for j in 0..d {
                let v = a.get(i, j);
                if v == C_ZERO {
                    continue;
                }
                for r in 0..right {
                    let row = (l * d + i) * right + r;
                    let col = (l * d + j) * right + r;
                    out.set(row, col, v);
                }
            }
        }
    }
    Ok(Operator::with_flags(out, local.hermitian, local.positive))
}

/// d^n with the dense-dimension cap applied.
pub fn checked_power(d: usize, n: usize, context: &'static str) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total
            .checked_mul(d)
            .filter(|&t| t <= LIMITS.dense_dim)
            .ok_or(Error::DenseCapExceeded {
                context,
                requested: total.saturating_mul(d),
                cap: LIMITS.dense_dim,
            })?;
    }
    Ok(total)
}
