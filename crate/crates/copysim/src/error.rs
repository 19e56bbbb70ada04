//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("dense cap exceeded in {context}: dimension {requested} > cap {cap}")]
    DenseCapExceeded {
        context: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("matrix is not Hermitian: |A - A^dag| = {residual:.3e} > {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("operator is not positive: min eigenvalue {min_eigenvalue:.3e} < -{tolerance:.3e}")]
    NotPositive {
        min_eigenvalue: f64,
        tolerance: f64,
    },

    #[error("trace is not 1: Tr = {trace:.17e}, |Tr - 1| > {tolerance:.3e}")]
    TraceNotOne { trace: f64, tolerance: f64 },

    #[error("ket is not normalized: |psi| = {norm:.17e}, tolerance {tolerance:.3e}")]
    NotNormalized { norm: f64, tolerance: f64 },

    #[error("matrix entries must be finite in {context}")]
    NonFinite { context: &'static str },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    EigNonConvergence { sweeps: usize, off_norm: f64 },

    #[error(
        "joint POVM infeasible: epsilon^2 + delta^2 = {radius_sq:.6} > 1 \
         (epsilon = {epsilon}, delta = {delta})"
    )]
    InfeasiblePair {
        epsilon: f64,
        delta: f64,
        radius_sq: f64,
    },

    #[error("index {index} out of range in {context} (limit {limit})")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        limit: usize,
    },

    #[error(
        "integration unstable: trace drift {drift:.3e} exceeds {bound:.3e}; reduce dt"
    )]
    StepInstability { drift: f64, bound: f64 },

    #[error(
        "state lost positivity at t = {time}: min eigenvalue {min_eigenvalue:.3e} \
         below -{bound:.3e}"
    )]
    PositivityLost {
        time: f64,
        min_eigenvalue: f64,
        bound: f64,
    },

    #[error(
        "pointer populations did not settle within t = {max_time} \
         (last change rate {rate:.3e})"
    )]
    NotSettled { max_time: f64, rate: f64 },

    #[error(
        "bath band too narrow: e_max = {e_max} does not cover the resonance at {resonance}"
    )]
    BandTooNarrow { e_max: f64, resonance: f64 },

    #[error("invalid parameter {name}: requires {constraint}, got {got}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        got: f64,
    },

    #[error("signal too coarse: omega * dt = {product:.3} exceeds 0.3 (aliasing guard)")]
    GridTooCoarse { product: f64 },
}
