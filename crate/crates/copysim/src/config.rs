//! Central numeric tolerances and dense-representation limits.
//!
//! Every validation threshold used across the crate lives here, so that a
//! single record documents what "equal", "positive" and "converged" mean.

/// Numeric tolerances shared by all modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise |A - A†| for a matrix flagged Hermitian.
    pub hermitian_residual: f64,
    /// Eigenvalues of operators flagged positive may dip this far below zero.
    pub positivity_floor: f64,
    /// Max |Tr rho - 1| for a density matrix.
    pub trace_one: f64,
    /// Max |norm - 1| for a ket flagged normalized.
    pub ket_norm: f64,
    /// Residual bound for eigendecompositions: |A v - lambda v| and
    /// orthonormality defects.
    pub eig_residual: f64,
    /// Max |Tr rho(t) - 1| tolerated over an accepted evolution run.
    pub trace_drift: f64,
    /// Evolution aborts if min eig rho(t) falls below -positivity_drift.
    pub positivity_drift: f64,
    /// Elementwise agreement required between the structured and dense
    /// Lindblad engines.
    pub structured_vs_dense: f64,
    /// Pointer-population change per unit time below which the collapse is
    /// considered settled.
    pub pointer_settle_rate: f64,
    /// Margin added to the sequential-measurement bound before declaring a
    /// violation.
    pub bound_margin: f64,
}

/// Hard caps on dense representations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    /// Max dimension of any dense vector space (kets, operator row count).
    /// 4096 = 12 qubits for kets; density-matrix evolution additionally
    /// requires dim^2 <= dense_dim, i.e. 6 qubits.
    pub dense_dim: usize,
    /// Max density-matrix dimension for which the vectorized Liouvillian is
    /// materialized and exponentiated as a cross-check.
    pub superop_dim: usize,
}

pub const TOL: Tolerances = Tolerances {
    hermitian_residual: 1e-12,
    positivity_floor: 1e-9,
    trace_one: 1e-9,
    ket_norm: 1e-12,
    eig_residual: 1e-9,
    trace_drift: 1e-6,
    positivity_drift: 1e-6,
    structured_vs_dense: 1e-8,
    pointer_settle_rate: 1e-10,
    bound_margin: 1e-9,
};

pub const LIMITS: Limits = Limits {
    dense_dim: 4096,
    superop_dim: 16,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOL
    }
}

impl Default for Limits {
    fn default() -> Self {
        LIMITS
    }
}
