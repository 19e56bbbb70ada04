//! Time evolution engines: dense Lindblad master-equation integration, a
//! structured propagator exploiting the rank-1 collapse operators, the
//! vectorized-Liouvillian exponential cross-check, quantum-jump Monte Carlo,
//! and the discretized-bath Hamiltonian model.

mod bath;
mod superop;
mod trajectories;

pub use bath::{bath_evolve, BathEvolution, BathModel};
pub use superop::{evolve_superop, liouvillian};
pub use trajectories::{jump_trajectories, TrajectoryResult};

use num_complex::Complex64;

use crate::config::{LIMITS, TOL};
use crate::copyspace::{copy_hamiltonian, CollapseModel, CopySpace, RankOneJump};
use crate::error::{Error, Result};
use crate::qmath::{
    min_eigenvalue, ComplexMatrix, DensityMatrix, Operator, C_ONE,
};

/// Default number of stored snapshots per evolution run (first and last
/// always included).
const DEFAULT_SNAPSHOTS: usize = 257;

/// A jump operator, dense or structural.
#[derive(Debug, Clone)]
pub enum JumpOperator {
    Dense(ComplexMatrix),
    /// amplitude |target><source| between computational basis states.
    RankOne(RankOneJump),
    /// Diagonal operator (e.g. an embedded pointer projector).
    Diagonal(Vec<Complex64>),
}

impl JumpOperator {
    pub fn dim_hint(&self) -> Option<usize> {
        match self {
            JumpOperator::Dense(m) => Some(m.dim()),
            JumpOperator::RankOne(_) => None,
            JumpOperator::Diagonal(d) => Some(d.len()),
        }
    }

    pub fn to_dense(&self, dim: usize) -> ComplexMatrix {
        match self {
            JumpOperator::Dense(m) => m.clone(),
            JumpOperator::RankOne(j) => j.dense(dim),
            JumpOperator::Diagonal(d) => ComplexMatrix::diagonal(d),
        }
    }
}

/// A Hamiltonian plus a collection of jump operators.
#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: Option<Operator>,
    jumps: Vec<JumpOperator>,
    hbar: f64,
    dim: usize,
}

impl LindbladModel {
    pub fn new(
        dim: usize,
        hamiltonian: Option<Operator>,
        jumps: Vec<JumpOperator>,
        hbar: f64,
    ) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hbar",
                constraint: "hbar > 0",
                got: hbar,
            });
        }
        if let Some(h) = &hamiltonian {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "LindbladModel hamiltonian",
                    expected: dim,
                    got: h.dim(),
                });
            }
        }
        for j in &jumps {
            if let Some(d) = j.dim_hint() {
                if d != dim {
                    return Err(Error::DimensionMismatch {
                        context: "LindbladModel jump",
                        expected: dim,
                        got: d,
                    });
                }
            }
        }
        Ok(Self {
            hamiltonian,
            jumps,
            hbar,
            dim,
        })
    }

    /// Assemble the full model of an inter-copy collapse: total copy
    /// Hamiltonian (if a local one is given) plus the rank-1 jump family,
    /// materialized dense when a nontrivial pointer basis is set.
    pub fn from_collapse(model: &CollapseModel, local_h: Option<&Operator>) -> Result<Self> {
        let space = model.space();
        let hamiltonian = match local_h {
            Some(h) => Some(copy_hamiltonian(h, space)?),
            None => None,
        };
        let jumps = if model.pointer_basis().is_none() {
            model
                .collapse_lindblads()
                .into_iter()
                .map(JumpOperator::RankOne)
                .collect()
        } else {
            model
                .dense_jump_operators()?
                .into_iter()
                .map(JumpOperator::Dense)
                .collect()
        };
        Self::new(space.total_dim(), hamiltonian, jumps, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> Option<&Operator> {
        self.hamiltonian.as_ref()
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn with_extra_jumps(mut self, extra: Vec<JumpOperator>) -> Result<Self> {
        for j in &extra {
            if let Some(d) = j.dim_hint() {
                if d != self.dim {
                    return Err(Error::DimensionMismatch {
                        context: "LindbladModel extra jump",
                        expected: self.dim,
                        got: d,
                    });
                }
            }
        }
        self.jumps.extend(extra);
        Ok(self)
    }

    /// Step size satisfying (|H|/hbar + total jump rate) * dt <= 0.05, using
    /// the Frobenius norm as the (conservative) Hamiltonian scale.
    pub fn suggested_dt(&self) -> f64 {
        let h_scale = self
            .hamiltonian
            .as_ref()
            .map(|h| h.matrix().frobenius_norm())
            .unwrap_or(0.0)
            / self.hbar;
        let mut rate = 0.0;
        for j in &self.jumps {
            rate += match j {
                JumpOperator::Dense(m) => m.frobenius_norm().powi(2),
                JumpOperator::RankOne(r) => r.amplitude * r.amplitude,
                JumpOperator::Diagonal(d) => d.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max),
            };
        }
        0.05 / (h_scale + rate).max(1e-12)
    }
}

/// Uniformly sampled states along an evolution.
#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// max |Tr rho(t) - 1| observed over every accepted step.
    pub trace_drift: f64,
}

impl EvolutionResult {
    pub fn final_density(&self) -> &DensityMatrix {
        self.states.last().expect("at least the initial state")
    }

    /// Time series of the population of basis state `index`.
    pub fn population_series(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(index)).collect()
    }

    /// Time series of |<i| rho |j>|.
    pub fn coherence_series(&self, i: usize, j: usize) -> Vec<f64> {
        self.states
            .iter()
            .map(|s| s.matrix().get(i, j).norm())
            .collect()
    }

    /// Pointer-product populations per snapshot.
    pub fn pointer_population_series(&self, space: &CopySpace) -> Vec<Vec<f64>> {
        let pointers: Vec<usize> = (0..space.local_dim())
            .map(|m| space.pointer_product_index(m))
            .collect();
        self.states
            .iter()
            .map(|s| pointers.iter().map(|&p| s.population(p)).collect())
            .collect()
    }
}

/// Fourth-order fixed-step integration of the master equation with dense
/// jump operators.
pub fn evolve_dense(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<EvolutionResult> {
    evolve_dense_with_snapshots(model, rho0, t_final, dt, DEFAULT_SNAPSHOTS)
}

pub fn evolve_dense_with_snapshots(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    max_snapshots: usize,
) -> Result<EvolutionResult> {
    let dim = model.dim();
    if dim * dim > LIMITS.dense_dim {
        return Err(Error::DenseCapExceeded {
            context: "evolve_dense (dim^2 exceeds the dense cap)",
            requested: dim * dim,
            cap: LIMITS.dense_dim,
        });
    }
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            context: "evolve_dense initial state",
            expected: dim,
            got: rho0.dim(),
        });
    }
    let jumps: Vec<ComplexMatrix> = model.jumps().iter().map(|j| j.to_dense(dim)).collect();
    let mut loss = ComplexMatrix::zeros(dim);
    for l in &jumps {
        loss = loss.add(&l.conj_transpose().matmul(l));
    }
    let h = model.hamiltonian().map(|h| h.matrix().clone());
    let inv_hbar = 1.0 / model.hbar();

    let rhs = move |rho: &ComplexMatrix| -> ComplexMatrix {
        let mut out = match &h {
            Some(h) => h.commutator(rho).scale(Complex64::new(0.0, -inv_hbar)),
            None => ComplexMatrix::zeros(rho.dim()),
        };
        for l in &jumps {
            out.axpy(C_ONE, &l.matmul(rho).matmul(&l.conj_transpose()));
        }
        out.axpy(Complex64::new(-0.5, 0.0), &loss.anticommutator(rho));
        out
    };

    integrate_density(rhs, rho0.matrix(), t_final, dt, max_snapshots, None)
}

/// Structured propagation of an inter-copy collapse model: identical output
/// to [`evolve_dense`] without materializing the jump operators. The gain
/// term needs only the basis diagonal of rho, and the loss term is the
/// uniform decay at the model's total rate.
pub fn evolve_structured(
    model: &CollapseModel,
    local_h: Option<&Operator>,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<EvolutionResult> {
    evolve_structured_with_snapshots(model, local_h, rho0, t_final, dt, DEFAULT_SNAPSHOTS)
}

pub fn evolve_structured_with_snapshots(
    model: &CollapseModel,
    local_h: Option<&Operator>,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    max_snapshots: usize,
) -> Result<EvolutionResult> {
    let engine = StructuredEngine::new(model, local_h)?;
    if rho0.dim() != engine.dim {
        return Err(Error::DimensionMismatch {
            context: "evolve_structured initial state",
            expected: engine.dim,
            got: rho0.dim(),
        });
    }
    let rho_frame = engine.to_frame(rho0.matrix());
    let rotation = engine.rotation.clone();
    let rhs = move |rho: &ComplexMatrix| engine.rhs(rho);
    integrate_density(
        rhs,
        &rho_frame,
        t_final,
        dt,
        max_snapshots,
        rotation.as_ref(),
    )
}

/// Precomputed structured right-hand side in the pointer frame.
pub(crate) struct StructuredEngine {
    pub dim: usize,
    /// gain_coeff[s * d + m] = alpha^2 w_m(s).
    gain_coeff: Vec<f64>,
    /// Per-basis-state decay rate d_s = sum_m alpha^2 w_m(s).
    pub decay: Vec<f64>,
    pub pointer_index: Vec<usize>,
    /// Total Hamiltonian in the pointer frame (already rotated).
    pub hamiltonian: Option<ComplexMatrix>,
    /// V = U^(x N): pointer frame -> computational frame.
    pub rotation: Option<ComplexMatrix>,
    hbar: f64,
    local_dim: usize,
}

impl StructuredEngine {
    pub fn new(model: &CollapseModel, local_h: Option<&Operator>) -> Result<Self> {
        let space = model.space();
        let dim = space.total_dim();
        let d = space.local_dim();
        let mut gain_coeff = vec![0.0; dim * d];
        let mut decay = vec![0.0; dim];
        let alpha_sq = model.alpha() * model.alpha();
        for label in space.labels() {
            let s = label.flat_index(space);
            for m in 0..d {
                let w = model.weight().weight(label.occupation(m));
                gain_coeff[s * d + m] = alpha_sq * w;
                decay[s] += alpha_sq * w;
            }
        }
        let pointer_index = (0..d).map(|m| space.pointer_product_index(m)).collect();

        let rotation = model.frame_rotation()?;
        let hamiltonian = match local_h {
            Some(h) => {
                // Rotate the local Hamiltonian into the pointer frame, then
                // sum over copies: V^dag (sum_j H^(j)) V = sum_j (U^dag H U)^(j).
                let local = match model.pointer_basis() {
                    Some(u) => {
                        let rotated = u.conj_transpose().matmul(h.matrix()).matmul(u);
                        Operator::hermitian(rotated)?
                    }
                    None => h.clone(),
                };
                Some(copy_hamiltonian(&local, space)?.into_matrix())
            }
            None => None,
        };
        Ok(Self {
            dim,
            gain_coeff,
            decay,
            pointer_index,
            hamiltonian,
            rotation,
            hbar: 1.0,
            local_dim: d,
        })
    }

    /// Rotate a computational-frame state into the pointer frame.
    pub fn to_frame(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match &self.rotation {
            Some(v) => v.conj_transpose().matmul(rho).matmul(v),
            None => rho.clone(),
        }
    }

    /// Rotate a pointer-frame state back to the computational frame.
    pub fn unrotate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match &self.rotation {
            Some(v) => v.matmul(rho).matmul(&v.conj_transpose()),
            None => rho.clone(),
        }
    }

    fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        let mut out = match &self.hamiltonian {
            Some(h) => h
                .commutator(rho)
                .scale(Complex64::new(0.0, -1.0 / self.hbar)),
            None => ComplexMatrix::zeros(n),
        };
        // Loss: -(d_i + d_j)/2 rho_ij.
        for i in 0..n {
            for j in 0..n {
                let damp = -0.5 * (self.decay[i] + self.decay[j]);
                out.add_to(i, j, rho.get(i, j) * Complex64::new(damp, 0.0));
            }
        }
        // Gain: sum_s alpha^2 w_m(s) rho_ss onto each pointer diagonal.
        let d = self.local_dim;
        for (m, &p) in self.pointer_index.iter().enumerate() {
            let mut gain = 0.0;
            for s in 0..n {
                gain += self.gain_coeff[s * d + m] * rho.get(s, s).re;
            }
            out.add_to(p, p, Complex64::new(gain, 0.0));
        }
        out
    }

    /// Pointer populations of a pointer-frame state.
    pub fn pointer_weights(&self, rho_frame: &ComplexMatrix) -> Vec<f64> {
        self.pointer_index
            .iter()
            .map(|&p| rho_frame.get(p, p).re)
            .collect()
    }

    /// alpha^2 w_m(s): the rate of the jump from basis state `s` to pointer
    /// `m`.
    pub fn gain_coefficient(&self, s: usize, m: usize) -> f64 {
        self.gain_coeff[s * self.local_dim + m]
    }
}

/// Shared RK4 driver: steps the density matrix, records snapshots (rotated
/// back by `rotation` when given), enforces the trace-drift bound and the
/// positivity floor on stored snapshots.
fn integrate_density(
    rhs: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    rho0: &ComplexMatrix,
    t_final: f64,
    dt: f64,
    max_snapshots: usize,
    rotation: Option<&ComplexMatrix>,
) -> Result<EvolutionResult> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            constraint: "dt > 0",
            got: dt,
        });
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_final",
            constraint: "t_final >= 0",
            got: t_final,
        });
    }
    let n_steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = if t_final > 0.0 {
        t_final / n_steps as f64
    } else {
        0.0
    };
    let stride = n_steps.div_ceil(max_snapshots.max(2) - 1).max(1);

    let store = |rho: &ComplexMatrix,
                 t: f64,
                 times: &mut Vec<f64>,
                 states: &mut Vec<DensityMatrix>|
     -> Result<()> {
        let out = match rotation {
            Some(v) => v.matmul(rho).matmul(&v.conj_transpose()),
            None => rho.clone(),
        };
        let min = gershgorin_or_eig_min(&out)?;
        if min < -TOL.positivity_drift {
            return Err(Error::PositivityLost {
                time: t,
                min_eigenvalue: min,
                bound: TOL.positivity_drift,
            });
        }
        times.push(t);
        states.push(DensityMatrix::trusted(out)?);
        Ok(())
    };

    let mut rho = rho0.clone();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut drift: f64 = (rho.trace().re - 1.0).abs();
    store(&rho, 0.0, &mut times, &mut states)?;

    if t_final == 0.0 {
        return Ok(EvolutionResult {
            times,
            states,
            trace_drift: drift,
        });
    }

    for step in 1..=n_steps {
        rk4_step(&rhs, &mut rho, h);
        let trace = rho.trace();
        let step_drift = (trace.re - 1.0).abs().max(trace.im.abs());
        drift = drift.max(step_drift);
        if step_drift > TOL.trace_drift {
            return Err(Error::StepInstability {
                drift: step_drift,
                bound: TOL.trace_drift,
            });
        }
        if step == n_steps || step % stride == 0 {
            store(&rho, step as f64 * h, &mut times, &mut states)?;
        }
    }

    Ok(EvolutionResult {
        times,
        states,
        trace_drift: drift,
    })
}

pub(crate) fn rk4_step(
    rhs: &impl Fn(&ComplexMatrix) -> ComplexMatrix,
    rho: &mut ComplexMatrix,
    h: f64,
) {
    let half = Complex64::new(h / 2.0, 0.0);
    let k1 = rhs(rho);
    let mut y = rho.clone();
    y.axpy(half, &k1);
    let k2 = rhs(&y);
    let mut y = rho.clone();
    y.axpy(half, &k2);
    let k3 = rhs(&y);
    let mut y = rho.clone();
    y.axpy(Complex64::new(h, 0.0), &k3);
    let k4 = rhs(&y);

    let sixth = h / 6.0;
    rho.axpy(Complex64::new(sixth, 0.0), &k1);
    rho.axpy(Complex64::new(2.0 * sixth, 0.0), &k2);
    rho.axpy(Complex64::new(2.0 * sixth, 0.0), &k3);
    rho.axpy(Complex64::new(sixth, 0.0), &k4);
}

/// Cheap positivity bound: Gershgorin first, full eigendecomposition only
/// when the disc bound is inconclusive.
fn gershgorin_or_eig_min(rho: &ComplexMatrix) -> Result<f64> {
    let n = rho.dim();
    let mut bound = f64::INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        for j in 0..n {
            if i != j {
                radius += rho.get(i, j).norm();
            }
        }
        bound = bound.min(rho.get(i, i).re - radius);
    }
    if bound >= -TOL.positivity_drift {
        return Ok(bound.min(0.0));
    }
    min_eigenvalue(rho)
}

/// A settled collapse: the limit state and its pointer weights.
#[derive(Debug, Clone)]
pub struct FinalState {
    pub state: DensityMatrix,
    pub pointer_weights: Vec<f64>,
    /// Time at which the settle criterion was met.
    pub settled_at: f64,
}

/// Evolve a collapse model until the pointer-population change per unit time
/// drops below the settle tolerance, and return the limit state.
///
/// Requires the local Hamiltonian (if any) to be diagonal in the pointer
/// basis, so the pointer populations have a limit.
pub fn final_state(
    model: &CollapseModel,
    local_h: Option<&Operator>,
    rho0: &DensityMatrix,
) -> Result<FinalState> {
    let engine = StructuredEngine::new(model, local_h)?;
    require_pointer_compatible(&engine)?;
    if rho0.dim() != engine.dim {
        return Err(Error::DimensionMismatch {
            context: "final_state initial state",
            expected: engine.dim,
            got: rho0.dim(),
        });
    }

    let rate = model.total_decay_rate();
    let h_scale = engine
        .hamiltonian
        .as_ref()
        .map(|h| h.frobenius_norm())
        .unwrap_or(0.0);
    let dt = 0.02 / (rate + h_scale);
    let chunk = 1.0 / rate;
    let max_time = 80.0 / rate;

    let mut rho = engine.to_frame(rho0.matrix());
    let mut weights = engine.pointer_weights(&rho);
    let mut t = 0.0;
    let mut last_rate = f64::INFINITY;
    while t < max_time {
        let steps = (chunk / dt).ceil() as usize;
        let h = chunk / steps as f64;
        for _ in 0..steps {
            rk4_step(&|r| engine.rhs(r), &mut rho, h);
        }
        t += chunk;
        let new_weights = engine.pointer_weights(&rho);
        last_rate = weights
            .iter()
            .zip(&new_weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / chunk;
        weights = new_weights;
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > TOL.trace_drift {
            return Err(Error::StepInstability {
                drift: (trace.re - 1.0).abs(),
                bound: TOL.trace_drift,
            });
        }
        if last_rate < TOL.pointer_settle_rate {
            return Ok(FinalState {
                state: DensityMatrix::trusted(engine.unrotate(&rho))?,
                pointer_weights: weights,
                settled_at: t,
            });
        }
    }
    Err(Error::NotSettled {
        max_time,
        rate: last_rate,
    })
}

fn require_pointer_compatible(engine: &StructuredEngine) -> Result<()> {
    if let Some(h) = &engine.hamiltonian {
        let mut off: f64 = 0.0;
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                if i != j {
                    off = off.max(h.get(i, j).norm());
                }
            }
        }
        let scale = h.max_abs().max(1.0);
        if off > 1e-12 * scale {
            return Err(Error::InvalidParameter {
                name: "local_h",
                constraint: "commutes with the pointer projectors",
                got: off,
            });
        }
    }
    Ok(())
}

/// Least-squares exponential decay rate of `values` over the time window
/// [t_lo, t_hi]: fits ln v = a - rate * t. Returns `None` when fewer than
/// two usable samples fall in the window.
pub fn fit_exponential_rate(times: &[f64], values: &[f64], t_lo: f64, t_hi: f64) -> Option<f64> {
    let points: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(&t, &v)| t >= t_lo && t <= t_hi && v > 1e-300)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some(-(n * sxy - sx * sy) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copyspace::{objective_collapse_lindblads, product_state, BasisLabel};
    use crate::qmath::{pauli, expectation, Ket, PauliAxis};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn plus_x_state() -> DensityMatrix {
        let amps = vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        DensityMatrix::pure(&Ket::normalized(amps).unwrap()).unwrap()
    }

    #[test]
    fn unitary_limit_rotates_coherence() {
        // H = sigma_z, no jumps: populations constant, coherence phase
        // advances at frequency 2/hbar.
        let model = LindbladModel::new(2, Some(pauli(PauliAxis::Z)), Vec::new(), 1.0).unwrap();
        let rho0 = plus_x_state();
        let result = evolve_dense(&model, &rho0, 2.0, 1e-3).unwrap();
        for state in &result.states {
            assert!((state.population(0) - 0.5).abs() < 1e-9);
            assert!((state.matrix().get(0, 1).norm() - 0.5).abs() < 1e-9);
        }
        // rho_01(t) = 0.5 e^{-2 i t}.
        let last = result.final_density().matrix().get(0, 1);
        let expected = Complex64::new(0.0, -2.0 * 2.0).exp() * 0.5;
        assert!((last - expected).norm() < 1e-8);
        assert!(result.trace_drift <= 1e-6);
    }

    #[test]
    fn single_qubit_coherence_decays_at_twice_alpha_sq() {
        let collapse = CollapseModel::qubit(1, 0.8).unwrap();
        let model = LindbladModel::from_collapse(&collapse, None).unwrap();
        let rho0 = plus_x_state();
        let rate = collapse.total_decay_rate(); // 2 alpha^2
        let result = evolve_dense(&model, &rho0, 2.0 / rate, 0.01 / rate).unwrap();
        let coh = result.coherence_series(0, 1);
        let fitted = fit_exponential_rate(&result.times, &coh, 0.0, 2.0 / rate).unwrap();
        assert!(
            (fitted - rate).abs() / rate < 0.01,
            "fitted {fitted}, expected {rate}"
        );
    }

    #[test]
    fn inter_pointer_coherence_decays_at_total_rate() {
        // |<+...+| rho |-...->| falls at 2 N alpha^2 with H = 0, any N.
        for n in [1usize, 2, 3] {
            let collapse = CollapseModel::qubit(n, 0.7).unwrap();
            let space = *collapse.space();
            let rate = collapse.total_decay_rate();
            let rho0 = product_state(&plus_x_state(), &space).unwrap();
            let run = evolve_structured(&collapse, None, &rho0, 2.0 / rate, 0.01 / rate).unwrap();
            let coherence = run.coherence_series(
                space.pointer_product_index(0),
                space.pointer_product_index(1),
            );
            let fitted = fit_exponential_rate(&run.times, &coherence, 0.0, 2.0 / rate).unwrap();
            assert!(
                (fitted - rate).abs() / rate < 0.01,
                "N = {n}: fitted {fitted} vs {rate}"
            );
        }
    }

    #[test]
    fn three_copies_one_minus_branches_one_third() {
        let collapse = CollapseModel::qubit(3, 1.0).unwrap();
        let model = LindbladModel::from_collapse(&collapse, None).unwrap();
        let space = *collapse.space();
        let label = BasisLabel::from_signs("+-+", &space).unwrap();
        let rho0 = DensityMatrix::pure(&Ket::basis(8, label.flat_index(&space)).unwrap()).unwrap();
        let result = evolve_dense(&model, &rho0, 8.0, 5e-4).unwrap();
        let minus_pop = result.final_density().population(space.pointer_product_index(1));
        assert!(
            (minus_pop - 1.0 / 3.0).abs() < 1e-6,
            "all-minus population {minus_pop}"
        );
    }

    #[test]
    fn structured_matches_dense_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let collapse = CollapseModel::qubit(3, 0.9).unwrap();
        let dense_model = LindbladModel::from_collapse(&collapse, None).unwrap();
        for _ in 0..3 {
            let rho0 = crate::qmath::random::density(8, &mut rng);
            let dense = evolve_dense(&dense_model, &rho0, 0.8, 2e-3).unwrap();
            let structured = evolve_structured(&collapse, None, &rho0, 0.8, 2e-3).unwrap();
            assert_eq!(dense.times.len(), structured.times.len());
            for (a, b) in dense.states.iter().zip(&structured.states) {
                assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-8);
            }
        }
    }

    #[test]
    fn structured_matches_dense_with_pointer_hamiltonian() {
        // Local H diagonal in the pointer basis commutes with the projectors.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let local_h = Operator::hermitian(ComplexMatrix::diagonal(&[
            Complex64::new(0.7, 0.0),
            Complex64::new(-0.2, 0.0),
        ]))
        .unwrap();
        let collapse = CollapseModel::qubit(2, 0.8).unwrap();
        let dense_model = LindbladModel::from_collapse(&collapse, Some(&local_h)).unwrap();
        let rho0 = crate::qmath::random::density(4, &mut rng);
        let dense = evolve_dense(&dense_model, &rho0, 1.0, 1e-3).unwrap();
        let structured = evolve_structured(&collapse, Some(&local_h), &rho0, 1.0, 1e-3).unwrap();
        for (a, b) in dense.states.iter().zip(&structured.states) {
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-8);
        }
    }

    #[test]
    fn pointer_product_is_stationary() {
        let collapse = CollapseModel::qubit(3, 1.0).unwrap();
        let space = *collapse.space();
        let rho0 = DensityMatrix::pure(&Ket::basis(8, space.pointer_product_index(0)).unwrap())
            .unwrap();
        let result = evolve_structured(&collapse, None, &rho0, 3.0, 1e-3).unwrap();
        assert!(result
            .final_density()
            .matrix()
            .max_abs_diff(rho0.matrix())
            < 1e-9);
    }

    #[test]
    fn structured_handles_six_qubits() {
        // N = 6: the structured engine runs; the vectorized-superoperator
        // route refuses (its cap is far smaller).
        let collapse = CollapseModel::qubit(6, 1.0).unwrap();
        let space = *collapse.space();
        let amps = vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)];
        let local = DensityMatrix::pure(&Ket::normalized(amps).unwrap()).unwrap();
        let rho0 = product_state(&local, &space).unwrap();
        let result = evolve_structured(&collapse, None, &rho0, 0.5, 2e-3).unwrap();
        assert!(result.trace_drift < 1e-6);

        let model = LindbladModel::from_collapse(&collapse, None).unwrap();
        assert!(matches!(
            liouvillian(&model),
            Err(Error::DenseCapExceeded { .. })
        ));
    }

    #[test]
    fn copy_hamiltonian_evolution_keeps_products_product() {
        // rho(t) under the sum of identical local Hamiltonians equals the
        // tensor power of the single-copy evolution.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let local_h = crate::qmath::random::hermitian(2, &mut rng);
        let local_rho = crate::qmath::random::density(2, &mut rng);
        let space = crate::copyspace::CopySpace::qubits(2).unwrap();
        let joint_h = crate::copyspace::copy_hamiltonian(&local_h, &space).unwrap();
        let rho0 = product_state(&local_rho, &space).unwrap();

        let t = 0.8;
        let joint_model = LindbladModel::new(4, Some(joint_h), Vec::new(), 1.0).unwrap();
        let joint = evolve_dense(&joint_model, &rho0, t, 1e-4).unwrap();

        let single_model = LindbladModel::new(2, Some(local_h), Vec::new(), 1.0).unwrap();
        let single = evolve_dense(&single_model, &local_rho, t, 1e-4).unwrap();
        let tensored = single
            .final_density()
            .matrix()
            .kron(single.final_density().matrix())
            .unwrap();
        assert!(
            joint.final_density().matrix().max_abs_diff(&tensored) < 1e-9,
            "difference {}",
            joint.final_density().matrix().max_abs_diff(&tensored)
        );
    }

    #[test]
    fn final_state_reproduces_born_weights() {
        let collapse = CollapseModel::qubit(2, 1.0).unwrap();
        let space = *collapse.space();
        let amps = vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let local = DensityMatrix::pure(&Ket::normalized(amps).unwrap()).unwrap();
        let rho0 = product_state(&local, &space).unwrap();
        let out = final_state(&collapse, None, &rho0).unwrap();
        assert!((out.pointer_weights[0] - 0.5).abs() < 1e-6);
        assert!((out.pointer_weights[1] - 0.5).abs() < 1e-6);

        // c = 1: all weight on the all-plus pointer.
        let local = DensityMatrix::pure(&Ket::basis(2, 0).unwrap()).unwrap();
        let rho0 = product_state(&local, &space).unwrap();
        let out = final_state(&collapse, None, &rho0).unwrap();
        assert!((out.pointer_weights[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn final_state_qutrit_matches_amplitude_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let collapse = CollapseModel::qudit(2, 3, 1.0).unwrap();
        let space = *collapse.space();
        let psi = crate::qmath::random::pure_state(3, &mut rng);
        let local = DensityMatrix::pure(&psi).unwrap();
        let rho0 = product_state(&local, &space).unwrap();
        let out = final_state(&collapse, None, &rho0).unwrap();
        for m in 0..3 {
            let expected = psi.amplitudes()[m].norm_sqr();
            assert!(
                (out.pointer_weights[m] - expected).abs() < 1e-6,
                "pointer {m}: {} vs {}",
                out.pointer_weights[m],
                expected
            );
        }
        // Cross-check against the dense engine.
        let model = LindbladModel::from_collapse(&collapse, None).unwrap();
        let dense = evolve_dense(&model, &rho0, 12.0, 2e-3).unwrap();
        for m in 0..3 {
            let p = dense
                .final_density()
                .population(space.pointer_product_index(m));
            assert!((out.pointer_weights[m] - p).abs() < 1e-6);
        }
    }

    #[test]
    fn objective_collapse_does_not_shift_pointer_weights() {
        let collapse = CollapseModel::qubit(2, 1.0).unwrap();
        let space = *collapse.space();
        let amps = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let local = DensityMatrix::pure(&Ket::normalized(amps).unwrap()).unwrap();
        let rho0 = product_state(&local, &space).unwrap();

        let plain = LindbladModel::from_collapse(&collapse, None).unwrap();
        let with_objective = LindbladModel::from_collapse(&collapse, None)
            .unwrap()
            .with_extra_jumps(
                objective_collapse_lindblads(&space, 0.9)
                    .unwrap()
                    .into_iter()
                    .map(|op| JumpOperator::Dense(op.into_matrix()))
                    .collect(),
            )
            .unwrap();

        let a = evolve_dense(&plain, &rho0, 10.0, 1e-3).unwrap();
        let b = evolve_dense(&with_objective, &rho0, 10.0, 1e-3).unwrap();
        for m in 0..2 {
            let p = space.pointer_product_index(m);
            assert!(
                (a.final_density().population(p) - b.final_density().population(p)).abs() < 1e-6
            );
        }
    }

    #[test]
    fn unstable_step_size_reports_advice() {
        let collapse = CollapseModel::qubit(2, 1.0).unwrap();
        let model = LindbladModel::from_collapse(&collapse, None).unwrap();
        let space = *collapse.space();
        let label = BasisLabel::from_signs("+-", &space).unwrap();
        let rho0 = DensityMatrix::pure(&Ket::basis(4, label.flat_index(&space)).unwrap()).unwrap();
        // dt far beyond the stability region: the decaying mode amplifies
        // and a snapshot loses positivity.
        let err = evolve_dense(&model, &rho0, 50.0, 2.0).unwrap_err();
        assert!(matches!(
            err,
            Error::StepInstability { .. } | Error::PositivityLost { .. }
        ));
    }

    #[test]
    fn expectation_stays_linear_along_evolution() {
        // Sanity: Tr(P rho) for a projector stays within [0, 1] and the
        // identity expectation stays 1.
        let collapse = CollapseModel::qubit(2, 0.6).unwrap();
        let space = *collapse.space();
        let amps = vec![Complex64::new(0.8, 0.0), Complex64::new(0.6, 0.0)];
        let local = DensityMatrix::pure(&Ket::normalized(amps).unwrap()).unwrap();
        let rho0 = product_state(&local, &space).unwrap();
        let result = evolve_structured(&collapse, None, &rho0, 2.0, 1e-3).unwrap();
        let identity = crate::qmath::identity_op(4);
        for state in &result.states {
            let one = expectation(&identity, state).unwrap();
            assert!((one.re - 1.0).abs() < 1e-9 && one.im.abs() < 1e-12);
        }
    }
}
