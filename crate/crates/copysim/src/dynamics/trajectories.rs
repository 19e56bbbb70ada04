//! Quantum-jump Monte Carlo unraveling of the inter-copy collapse model.
//!
//! Counted-process scheme with norm-threshold detection: the unnormalized
//! state evolves under the effective non-Hermitian generator until its
//! squared norm crosses a uniform threshold, a jump channel is drawn with
//! probability proportional to its rate, and the state resets to the
//! channel's pointer product. The pointer-diagonal Hamiltonian requirement
//! makes the no-jump propagator diagonal, so propagation is exact and the
//! crossing time is located by bisection rather than step-size-limited
//! detection.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::copyspace::CollapseModel;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, ExecMode};
use crate::qmath::{Ket, Operator, C_ZERO};

use super::StructuredEngine;

/// Ensemble outcome of the unraveling.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    /// Count of trajectories absorbed into each pointer product.
    pub histogram: Vec<u64>,
    /// Trajectories that never jumped within t_final.
    pub unresolved: u64,
    pub times: Vec<f64>,
    /// Trajectory-averaged normalized pointer populations, [time][pointer].
    pub mean_pointer_populations: Vec<Vec<f64>>,
    pub n_trajectories: usize,
    pub seed: u64,
}

impl TrajectoryResult {
    /// Observed absorption frequency of pointer `m`.
    pub fn frequency(&self, m: usize) -> f64 {
        self.histogram[m] as f64 / self.n_trajectories as f64
    }

    /// Binomial standard error of the absorption frequency of pointer `m`.
    pub fn frequency_sigma(&self, m: usize) -> f64 {
        let p = self.frequency(m);
        (p * (1.0 - p) / self.n_trajectories as f64).sqrt()
    }
}

struct TrajectoryRun {
    outcome: Option<usize>,
    /// Normalized pointer populations at each snapshot, flattened
    /// [time * d + pointer].
    populations: Vec<f64>,
}

/// Run `n_traj` independent quantum-jump trajectories from the pure state
/// `psi0`. Deterministic under a fixed seed: trajectory `i` draws from an
/// independent counter-mode stream, so the result does not depend on the
/// execution mode or thread count.
#[allow(clippy::too_many_arguments)]
pub fn jump_trajectories(
    model: &CollapseModel,
    local_h: Option<&Operator>,
    psi0: &Ket,
    t_final: f64,
    dt: f64,
    n_traj: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<TrajectoryResult> {
    if !psi0.is_normalized() {
        return Err(Error::NotNormalized {
            norm: psi0.norm_sqr().sqrt(),
            tolerance: crate::config::TOL.ket_norm,
        });
    }
    if n_traj == 0 {
        return Err(Error::InvalidParameter {
            name: "n_traj",
            constraint: "at least one trajectory",
            got: 0.0,
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            constraint: "dt > 0",
            got: dt,
        });
    }
    let engine = StructuredEngine::new(model, local_h)?;
    if psi0.dim() != engine.dim {
        return Err(Error::DimensionMismatch {
            context: "jump_trajectories initial state",
            expected: engine.dim,
            got: psi0.dim(),
        });
    }
    // The no-jump propagator must be diagonal in the pointer frame.
    let energies = diagonal_energies(&engine)?;

    let d = engine.pointer_index.len();
    let n_snapshots = 101;
    let times: Vec<f64> = (0..n_snapshots)
        .map(|k| t_final * k as f64 / (n_snapshots - 1) as f64)
        .collect();

    // Pointer-frame initial state.
    let psi_frame: Vec<Complex64> = match &engine.rotation {
        Some(v) => v.conj_transpose().matvec(psi0.amplitudes()),
        None => psi0.amplitudes().to_vec(),
    };

    let runs: Vec<TrajectoryRun> = map_indexed(mode, n_traj, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        run_one(&engine, &energies, &psi_frame, &times, dt, &mut rng)
    });

    let mut histogram = vec![0u64; d];
    let mut unresolved = 0u64;
    let mut mean = vec![0.0f64; n_snapshots * d];
    for run in &runs {
        match run.outcome {
            Some(m) => histogram[m] += 1,
            None => unresolved += 1,
        }
        for (acc, &v) in mean.iter_mut().zip(&run.populations) {
            *acc += v;
        }
    }
    let inv = 1.0 / n_traj as f64;
    let mean_pointer_populations = (0..n_snapshots)
        .map(|k| (0..d).map(|m| mean[k * d + m] * inv).collect())
        .collect();

    Ok(TrajectoryResult {
        histogram,
        unresolved,
        times,
        mean_pointer_populations,
        n_trajectories: n_traj,
        seed,
    })
}

fn diagonal_energies(engine: &StructuredEngine) -> Result<Vec<f64>> {
    match &engine.hamiltonian {
        None => Ok(vec![0.0; engine.dim]),
        Some(h) => {
            let mut off: f64 = 0.0;
            for i in 0..h.dim() {
                for j in 0..h.dim() {
                    if i != j {
                        off = off.max(h.get(i, j).norm());
                    }
                }
            }
            if off > 1e-12 * h.max_abs().max(1.0) {
                return Err(Error::InvalidParameter {
                    name: "local_h",
                    constraint: "diagonal in the pointer basis for jump unraveling",
                    got: off,
                });
            }
            Ok((0..h.dim()).map(|i| h.get(i, i).re).collect())
        }
    }
}

fn run_one(
    engine: &StructuredEngine,
    energies: &[f64],
    psi0: &[Complex64],
    times: &[f64],
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> TrajectoryRun {
    let d = engine.pointer_index.len();
    let mut psi = psi0.to_vec();
    let mut populations = vec![0.0; times.len() * d];
    let mut outcome: Option<usize> = None;

    record(engine, &psi, &mut populations[0..d]);

    // Threshold for the next (first) jump.
    let threshold = draw_threshold(rng);

    for k in 1..times.len() {
        let mut t = times[k - 1];
        let t_end = times[k];
        if outcome.is_none() {
            while t < t_end - 1e-15 * t_end.max(1.0) {
                let step = dt.min(t_end - t);
                if propagated_norm_sq(engine, &psi, step) > threshold {
                    propagate(engine, energies, &mut psi, step);
                    t += step;
                    continue;
                }
                // Locate the crossing by bisection on the monotone norm.
                let mut lo = 0.0;
                let mut hi = step;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if propagated_norm_sq(engine, &psi, mid) > threshold {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                propagate(engine, energies, &mut psi, 0.5 * (lo + hi));

                // Draw the jump channel with probability ~ its rate.
                let mut rates = vec![0.0f64; d];
                for (s, z) in psi.iter().enumerate() {
                    let w = z.norm_sqr();
                    if w > 0.0 {
                        for (m, rate) in rates.iter_mut().enumerate() {
                            *rate += engine.gain_coefficient(s, m) * w;
                        }
                    }
                }
                let total: f64 = rates.iter().sum();
                let mut pick = rng.gen::<f64>() * total;
                let mut chosen = d - 1;
                for (m, &r) in rates.iter().enumerate() {
                    if pick < r {
                        chosen = m;
                        break;
                    }
                    pick -= r;
                }

                // The jump lands on a pointer product, which is absorbing
                // for the collapse family with a pointer-diagonal
                // Hamiltonian: later jumps map it to itself, so the outcome
                // is decided here.
                psi.iter_mut().for_each(|z| *z = C_ZERO);
                psi[engine.pointer_index[chosen]] = crate::qmath::C_ONE;
                outcome = Some(chosen);
                break;
            }
        }
        let slot = &mut populations[k * d..(k + 1) * d];
        match outcome {
            Some(m) => slot[m] = 1.0,
            None => record(engine, &psi, slot),
        }
    }
    TrajectoryRun {
        outcome,
        populations,
    }
}

/// Uniform draw on (0, 1]; zero would make the threshold unreachable.
fn draw_threshold(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Squared norm after propagating the unnormalized state by tau (phases drop
/// out; only the per-state decay matters).
fn propagated_norm_sq(engine: &StructuredEngine, psi: &[Complex64], tau: f64) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(s, z)| z.norm_sqr() * (-engine.decay[s] * tau).exp())
        .sum()
}

/// Exact no-jump propagation: psi_s *= exp(-(i theta_s + d_s / 2) tau).
fn propagate(engine: &StructuredEngine, energies: &[f64], psi: &mut [Complex64], tau: f64) {
    for (s, z) in psi.iter_mut().enumerate() {
        let decay = (-0.5 * engine.decay[s] * tau).exp();
        let phase = Complex64::from_polar(decay, -energies[s] * tau);
        *z *= phase;
    }
}

fn record(engine: &StructuredEngine, psi: &[Complex64], slot: &mut [f64]) {
    let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq <= 0.0 {
        return;
    }
    for (m, &p) in engine.pointer_index.iter().enumerate() {
        slot[m] = psi[p].norm_sqr() / norm_sq;
    }
}
