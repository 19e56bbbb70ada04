//! Sequential-measurement statistics: the single-copy bound
//! |p_+ - p_-| <= sqrt(1 - epsilon^2) and its violation when a second copy
//! is read out before the inter-copy collapse completes.

use num_complex::Complex64;

use crate::config::TOL;
use crate::copyspace::{product_state, CollapseModel};
use crate::dynamics::evolve_structured;
use crate::error::{Error, Result};
use crate::qmath::{
    embed, expectation, pauli, ComplexMatrix, DensityMatrix, Ket, Operator, PauliAxis,
};

/// An unsharp two-outcome measurement along a Bloch direction:
/// effects (I +/- epsilon n.sigma)/2 with Kraus operators K = sqrt(M).
#[derive(Debug, Clone)]
pub struct UnsharpMeasurement {
    epsilon: f64,
    axis: [f64; 3],
    effects: [Operator; 2],
    kraus: [Operator; 2],
}

impl UnsharpMeasurement {
    pub fn new(epsilon: f64, axis: [f64; 3]) -> Result<Self> {
        if !(epsilon.is_finite() && (0.0..=1.0).contains(&epsilon)) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                constraint: "epsilon in [0, 1]",
                got: epsilon,
            });
        }
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if !(norm.is_finite() && norm > 1e-12) {
            return Err(Error::InvalidParameter {
                name: "axis",
                constraint: "nonzero Bloch vector",
                got: norm,
            });
        }
        let n = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
        let mut direction = ComplexMatrix::zeros(2);
        direction.axpy(Complex64::new(n[0], 0.0), pauli(PauliAxis::X).matrix());
        direction.axpy(Complex64::new(n[1], 0.0), pauli(PauliAxis::Y).matrix());
        direction.axpy(Complex64::new(n[2], 0.0), pauli(PauliAxis::Z).matrix());

        let mut effects = Vec::with_capacity(2);
        let mut kraus = Vec::with_capacity(2);
        for sign in [1.0, -1.0] {
            let mut m = ComplexMatrix::identity(2);
            m.axpy(Complex64::new(sign * epsilon, 0.0), &direction);
            let effect = Operator::positive(m.scale(Complex64::new(0.5, 0.0)))?;
            kraus.push(effect.sqrt()?);
            effects.push(effect);
        }
        let measurement = Self {
            epsilon,
            axis: n,
            effects: [effects.remove(0), effects.remove(0)],
            kraus: [kraus.remove(0), kraus.remove(0)],
        };
        debug_assert!(measurement.completeness_defect() <= TOL.ket_norm);
        Ok(measurement)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn effects(&self) -> &[Operator; 2] {
        &self.effects
    }

    pub fn kraus(&self) -> &[Operator; 2] {
        &self.kraus
    }

    /// max entrywise |sum_k K^dag K - I|.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(2);
        for k in &self.kraus {
            sum = sum.add(&k.matrix().conj_transpose().matmul(k.matrix()));
        }
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }

    /// Non-selective state update rho -> sum_k K rho K^dag.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let mut out = ComplexMatrix::zeros(rho.dim());
        for k in &self.kraus {
            let km = k.matrix();
            out = out.add(&km.matmul(rho.matrix()).matmul(&km.conj_transpose()));
        }
        DensityMatrix::trusted(out)
    }
}

/// The single-copy sequential bound sqrt(1 - epsilon^2).
pub fn sequential_bound(epsilon: f64) -> Result<f64> {
    if !(epsilon.is_finite() && (0.0..=1.0).contains(&epsilon)) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            constraint: "epsilon in [0, 1]",
            got: epsilon,
        });
    }
    Ok((1.0 - epsilon * epsilon).sqrt())
}

/// Unsharp x-measurement followed by a sharp z-readout on one copy:
/// returns (p_+, p_-) of the z outcomes.
pub fn sequential_single_copy(epsilon: f64, rho0: &DensityMatrix) -> Result<(f64, f64)> {
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "sequential_single_copy",
            expected: 2,
            got: rho0.dim(),
        });
    }
    let first = UnsharpMeasurement::new(epsilon, [1.0, 0.0, 0.0])?;
    let after = first.apply(rho0)?;
    let p_plus = expectation(&projector_z(0)?, &after)?.re;
    let p_minus = expectation(&projector_z(1)?, &after)?.re;
    Ok((p_plus, p_minus))
}

fn projector_z(index: usize) -> Result<Operator> {
    Ket::basis(2, index)?.projector()
}

/// Hadamard: maps the z basis to the x basis; its columns are the x-pointer
/// states.
pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
        vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
    ])
    .expect("static 2x2")
}

/// Outcome of the many-copy sequential experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManyCopyOutcome {
    pub p_plus: f64,
    pub p_minus: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Unsharp x-measurement applied to copy 1, inter-copy collapse (pointer
/// basis = the measured x axis) for `inter_measurement_time`, then a sharp
/// z-readout on copy 2.
///
/// At zero delay copy 2 is untouched and the z-readout is perfectly sharp,
/// exceeding the single-copy bound for every epsilon > 0; as the delay grows
/// the collapse mixes the copies toward x pointers and the advantage fades.
pub fn sequential_many_copy(
    epsilon: f64,
    n_copies: usize,
    collapse_alpha: f64,
    inter_measurement_time: f64,
) -> Result<ManyCopyOutcome> {
    if n_copies < 2 {
        return Err(Error::InvalidParameter {
            name: "n_copies",
            constraint: "at least two copies",
            got: n_copies as f64,
        });
    }
    if !(inter_measurement_time.is_finite() && inter_measurement_time >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "inter_measurement_time",
            constraint: "nonnegative delay",
            got: inter_measurement_time,
        });
    }
    let bound = sequential_bound(epsilon)?;
    let model = CollapseModel::qubit(n_copies, collapse_alpha)?.with_pointer_basis(hadamard())?;
    let space = *model.space();

    // Every copy starts in |+> (z-up).
    let local = DensityMatrix::pure(&Ket::basis(2, 0)?)?;
    let rho = product_state(&local, &space)?;

    // Unsharp x-measurement on copy 1.
    let first = UnsharpMeasurement::new(epsilon, [1.0, 0.0, 0.0])?;
    let mut after = ComplexMatrix::zeros(space.total_dim());
    for k in first.kraus() {
        let embedded = embed(k, 1, space.n_copies())?;
        let km = embedded.matrix();
        after = after.add(&km.matmul(rho.matrix()).matmul(&km.conj_transpose()));
    }
    let mut state = DensityMatrix::trusted(after)?;

    // Inter-copy collapse toward the x pointers.
    if inter_measurement_time > 0.0 {
        let dt = 0.02 / (model.total_decay_rate());
        let run = evolve_structured(&model, None, &state, inter_measurement_time, dt)?;
        state = run.final_density().clone();
    }

    // Sharp z-readout on copy 2.
    let p_plus = expectation(&embed(&projector_z(0)?, 2, space.n_copies())?, &state)?.re;
    let p_minus = expectation(&embed(&projector_z(1)?, 2, space.n_copies())?, &state)?.re;
    let violated = (p_plus - p_minus).abs() > bound + TOL.bound_margin;
    Ok(ManyCopyOutcome {
        p_plus,
        p_minus,
        bound,
        violated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bound_examples() {
        assert!((sequential_bound(0.6).unwrap() - 0.8).abs() < 1e-15);
        assert!((sequential_bound(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(sequential_bound(1.0).unwrap().abs() < 1e-15);
        assert!(sequential_bound(1.5).is_err());
    }

    #[test]
    fn kraus_pair_is_complete() {
        for epsilon in [0.0, 0.3, 0.77, 1.0] {
            let m = UnsharpMeasurement::new(epsilon, [1.0, 0.0, 0.0]).unwrap();
            assert!(m.completeness_defect() < 1e-12);
        }
        // Arbitrary axis too.
        let m = UnsharpMeasurement::new(0.5, [1.0, 2.0, -0.5]).unwrap();
        assert!(m.completeness_defect() < 1e-12);
    }

    #[test]
    fn single_copy_closed_form() {
        let rho0 = DensityMatrix::pure(&Ket::basis(2, 0).unwrap()).unwrap();
        let (p_plus, p_minus) = sequential_single_copy(0.6, &rho0).unwrap();
        assert!((p_plus - 0.9).abs() < 1e-10);
        assert!((p_minus - 0.1).abs() < 1e-10);

        // Sharp first measurement erases the z information.
        let (p_plus, p_minus) = sequential_single_copy(1.0, &rho0).unwrap();
        assert!((p_plus - 0.5).abs() < 1e-10);
        assert!((p_minus - 0.5).abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed_is_invariant() {
        let rho0 = DensityMatrix::maximally_mixed(2);
        for epsilon in [0.2, 0.9] {
            let (p_plus, p_minus) = sequential_single_copy(epsilon, &rho0).unwrap();
            assert!((p_plus - 0.5).abs() < 1e-12);
            assert!((p_minus - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn single_copy_never_exceeds_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for i in 0..2000 {
            let epsilon = (i % 20) as f64 / 19.0;
            let rho0 = DensityMatrix::pure(&crate::qmath::random::pure_state(2, &mut rng)).unwrap();
            let (p_plus, p_minus) = sequential_single_copy(epsilon, &rho0).unwrap();
            let bound = sequential_bound(epsilon).unwrap();
            assert!((p_plus - p_minus).abs() <= bound + 1e-12);
        }
    }

    #[test]
    fn zero_delay_two_copies_violates() {
        let out = sequential_many_copy(0.6, 2, 1.0, 0.0).unwrap();
        assert!((out.p_plus - 1.0).abs() < 1e-10);
        assert!(out.p_minus.abs() < 1e-10);
        assert!(out.violated);
        assert!((out.bound - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_sharpness_never_violates() {
        for delay in [0.0, 0.5, 3.0] {
            let out = sequential_many_copy(0.0, 2, 1.0, delay).unwrap();
            assert!(!out.violated, "delay {delay}");
            assert!((out.bound - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn advantage_decays_with_delay() {
        let mut last = f64::INFINITY;
        let mut crossed = false;
        for k in 0..8 {
            let delay = k as f64 * 0.35;
            let out = sequential_many_copy(0.6, 2, 1.0, delay).unwrap();
            let diff = (out.p_plus - out.p_minus).abs();
            assert!(diff <= last + 1e-9, "diff grew at delay {delay}");
            last = diff;
            if !out.violated {
                crossed = true;
            }
        }
        assert!(crossed, "violation should fade for long delays");
    }
}
