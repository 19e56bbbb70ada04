//! The three-state interference functional: the alternating sum of the seven
//! projective readouts vanishes identically for single-copy statistics and
//! picks up an epsilon-weighted correction under the two-copy readout rule.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{ComplexMatrix, C_ONE, C_ZERO};

/// Normalized three-level amplitudes plus the two-copy interaction strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeStateConfig {
    pub amplitudes: [Complex64; 3],
    pub epsilon: f64,
}

impl ThreeStateConfig {
    pub fn new(amplitudes: [Complex64; 3], epsilon: f64) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized {
                norm: norm_sq.sqrt(),
                tolerance: 1e-12,
            });
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                constraint: "finite interaction strength",
                got: epsilon,
            });
        }
        Ok(Self {
            amplitudes,
            epsilon,
        })
    }
}

/// How many copies participate in each readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SorkinCopies {
    One,
    Two,
}

/// The seven projective observables: the three singles |i><i|, the three
/// pair sums (|i>+|j>)(<i|+<j|), and the full sum over all three states.
pub fn observables() -> [ComplexMatrix; 7] {
    let single = |i: usize| {
        let mut v = [C_ZERO; 3];
        v[i] = C_ONE;
        outer(&v)
    };
    let pair = |i: usize, j: usize| {
        let mut v = [C_ZERO; 3];
        v[i] = C_ONE;
        v[j] = C_ONE;
        outer(&v)
    };
    [
        single(0),
        single(1),
        single(2),
        pair(0, 1),
        pair(0, 2),
        pair(1, 2),
        outer(&[C_ONE, C_ONE, C_ONE]),
    ]
}

fn outer(v: &[Complex64; 3]) -> ComplexMatrix {
    ComplexMatrix::outer(v, v).expect("3x3 outer product")
}

/// The alternating combination sum_i <o^i> - sum_{i<j} <o^{ij}> + <o^{123}>.
///
/// For `One` copy the expectations are <psi|O|psi> and the combination
/// vanishes identically. For `Two` copies the readout rule is
/// <o> = Tr[(O kron I + I kron O + epsilon O kron O) rho kron rho],
/// evaluated directly in the nine-dimensional product space.
pub fn sorkin_functional(config: &ThreeStateConfig, copies: SorkinCopies) -> f64 {
    let obs = observables();
    let signs = [1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0];
    match copies {
        SorkinCopies::One => {
            let psi = config.amplitudes;
            obs.iter()
                .zip(signs)
                .map(|(o, s)| s * quadratic_form3(o, &psi))
                .sum()
        }
        SorkinCopies::Two => {
            // rho kron rho for the pure state: amplitudes c_i c_j.
            let c = config.amplitudes;
            let mut pair_amps = [C_ZERO; 9];
            for i in 0..3 {
                for j in 0..3 {
                    pair_amps[i * 3 + j] = c[i] * c[j];
                }
            }
            let identity = ComplexMatrix::identity(3);
            obs.iter()
                .zip(signs)
                .map(|(o, s)| {
                    let left = o.kron(&identity).expect("9x9");
                    let right = identity.kron(o).expect("9x9");
                    let both = o.kron(o).expect("9x9");
                    let mut total = left.add(&right);
                    total.axpy(Complex64::new(config.epsilon, 0.0), &both);
                    s * quadratic_form9(&total, &pair_amps)
                })
                .sum()
        }
    }
}

/// Closed form of the two-copy combination:
/// epsilon (2|c_1|^2 c_23 + 2 c_13 c_12 + cyclic), c_ij = 2 Re c_i c_j^*.
pub fn two_copy_closed_form(config: &ThreeStateConfig) -> f64 {
    let c = config.amplitudes;
    let p: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
    let cij = |i: usize, j: usize| 2.0 * (c[i] * c[j].conj()).re;
    let c12 = cij(0, 1);
    let c13 = cij(0, 2);
    let c23 = cij(1, 2);
    config.epsilon
        * (2.0 * p[0] * c23
            + 2.0 * c13 * c12
            + 2.0 * p[1] * c13
            + 2.0 * c12 * c23
            + 2.0 * p[2] * c12
            + 2.0 * c23 * c13)
}

fn quadratic_form3(m: &ComplexMatrix, v: &[Complex64; 3]) -> f64 {
    let mv = m.matvec(v);
    v.iter().zip(&mv).map(|(&a, &b)| (a.conj() * b).re).sum()
}

fn quadratic_form9(m: &ComplexMatrix, v: &[Complex64; 9]) -> f64 {
    let mv = m.matvec(v);
    v.iter().zip(&mv).map(|(&a, &b)| (a.conj() * b).re).sum()
}
