//! Joint measurability of a pair of qubit observables: feasibility frontiers
//! for unsharp and faulty measurements, the explicit joint-POVM construction
//! on the feasible side, a constructive no-go certificate for sharp
//! projections, and an independent brute-force frontier search.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{any_indexed, ExecMode};
use crate::qmath::{pauli, ComplexMatrix, Operator, PauliAxis, C_ONE};

/// Sharpness parameters of an unsharp z-measurement (`epsilon`) paired with
/// an unsharp x-measurement (`delta`); effects (1 +/- epsilon sigma_z)/2 and
/// (1 +/- delta sigma_x)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnsharpPair {
    pub epsilon: f64,
    pub delta: f64,
}

impl UnsharpPair {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon.abs() <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                constraint: "epsilon in [-1, 1]",
                got: epsilon,
            });
        }
        if !(delta.is_finite() && delta.abs() <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "delta",
                constraint: "delta in [-1, 1]",
                got: delta,
            });
        }
        Ok(Self { epsilon, delta })
    }
}

/// Detection efficiencies of two sharp but faulty projections:
/// P_+ -> lambda P_+ and Q_+ -> eta Q_+.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultyPair {
    pub lambda: f64,
    pub eta: f64,
}

impl FaultyPair {
    pub fn new(lambda: f64, eta: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("eta", eta)] {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::InvalidParameter {
                    name,
                    constraint: "value in [0, 1]",
                    got: v,
                });
            }
        }
        Ok(Self { lambda, eta })
    }
}

/// Outcome sign of one of the two marginal observables.
pub type OutcomeSign = i8;

/// A four-effect joint POVM over outcome pairs (a, b) in {+1, -1}^2, with
/// marginals reproducing the two target observables.
#[derive(Debug, Clone)]
pub struct JointPovm {
    effects: BTreeMap<(OutcomeSign, OutcomeSign), Operator>,
}

impl JointPovm {
    pub fn effect(&self, a: OutcomeSign, b: OutcomeSign) -> &Operator {
        &self.effects[&(a, b)]
    }

    pub fn effects(&self) -> impl Iterator<Item = (&(OutcomeSign, OutcomeSign), &Operator)> {
        self.effects.iter()
    }

    /// Sum of all four effects.
    pub fn completeness_sum(&self) -> ComplexMatrix {
        let mut sum = ComplexMatrix::zeros(2);
        for op in self.effects.values() {
            sum = sum.add(op.matrix());
        }
        sum
    }

    /// Marginal over the second outcome: sum_b M_{ab}.
    pub fn first_marginal(&self, a: OutcomeSign) -> ComplexMatrix {
        self.effect(a, 1).matrix().add(self.effect(a, -1).matrix())
    }

    /// Marginal over the first outcome: sum_a M_{ab}.
    pub fn second_marginal(&self, b: OutcomeSign) -> ComplexMatrix {
        self.effect(1, b).matrix().add(self.effect(-1, b).matrix())
    }
}

/// True iff the unsharp pair is jointly measurable: epsilon^2 + delta^2 <= 1
/// (boundary inclusive).
pub fn unsharp_feasible(pair: UnsharpPair) -> bool {
    pair.epsilon * pair.epsilon + pair.delta * pair.delta <= 1.0
}

/// True iff the faulty pair is jointly measurable:
/// 2 - lambda - eta >= sqrt(lambda^2 + eta^2).
pub fn faulty_feasible(pair: FaultyPair) -> bool {
    2.0 - pair.lambda - pair.eta >= (pair.lambda * pair.lambda + pair.eta * pair.eta).sqrt()
}

/// The effect matrix M_{ab} = (I + a epsilon sigma_z + b delta sigma_x)/4 of
/// the saturating unbiased family, without any feasibility gate. Exposed so
/// frontier scans can report the minimum eigenvalue on both sides.
pub fn unsharp_effect_matrix(pair: UnsharpPair, a: OutcomeSign, b: OutcomeSign) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(2);
    m.axpy(
        Complex64::new(a as f64 * pair.epsilon, 0.0),
        pauli(PauliAxis::Z).matrix(),
    );
    m.axpy(
        Complex64::new(b as f64 * pair.delta, 0.0),
        pauli(PauliAxis::X).matrix(),
    );
    m.scale(Complex64::new(0.25, 0.0))
}

/// Closed-form minimum eigenvalue of the unsharp effects:
/// (1 - sqrt(epsilon^2 + delta^2))/4, identical for all four.
pub fn unsharp_min_eigenvalue(pair: UnsharpPair) -> f64 {
    (1.0 - (pair.epsilon * pair.epsilon + pair.delta * pair.delta).sqrt()) / 4.0
}

/// The residual effect of the faulty-projection family:
/// M_{--} = I - lambda P_+ - eta Q_+ =
/// (1 - lambda/2 - eta/2) I - (lambda/2) sigma_z - (eta/2) sigma_x.
/// The marginal conditions force M_{++} = 0, M_{+-} = lambda P_+ and
/// M_{-+} = eta Q_+, so joint measurability reduces to positivity of this
/// matrix. Used by the frontier oracle and the frontier CSV.
pub fn faulty_residual_effect(pair: FaultyPair) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(2)
        .scale(Complex64::new(1.0 - pair.lambda / 2.0 - pair.eta / 2.0, 0.0));
    m.axpy(
        Complex64::new(-pair.lambda / 2.0, 0.0),
        pauli(PauliAxis::Z).matrix(),
    );
    m.axpy(
        Complex64::new(-pair.eta / 2.0, 0.0),
        pauli(PauliAxis::X).matrix(),
    );
    m
}

/// Construct the saturating joint POVM for a feasible unsharp pair.
///
/// The four effects are M_{ab} = I/4 + A_{ab} sigma_z + B_{ab} sigma_x with
/// A_{++} = epsilon/4 = -A_{-+}, A_{--} = -epsilon/4 = -A_{+-},
/// B_{++} = delta/4 = -B_{+-}, B_{--} = -delta/4 = -B_{-+}.
pub fn construct_joint_unsharp(pair: UnsharpPair) -> Result<JointPovm> {
    let radius_sq = pair.epsilon * pair.epsilon + pair.delta * pair.delta;
    if radius_sq > 1.0 {
        return Err(Error::InfeasiblePair {
            epsilon: pair.epsilon,
            delta: pair.delta,
            radius_sq,
        });
    }
    let mut effects = BTreeMap::new();
    for a in [1i8, -1] {
        for b in [1i8, -1] {
            let matrix = unsharp_effect_matrix(pair, a, b);
            // Hermitian by construction; positivity follows from the
            // feasibility gate (min eig = (1 - sqrt(radius_sq))/4 >= 0 up to
            // rounding at the boundary).
            effects.insert((a, b), Operator::with_flags(matrix, true, true));
        }
    }
    Ok(JointPovm { effects })
}

/// One numbered deduction of the sharp no-go chain, with its numeric check.
#[derive(Debug, Clone)]
pub struct CertificateStep {
    pub statement: String,
    /// Numeric residual that must vanish (or measured overlap) backing the
    /// deduction.
    pub check_value: f64,
}

/// Machine-checkable certificate that sharp P and Q (epsilon = delta = 1)
/// admit no joint POVM.
#[derive(Debug, Clone)]
pub struct NoGoCertificate {
    pub feasible: bool,
    pub steps: Vec<CertificateStep>,
    /// Frobenius norm of (sum of forced effects) - identity = sqrt(2).
    pub identity_deficit: f64,
}

/// Build the no-go certificate for sharp z and x projections.
///
/// The chain: the marginal condition forces each M_{ab} proportional to the
/// rank-1 projector P_a and also to Q_b; P_a and Q_b are never parallel
/// (overlap 1/2), so every effect vanishes, and the completeness sum misses
/// the identity by Frobenius norm sqrt(2).
pub fn sharp_nogo_certificate() -> NoGoCertificate {
    let p_plus = projector_z(1);
    let q_plus = projector_x(1);
    let mut steps = Vec::new();

    // <-|P_+|-> = 0: the marginal pins M_{+b} to the ray of P_+.
    let minus = [Complex64::new(0.0, 0.0), C_ONE];
    let p_on_minus = quadratic_form(&p_plus, &minus);
    steps.push(CertificateStep {
        statement: "marginal row +: <v_perp|P_+|v_perp> = 0 with M_{+b} positive \
                    forces M_{+b} proportional to P_+ (same for row - and P_-)"
            .into(),
        check_value: p_on_minus,
    });

    let plus_x_orth = [
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        Complex64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ];
    let q_on_orth = quadratic_form(&q_plus, &plus_x_orth);
    steps.push(CertificateStep {
        statement: "marginal column +: <w_perp|Q_+|w_perp> = 0 with M_{a+} positive \
                    forces M_{a+} proportional to Q_+ (same for column - and Q_-)"
            .into(),
        check_value: q_on_orth,
    });

    // P_a and Q_b are rank-1 with overlap 1/2, hence not parallel; an
    // operator on both rays is zero.
    let overlap = p_plus.matmul(&q_plus).trace().re;
    steps.push(CertificateStep {
        statement: "Tr(P_a Q_b) = 1/2 != 1: the rays differ, so each M_{ab} \
                    proportional to both projectors must vanish"
            .into(),
        check_value: overlap,
    });

    // All four effects forced to zero; completeness fails by |0 - I|_F.
    let deficit = ComplexMatrix::zeros(2)
        .sub(&ComplexMatrix::identity(2))
        .frobenius_norm();
    steps.push(CertificateStep {
        statement: "sum of the four forced effects is 0, not I; completeness \
                    fails with Frobenius deficit sqrt(2)"
            .into(),
        check_value: deficit,
    });

    NoGoCertificate {
        feasible: false,
        steps,
        identity_deficit: deficit,
    }
}

fn projector_z(sign: i8) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(2);
    m.axpy(Complex64::new(sign as f64, 0.0), pauli(PauliAxis::Z).matrix());
    m.scale(Complex64::new(0.5, 0.0))
}

fn projector_x(sign: i8) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(2);
    m.axpy(Complex64::new(sign as f64, 0.0), pauli(PauliAxis::X).matrix());
    m.scale(Complex64::new(0.5, 0.0))
}

fn quadratic_form(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    let mv = m.matvec(v);
    v.iter()
        .zip(&mv)
        .map(|(&a, &b)| (a.conj() * b).re)
        .sum()
}

/// Brute-force search over the unbiased joint-POVM family of effects
/// C_{ab} I + A_{ab} sigma_z + B_{ab} sigma_x, independent of
/// [`construct_joint_unsharp`].
///
/// The marginal conditions leave three free parameters (A_{++}, B_{++}, and
/// the bias C_{++} = C_{--} = c) with A_{--} = A_{++} - epsilon/2 and
/// B_{--} = B_{++} - delta/2. Positivity of the four effects amounts to
///
///   max(g1, g2) + max(g3, g4) <= 1/2
///
/// with g1 = |(A_{++}, B_{++})|, g2 = |(A_{--}, B_{--})|,
/// g3 = |(A_{--}, B_{++})|, g4 = |(A_{++}, B_{--})|; the bias c is then
/// eliminated analytically (any c in [max(g1,g2), 1/2 - max(g3,g4)] works).
/// Returns true if any grid point with the given step admits a positive
/// decomposition.
pub fn grid_search_feasible(pair: UnsharpPair, step: f64, mode: ExecMode) -> bool {
    let half = 0.5_f64;
    let n = (2.0 * half / step).round() as usize + 1;
    let eps2 = pair.epsilon / 2.0;
    let del2 = pair.delta / 2.0;
    any_indexed(mode, n, move |ia| {
        let a_pp = -half + ia as f64 * step;
        let a_mm = a_pp - eps2;
        let a_pp2 = a_pp * a_pp;
        let a_mm2 = a_mm * a_mm;
        for ib in 0..n {
            let b_pp = -half + ib as f64 * step;
            let b_mm = b_pp - del2;
            let b_pp2 = b_pp * b_pp;
            let b_mm2 = b_mm * b_mm;
            let g1 = (a_pp2 + b_pp2).sqrt();
            let g2 = (a_mm2 + b_mm2).sqrt();
            let g3 = (a_mm2 + b_pp2).sqrt();
            let g4 = (a_pp2 + b_mm2).sqrt();
            if g1.max(g2) + g3.max(g4) <= 0.5 {
                return true;
            }
        }
        false
    })
}

/// Feasibility margin 1/2 - [max(g1,g2) + max(g3,g4)] of the unbiased family
/// extended with the single free sigma_y coefficient D (D_{++} = D_{--} = D,
/// D_{+-} = D_{-+} = -D after the marginal conditions). Positive margin
/// means a valid decomposition. D only ever tightens the constraint, which
/// the frontier tests spot-check.
pub fn family_margin(pair: UnsharpPair, a_pp: f64, b_pp: f64, d: f64) -> f64 {
    let a_mm = a_pp - pair.epsilon / 2.0;
    let b_mm = b_pp - pair.delta / 2.0;
    let d2 = d * d;
    let g1 = (a_pp * a_pp + b_pp * b_pp + d2).sqrt();
    let g2 = (a_mm * a_mm + b_mm * b_mm + d2).sqrt();
    let g3 = (a_mm * a_mm + b_pp * b_pp + d2).sqrt();
    let g4 = (a_pp * a_pp + b_mm * b_mm + d2).sqrt();
    0.5 - (g1.max(g2) + g3.max(g4))
}
