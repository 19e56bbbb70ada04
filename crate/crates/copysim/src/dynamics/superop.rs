//! Vectorized-Liouvillian construction and exact exponentiation, offered as
//! an integrator cross-check at small dimension.
//!
//! Row-major vectorization: vec(rho)[i * dim + j] = rho_ij, so
//! vec(A rho B) = (A kron B^T) vec(rho).

use num_complex::Complex64;

use crate::config::LIMITS;
use crate::error::{Error, Result};
use crate::qmath::{expm, ComplexMatrix, DensityMatrix};

use super::LindbladModel;

/// Dense Liouvillian matrix of the model, dimension dim^2. Refuses above the
/// superoperator cap (the structured engine covers larger systems).
pub fn liouvillian(model: &LindbladModel) -> Result<ComplexMatrix> {
    let dim = model.dim();
    if dim > LIMITS.superop_dim {
        return Err(Error::DenseCapExceeded {
            context: "liouvillian (dense superoperator)",
            requested: dim,
            cap: LIMITS.superop_dim,
        });
    }
    let n2 = dim * dim;
    let identity = ComplexMatrix::identity(dim);
    let mut l_total = ComplexMatrix::zeros(n2);

    if let Some(h) = model.hamiltonian() {
        let hm = h.matrix();
        let left = hm.kron(&identity)?;
        let right = identity.kron(&transpose(hm))?;
        let inv_hbar = 1.0 / model.hbar();
        l_total.axpy(Complex64::new(0.0, -inv_hbar), &left);
        l_total.axpy(Complex64::new(0.0, inv_hbar), &right);
    }

    let mut loss = ComplexMatrix::zeros(dim);
    for jump in model.jumps() {
        let l = jump.to_dense(dim);
        let gain = l.kron(&conjugate(&l))?;
        l_total.axpy(Complex64::new(1.0, 0.0), &gain);
        loss = loss.add(&l.conj_transpose().matmul(&l));
    }
    let loss_left = loss.kron(&identity)?;
    let loss_right = identity.kron(&transpose(&loss))?;
    l_total.axpy(Complex64::new(-0.5, 0.0), &loss_left);
    l_total.axpy(Complex64::new(-0.5, 0.0), &loss_right);
    Ok(l_total)
}

/// rho(t) = unvec(exp(L t) vec(rho0)).
pub fn evolve_superop(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    let dim = model.dim();
    if rho0.dim() != dim {
        return Err(Error::DimensionMismatch {
            context: "evolve_superop initial state",
            expected: dim,
            got: rho0.dim(),
        });
    }
    let l = liouvillian(model)?;
    let propagator = expm(&l.scale(Complex64::new(t, 0.0)));
    let vec_rho: Vec<Complex64> = rho0.matrix().data().to_vec();
    let evolved = propagator.matvec(&vec_rho);
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            out.set(i, j, evolved[i * dim + j]);
        }
    }
    // Enforce exact hermiticity lost to rounding before wrapping.
    let sym = out
        .add(&out.conj_transpose())
        .scale(Complex64::new(0.5, 0.0));
    DensityMatrix::trusted(sym)
}

fn transpose(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.dim(), |i, j| m.get(j, i))
}

fn conjugate(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.dim(), |i, j| m.get(i, j).conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copyspace::CollapseModel;
    use crate::dynamics::evolve_dense;
    use crate::qmath::{pauli, Ket, PauliAxis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn superop_matches_rk4_for_qubit_collapse() {
        let collapse = CollapseModel::qubit(1, 0.9).unwrap();
        let model = LindbladModel::from_collapse(&collapse, Some(&pauli(PauliAxis::Z))).unwrap();
        let amps = vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ];
        let rho0 = DensityMatrix::pure(&Ket::normalized(amps).unwrap()).unwrap();
        let t = 0.7;
        let rk4 = evolve_dense(&model, &rho0, t, 1e-4).unwrap();
        let exact = evolve_superop(&model, &rho0, t).unwrap();
        assert!(
            rk4.final_density().matrix().max_abs_diff(exact.matrix()) < 1e-8,
            "difference {}",
            rk4.final_density().matrix().max_abs_diff(exact.matrix())
        );
    }

    #[test]
    fn superop_matches_rk4_for_two_copies() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let collapse = CollapseModel::qubit(2, 0.8).unwrap();
        let model = LindbladModel::from_collapse(&collapse, None).unwrap();
        let rho0 = crate::qmath::random::density(4, &mut rng);
        let t = 0.9;
        let rk4 = evolve_dense(&model, &rho0, t, 1e-4).unwrap();
        let exact = evolve_superop(&model, &rho0, t).unwrap();
        assert!(rk4.final_density().matrix().max_abs_diff(exact.matrix()) < 1e-8);
    }

    #[test]
    fn superop_cap() {
        let collapse = CollapseModel::qubit(5, 1.0).unwrap();
        let model = LindbladModel::from_collapse(&collapse, None).unwrap();
        assert!(matches!(
            liouvillian(&model),
            Err(Error::DenseCapExceeded { .. })
        ));
    }
}
