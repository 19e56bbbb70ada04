//! Hermitian eigendecomposition via the cyclic complex Jacobi method, plus
//! the matrix functions built on it.
//!
//! Desk-scale dimensions only (the dense caps keep everything at or below a
//! few hundred), so the quadratically convergent Jacobi sweep is accurate and
//! fast enough without pulling in a LAPACK backend.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, C_ONE, C_ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and matching orthonormal eigenvector columns of a
/// Hermitian matrix. The input is not checked for hermiticity here; callers
/// go through [`crate::qmath::Operator`] which is.
pub fn eig_hermitian_matrix(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = a.dim();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0)));
    }
    let mut m = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(1.0);
    let threshold = f64::EPSILON * scale;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= threshold {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::EigNonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v.get(i, order[j]));
    Ok((values, vectors))
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut sum = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            sum += 2.0 * m.get(p, q).norm_sqr();
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating the (p, q) entry: M <- J^dag M J,
/// V <- V J, with J the plane rotation
/// [[c, s e^{i alpha}], [-s e^{-i alpha}, c]] and e^{i alpha} the phase of
/// M[p][q].
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let h = m.get(p, q);
    let abs = h.norm();
    if abs < 1e-300 {
        return;
    }
    let phase = h / abs;
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let tau = (app - aqq) / (2.0 * abs);
    let t = if tau == 0.0 {
        1.0
    } else {
        -tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let se_pos = phase * s; // s e^{i alpha}
    let se_neg = phase.conj() * s; // s e^{-i alpha}

    let n = m.dim();
    // Column update: M <- M J.
    for k in 0..n {
        let mkp = m.get(k, p);
        let mkq = m.get(k, q);
        m.set(k, p, mkp * c - mkq * se_neg);
        m.set(k, q, mkp * se_pos + mkq * c);
    }
    // Row update: M <- J^dag M.
    for k in 0..n {
        let mpk = m.get(p, k);
        let mqk = m.get(q, k);
        m.set(p, k, mpk * c - mqk * se_pos);
        m.set(q, k, mpk * se_neg + mqk * c);
    }
    // Clean up rounding drift on the pivot pair.
    m.set(p, q, C_ZERO);
    m.set(q, p, C_ZERO);
    let dp = m.get(p, p);
    let dq = m.get(q, q);
    m.set(p, p, Complex64::new(dp.re, 0.0));
    m.set(q, q, Complex64::new(dq.re, 0.0));

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c - vkq * se_neg);
        v.set(k, q, vkp * se_pos + vkq * c);
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    let (values, _) = eig_hermitian_matrix(a)?;
    Ok(values.first().copied().unwrap_or(0.0))
}

/// Hermitian square root of a positive-semidefinite matrix. Eigenvalues in
/// [-floor, 0) are clamped to zero; anything lower is an error.
pub fn sqrt_psd(a: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix> {
    let (values, vectors) = eig_hermitian_matrix(a)?;
    if let Some(&min) = values.first() {
        if min < -floor {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
                tolerance: floor,
            });
        }
    }
    let roots: Vec<f64> = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let n = a.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (k, &root) in roots.iter().enumerate() {
        if root == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vectors.get(i, k) * root;
            for j in 0..n {
                out.add_to(i, j, vik * vectors.get(j, k).conj());
            }
        }
    }
    Ok(out)
}

/// Matrix exponential by scaling and squaring with a Taylor series; adequate
/// for the small Liouvillians and propagators this crate materializes.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.max_abs() * n as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(Complex64::new(1.0 / f64::powi(2.0, squarings as i32), 0.0));

    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=24 {
        term = term.matmul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        result.axpy(C_ONE, &term);
        if term.max_abs() < 1e-18 * result.max_abs().max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}
