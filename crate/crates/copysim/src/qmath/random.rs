//! Seeded random states and operators, used by property tests and sweeps.

use num_complex::Complex64;
use rand::Rng;

use super::{ComplexMatrix, DensityMatrix, Ket, Operator};

/// Standard normal via Box-Muller, to keep the dependency surface small.
fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

/// Haar-distributed pure state of the given dimension.
pub fn pure_state(dim: usize, rng: &mut impl Rng) -> Ket {
    loop {
        let amps: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            let amps = amps.into_iter().map(|z| z / norm).collect();
            return Ket::normalized(amps).expect("normalized by construction");
        }
    }
}

/// Random full-rank density matrix: G G^dag normalized to unit trace.
pub fn density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, |_, _| random_complex(rng));
    let gram = g.matmul(&g.conj_transpose());
    let trace = gram.trace().re;
    DensityMatrix::new(gram.scale(Complex64::new(1.0 / trace, 0.0)))
        .expect("positive by construction")
}

/// Random Hermitian operator with entries of order 1.
pub fn hermitian(dim: usize, rng: &mut impl Rng) -> Operator {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m.set(i, i, Complex64::new(normal(rng), 0.0));
        for j in (i + 1)..dim {
            let z = random_complex(rng);
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    Operator::hermitian(m).expect("hermitian by construction")
}

/// Random (non-Hermitian) operator with entries of order 1.
pub fn general(dim: usize, rng: &mut impl Rng) -> Operator {
    Operator::new(ComplexMatrix::from_fn(dim, |_, _| random_complex(rng)))
        .expect("finite by construction")
}
