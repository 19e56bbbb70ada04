//! Rotation-readout statistics: harmonic content of the readout probability,
//! multi-copy projections, and timing-jitter convolution.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::copyspace::{product_state, CopySpace};
use crate::error::{Error, Result};
use crate::qmath::{expectation, tensor, DensityMatrix, Ket, Operator};

/// Readout probability model p(t) = sum_m xi_m cos^(2m)(omega t) with an
/// optional Gaussian timing jitter of standard deviation `jitter_sigma`.
#[derive(Debug, Clone)]
pub struct HarmonicModel {
    omega: f64,
    xi: BTreeMap<u32, f64>,
    jitter_sigma: f64,
}

impl HarmonicModel {
    pub fn new(omega: f64, xi: BTreeMap<u32, f64>, jitter_sigma: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega",
                constraint: "omega > 0",
                got: omega,
            });
        }
        if !(jitter_sigma.is_finite() && jitter_sigma >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "jitter_sigma",
                constraint: "jitter_sigma >= 0",
                got: jitter_sigma,
            });
        }
        if xi.is_empty() {
            return Err(Error::InvalidParameter {
                name: "xi",
                constraint: "at least one coefficient",
                got: 0.0,
            });
        }
        let model = Self {
            omega,
            xi,
            jitter_sigma,
        };
        // Probabilities must stay in [0, 1]; check on a fine grid over one
        // period of the slowest harmonic.
        let period = std::f64::consts::PI / omega;
        for k in 0..=2048 {
            let t = period * k as f64 / 2048.0;
            let p = model.probability(t);
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::InvalidParameter {
                    name: "xi",
                    constraint: "p(t) in [0, 1] for all t",
                    got: p,
                });
            }
        }
        Ok(model)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn xi(&self) -> &BTreeMap<u32, f64> {
        &self.xi
    }

    pub fn jitter_sigma(&self) -> f64 {
        self.jitter_sigma
    }

    /// p(t) = sum_m xi_m cos^(2m)(omega t).
    pub fn probability(&self, t: f64) -> f64 {
        let c2 = self.omega_cos_sq(t);
        self.xi
            .iter()
            .map(|(&m, &coeff)| coeff * c2.powi(m as i32))
            .sum()
    }

    fn omega_cos_sq(&self, t: f64) -> f64 {
        let c = (self.omega * t).cos();
        c * c
    }

    /// Exact average of p over one period: sum_m xi_m binom(2m, m) / 4^m.
    pub fn period_mean(&self) -> f64 {
        self.xi
            .iter()
            .map(|(&m, &coeff)| coeff * central_binomial_over_4m(m))
            .sum()
    }
}

/// binom(2m, m) / 4^m computed as a stable product.
fn central_binomial_over_4m(m: u32) -> f64 {
    let mut acc = 1.0;
    for k in 1..=m {
        let k = k as f64;
        acc *= (2.0 * k - 1.0) / (2.0 * k);
    }
    acc
}

/// [`HarmonicModel::probability`] as a free function, matching the
/// experiment nomenclature.
pub fn born_probability(model: &HarmonicModel, t: f64) -> f64 {
    model.probability(t)
}

/// Readout probability when the projection acts on `m` of the `n_copies`
/// rotating copies: builds rho(t) = (|psi(t)><psi(t)|)^(x N) and the
/// embedded product projector densely, returning Tr(M rho) = cos^(2m)(omega t).
pub fn multi_copy_projection_probability(
    m: usize,
    omega: f64,
    t: f64,
    n_copies: usize,
) -> Result<f64> {
    if m == 0 || m > n_copies {
        return Err(Error::IndexOutOfRange {
            context: "multi_copy_projection_probability",
            index: m,
            limit: n_copies,
        });
    }
    let space = CopySpace::qubits(n_copies)?;
    // |psi(t)> = cos(omega t)|+> - i sin(omega t)|->, generated by
    // H = omega sigma_x from |+>.
    let angle = omega * t;
    let psi = Ket::normalized(vec![
        Complex64::new(angle.cos(), 0.0),
        Complex64::new(0.0, -angle.sin()),
    ])?;
    let rho = product_state(&DensityMatrix::pure(&psi)?, &space)?;

    // M = P^(1)_+ ... P^(m)_+ : projector onto |+> on the first m copies.
    let plus = Ket::basis(2, 0)?.projector()?;
    let mut factors: Vec<Operator> = Vec::with_capacity(n_copies);
    for j in 0..n_copies {
        if j < m {
            factors.push(plus.clone());
        } else {
            factors.push(crate::qmath::identity_op(2));
        }
    }
    let projector = tensor(&factors)?;
    Ok(expectation(&projector, &rho)?.re)
}

/// Convolve the model probability with the normalized Gaussian timing
/// distribution, evaluated on the chosen-time grid `t0_grid`.
///
/// `jitter_sigma = 0` samples p directly. The grid must resolve the
/// oscillation: omega * grid spacing <= 0.3.
pub fn jittered_signal(model: &HarmonicModel, t0_grid: &[f64]) -> Result<Vec<f64>> {
    if t0_grid.len() >= 2 {
        let spacing = t0_grid[1] - t0_grid[0];
        let product = model.omega() * spacing;
        if product > 0.3 {
            return Err(Error::GridTooCoarse { product });
        }
    }
    let sigma = model.jitter_sigma();
    if sigma == 0.0 {
        return Ok(t0_grid.iter().map(|&t| model.probability(t)).collect());
    }
    // Gaussian kernel truncated at 5 sigma, discretely normalized.
    let step = (sigma / 8.0).min(0.05 / model.omega());
    let half = (5.0 * sigma / step).ceil() as i64;
    let mut weights = Vec::with_capacity((2 * half + 1) as usize);
    let mut total = 0.0;
    for k in -half..=half {
        let tau = k as f64 * step;
        let w = (-tau * tau / (2.0 * sigma * sigma)).exp();
        weights.push((tau, w));
        total += w;
    }
    for (_, w) in weights.iter_mut() {
        *w /= total;
    }
    Ok(t0_grid
        .iter()
        .map(|&t0| {
            weights
                .iter()
                .map(|&(tau, w)| w * model.probability(t0 - tau))
                .sum()
        })
        .collect())
}
