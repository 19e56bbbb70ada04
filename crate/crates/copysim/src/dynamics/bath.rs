//! Reversible Hamiltonian model of the collapse: the initial configuration
//! couples to a discretized continuum of bath levels attached to the two
//! pointer-product families, with coupling strengths fixed by the golden
//! rule so the weak-coupling limit reproduces the Lindblad rates.

use num_complex::Complex64;

use crate::copyspace::{BasisLabel, CopySpace};
use crate::error::{Error, Result};
use crate::qmath::C_ZERO;

/// Pointer family index: 0 = all-plus, 1 = all-minus.
pub type Family = usize;

/// Discretized-bath collapse model for N qubit copies.
///
/// Bath levels are uniform on [0, e_max] (midpoint grid), so the density of
/// states is the constant g = n_levels / e_max. The couplings are
/// energy-independent with |f_(+/-)|^2 = hbar alpha^2 N_(+/-) / (2 pi g),
/// which solves the golden-rule matching
/// rate_(+/-) = 2 pi |f|^2 g / hbar = alpha^2 N_(+/-),
/// i.e. the decay rates of the corresponding jump operators; phases are
/// zero (they drop out of the rates).
#[derive(Debug, Clone)]
pub struct BathModel {
    space: CopySpace,
    alpha: f64,
    e_c: f64,
    n_levels: usize,
    e_max: f64,
    hbar: f64,
}

impl BathModel {
    pub fn from_rate(
        space: CopySpace,
        alpha: f64,
        e_c: f64,
        n_levels: usize,
        e_max: f64,
    ) -> Result<Self> {
        if space.local_dim() != 2 {
            return Err(Error::InvalidParameter {
                name: "space",
                constraint: "qubit copies (local_dim = 2)",
                got: space.local_dim() as f64,
            });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                constraint: "alpha > 0",
                got: alpha,
            });
        }
        if !(e_c.is_finite() && e_c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "e_c",
                constraint: "e_c > 0",
                got: e_c,
            });
        }
        if n_levels < 2 {
            return Err(Error::InvalidParameter {
                name: "n_levels",
                constraint: "at least 2 bath levels",
                got: n_levels as f64,
            });
        }
        let n = space.n_copies() as f64;
        let resonance_bound = e_c * n * n;
        if e_max <= resonance_bound {
            return Err(Error::BandTooNarrow {
                e_max,
                resonance: resonance_bound,
            });
        }
        Ok(Self {
            space,
            alpha,
            e_c,
            n_levels,
            e_max,
            hbar: 1.0,
        })
    }

    pub fn space(&self) -> &CopySpace {
        &self.space
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn e_c(&self) -> f64 {
        self.e_c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Constant density of states g = n_levels / e_max.
    pub fn density_of_states(&self) -> f64 {
        self.n_levels as f64 / self.e_max
    }

    /// Midpoint energy of bath level i (0-based).
    pub fn level_energy(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.e_max / self.n_levels as f64
    }

    /// |f_(+/-)| for the given initial label: alpha sqrt(hbar N_(+/-) / (2 pi g)).
    pub fn coupling(&self, family: Family, label: &BasisLabel) -> f64 {
        let occupation = label.qubit_occupation(family) as f64;
        self.alpha * (self.hbar * occupation / (2.0 * std::f64::consts::PI * self.density_of_states())).sqrt()
    }

    /// Golden-rule decay rate of the initial configuration into the given
    /// family: alpha^2 N_(+/-).
    pub fn golden_rule_rate(&self, family: Family, label: &BasisLabel) -> f64 {
        self.alpha * self.alpha * label.qubit_occupation(family) as f64
    }

    /// Total golden-rule decay rate 2 N alpha^2, matching the Lindblad
    /// model's uniform rate.
    pub fn total_rate(&self) -> f64 {
        2.0 * self.space.n_copies() as f64 * self.alpha * self.alpha
    }

    /// Step size keeping dt * max|energy| <= 0.05.
    pub fn suggested_dt(&self) -> f64 {
        let n = self.space.n_copies() as f64;
        let scale = (self.e_c * n * n).max(self.e_max - self.e_c * n * n).max(1e-12);
        0.05 / scale
    }
}

/// Pointer-family populations along the unitary bath evolution.
#[derive(Debug, Clone)]
pub struct BathEvolution {
    pub times: Vec<f64>,
    /// |<s, 0 | psi(t)>|^2.
    pub survival: Vec<f64>,
    /// Population of the all-plus and all-minus bath families, [time][family].
    pub family_populations: Vec<[f64; 2]>,
    /// max |norm^2 - 1| over the run (RK4 unitarity drift).
    pub norm_drift: f64,
}

impl BathEvolution {
    /// Fraction of the transferred population sitting in `family` at the end
    /// of the run.
    pub fn branching_fraction(&self, family: Family) -> f64 {
        let last = self.family_populations.last().expect("nonempty run");
        let total = last[0] + last[1];
        if total > 0.0 {
            last[family] / total
        } else {
            0.0
        }
    }
}

/// Unitary Schrodinger propagation of |s, 0> in the reachable sector
/// {|s, 0>} + {|+...+, E_i>} + {|-...-, E_i>}, dimension 1 + 2 n_levels.
/// The Hamiltonian is applied structurally (diagonal + arrowhead coupling),
/// so no dense matrix is materialized.
pub fn bath_evolve(
    bath: &BathModel,
    initial: &BasisLabel,
    t_final: f64,
    dt: f64,
) -> Result<BathEvolution> {
    if initial.n_copies() != bath.space.n_copies() {
        return Err(Error::DimensionMismatch {
            context: "bath_evolve initial label",
            expected: bath.space.n_copies(),
            got: initial.n_copies(),
        });
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dt",
            constraint: "dt > 0",
            got: dt,
        });
    }
    let m = bath.n_levels;
    let dim = 1 + 2 * m;
    let k_s = initial.signed_sum() as f64;
    let n = bath.space.n_copies() as f64;

    // Sector energies: the initial configuration sits at -E_c k_s^2; a
    // pointer family state with bath level E_i sits at E_i - E_c N^2.
    let mut energies = vec![0.0f64; dim];
    energies[0] = -bath.e_c * k_s * k_s;
    for i in 0..m {
        let e = bath.level_energy(i) - bath.e_c * n * n;
        energies[1 + i] = e;
        energies[1 + m + i] = e;
    }
    let f_plus = bath.coupling(0, initial);
    let f_minus = bath.coupling(1, initial);

    let inv_hbar = 1.0 / bath.hbar;
    let apply = |psi: &[Complex64], out: &mut [Complex64]| {
        // out = -i H psi / hbar with H = diag(energies) + arrowhead coupling.
        let mut head = energies[0] * psi[0];
        for i in 0..m {
            head += f_plus * psi[1 + i] + f_minus * psi[1 + m + i];
        }
        out[0] = Complex64::new(0.0, -inv_hbar) * head;
        for i in 0..m {
            let plus = energies[1 + i] * psi[1 + i] + f_plus * psi[0];
            out[1 + i] = Complex64::new(0.0, -inv_hbar) * plus;
            let minus = energies[1 + m + i] * psi[1 + m + i] + f_minus * psi[0];
            out[1 + m + i] = Complex64::new(0.0, -inv_hbar) * minus;
        }
    };

    let n_steps = (t_final / dt).ceil().max(1.0) as usize;
    let h = t_final / n_steps as f64;
    let max_snapshots = 513;
    let stride = n_steps.div_ceil(max_snapshots - 1).max(1);

    let mut psi = vec![C_ZERO; dim];
    psi[0] = crate::qmath::C_ONE;

    let mut times = Vec::new();
    let mut survival = Vec::new();
    let mut family_populations = Vec::new();
    let mut norm_drift: f64 = 0.0;

    let mut record = |psi: &[Complex64], t: f64, drift: &mut f64| {
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        *drift = drift.max((norm_sq - 1.0).abs());
        times.push(t);
        survival.push(psi[0].norm_sqr());
        let p_plus: f64 = psi[1..1 + m].iter().map(|z| z.norm_sqr()).sum();
        let p_minus: f64 = psi[1 + m..].iter().map(|z| z.norm_sqr()).sum();
        family_populations.push([p_plus, p_minus]);
    };
    record(&psi, 0.0, &mut norm_drift);

    let mut k1 = vec![C_ZERO; dim];
    let mut k2 = vec![C_ZERO; dim];
    let mut k3 = vec![C_ZERO; dim];
    let mut k4 = vec![C_ZERO; dim];
    let mut scratch = vec![C_ZERO; dim];

    for step in 1..=n_steps {
        apply(&psi, &mut k1);
        for i in 0..dim {
            scratch[i] = psi[i] + k1[i] * (0.5 * h);
        }
        apply(&scratch, &mut k2);
        for i in 0..dim {
            scratch[i] = psi[i] + k2[i] * (0.5 * h);
        }
        apply(&scratch, &mut k3);
        for i in 0..dim {
            scratch[i] = psi[i] + k3[i] * h;
        }
        apply(&scratch, &mut k4);
        for i in 0..dim {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        if step == n_steps || step % stride == 0 {
            record(&psi, step as f64 * h, &mut norm_drift);
        }
    }

    Ok(BathEvolution {
        times,
        survival,
        family_populations,
        norm_drift,
    })
}
