//! Index algebra for N copies of a d-level system and construction of the
//! inter-copy collapse jump operators plus per-copy objective-collapse
//! operators.
//!
//! Copy 1 is the leftmost (slowest-varying) tensor factor throughout, and a
//! basis label s = (s_1, ..., s_N) maps to the flat index
//! sum_j s_j d^(N-j). For qubits symbol 0 is |+> and symbol 1 is |->.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmath::{
    checked_power, embed, ComplexMatrix, DensityMatrix, Operator, C_ZERO,
};

/// N copies of a d-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CopySpace {
    n_copies: usize,
    local_dim: usize,
}

impl CopySpace {
    pub fn new(n_copies: usize, local_dim: usize) -> Result<Self> {
        if n_copies == 0 {
            return Err(Error::InvalidParameter {
                name: "n_copies",
                constraint: "at least one copy",
                got: 0.0,
            });
        }
        if local_dim < 2 {
            return Err(Error::InvalidParameter {
                name: "local_dim",
                constraint: "at least two levels",
                got: local_dim as f64,
            });
        }
        // Fail early if even a ket cannot be stored densely.
        checked_power(local_dim, n_copies, "CopySpace::new")?;
        Ok(Self {
            n_copies,
            local_dim,
        })
    }

    pub fn qubits(n_copies: usize) -> Result<Self> {
        Self::new(n_copies, 2)
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// d^N.
    pub fn total_dim(&self) -> usize {
        self.local_dim.pow(self.n_copies as u32)
    }

    /// Flat index of the pointer product |m m ... m>.
    pub fn pointer_product_index(&self, m: usize) -> usize {
        let mut idx = 0;
        for _ in 0..self.n_copies {
            idx = idx * self.local_dim + m;
        }
        idx
    }

    /// All basis labels in flat-index order.
    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.total_dim()).map(move |i| self.label_from_index(i))
    }

    pub fn label_from_index(&self, mut index: usize) -> BasisLabel {
        let mut symbols = vec![0u8; self.n_copies];
        for j in (0..self.n_copies).rev() {
            symbols[j] = (index % self.local_dim) as u8;
            index /= self.local_dim;
        }
        BasisLabel { symbols }
    }
}

/// A product basis label s = (s_1, ..., s_N), each entry in 0..d.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    symbols: Vec<u8>,
}

impl BasisLabel {
    pub fn new(symbols: Vec<u8>, space: &CopySpace) -> Result<Self> {
        if symbols.len() != space.n_copies() {
            return Err(Error::DimensionMismatch {
                context: "BasisLabel::new",
                expected: space.n_copies(),
                got: symbols.len(),
            });
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= space.local_dim()) {
            return Err(Error::IndexOutOfRange {
                context: "BasisLabel::new",
                index: bad as usize,
                limit: space.local_dim(),
            });
        }
        Ok(Self { symbols })
    }

    /// Qubit label from a +/- string, e.g. "+-+".
    pub fn from_signs(signs: &str, space: &CopySpace) -> Result<Self> {
        let symbols = signs
            .chars()
            .map(|c| match c {
                '+' => Ok(0u8),
                '-' => Ok(1u8),
                _ => Err(Error::InvalidParameter {
                    name: "signs",
                    constraint: "characters '+' or '-'",
                    got: f64::NAN,
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(symbols, space)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn n_copies(&self) -> usize {
        self.symbols.len()
    }

    /// Flat index with copy 1 most significant.
    pub fn flat_index(&self, space: &CopySpace) -> usize {
        self.symbols
            .iter()
            .fold(0usize, |acc, &s| acc * space.local_dim() + s as usize)
    }

    /// N_m: number of copies carrying pointer symbol m.
    pub fn occupation(&self, m: usize) -> usize {
        self.symbols.iter().filter(|&&s| s as usize == m).count()
    }

    /// Qubit signed sum sum_j s_j with |+> = +1 and |-> = -1.
    pub fn signed_sum(&self) -> i64 {
        self.symbols
            .iter()
            .map(|&s| if s == 0 { 1i64 } else { -1 })
            .sum()
    }

    /// The qubit convention N_(+/-) = N +/- sum_j s_j, which is twice the
    /// plain occupation count.
    pub fn qubit_occupation(&self, m: usize) -> usize {
        debug_assert!(m < 2);
        let n = self.symbols.len() as i64;
        let signed = self.signed_sum();
        (if m == 0 { n + signed } else { n - signed }) as usize
    }
}

/// Which occupation enters the jump amplitude alpha sqrt(w_m(s)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseWeight {
    /// w_m(s) = N_m, the plain count; total decay rate N alpha^2.
    Count,
    /// w_m(s) = N +/- sum_j s_j (qubits only), twice the count; total decay
    /// rate 2 N alpha^2.
    QubitSigned,
}

impl CollapseWeight {
    pub fn weight(&self, occupation_count: usize) -> f64 {
        match self {
            CollapseWeight::Count => occupation_count as f64,
            CollapseWeight::QubitSigned => 2.0 * occupation_count as f64,
        }
    }
}

/// A rank-1 jump operator amplitude |target><source| between computational
/// basis states of the pointer frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneJump {
    pub target: usize,
    pub source: usize,
    pub amplitude: f64,
}

impl RankOneJump {
    /// Dense matrix in the pointer frame.
    pub fn dense(&self, dim: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim);
        m.set(self.target, self.source, Complex64::new(self.amplitude, 0.0));
        m
    }
}

/// The inter-copy collapse model: jump operators
/// L^m_s = alpha sqrt(w_m(s)) |m...m><s| for every pointer symbol m and
/// basis label s, expressed in the local pointer basis.
#[derive(Debug, Clone)]
pub struct CollapseModel {
    space: CopySpace,
    alpha: f64,
    weight: CollapseWeight,
    /// Local unitary whose columns are the pointer states; `None` means the
    /// computational basis.
    pointer_basis: Option<ComplexMatrix>,
}

impl CollapseModel {
    /// Qubit model with the signed-sum weight convention (total decay rate
    /// 2 N alpha^2).
    pub fn qubit(n_copies: usize, alpha: f64) -> Result<Self> {
        Self::with_weight(CopySpace::qubits(n_copies)?, alpha, CollapseWeight::QubitSigned)
    }

    /// General d-level model with the plain occupation count (total decay
    /// rate N alpha^2).
    pub fn qudit(n_copies: usize, local_dim: usize, alpha: f64) -> Result<Self> {
        Self::with_weight(
            CopySpace::new(n_copies, local_dim)?,
            alpha,
            CollapseWeight::Count,
        )
    }

    pub fn with_weight(space: CopySpace, alpha: f64, weight: CollapseWeight) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                constraint: "alpha > 0",
                got: alpha,
            });
        }
        if weight == CollapseWeight::QubitSigned && space.local_dim() != 2 {
            return Err(Error::InvalidParameter {
                name: "weight",
                constraint: "QubitSigned requires local_dim = 2",
                got: space.local_dim() as f64,
            });
        }
        Ok(Self {
            space,
            alpha,
            weight,
            pointer_basis: None,
        })
    }

    /// Use the columns of `basis` as the local pointer states. `basis` must
    /// be unitary.
    pub fn with_pointer_basis(mut self, basis: ComplexMatrix) -> Result<Self> {
        if basis.dim() != self.space.local_dim() {
            return Err(Error::DimensionMismatch {
                context: "CollapseModel::with_pointer_basis",
                expected: self.space.local_dim(),
                got: basis.dim(),
            });
        }
        let gram = basis.conj_transpose().matmul(&basis);
        let defect = gram.max_abs_diff(&ComplexMatrix::identity(basis.dim()));
        if defect > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "pointer_basis",
                constraint: "unitary columns (defect <= 1e-12)",
                got: defect,
            });
        }
        self.pointer_basis = Some(basis);
        Ok(self)
    }

    pub fn space(&self) -> &CopySpace {
        &self.space
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weight(&self) -> CollapseWeight {
        self.weight
    }

    pub fn pointer_basis(&self) -> Option<&ComplexMatrix> {
        self.pointer_basis.as_ref()
    }

    /// Total number of generated operators d * d^N, counting the
    /// zero-amplitude ones that [`Self::collapse_lindblads`] prunes.
    pub fn operator_count(&self) -> usize {
        self.space.local_dim() * self.space.total_dim()
    }

    /// Uniform decay rate sum_m w_m(s) alpha^2 of every basis state:
    /// N alpha^2 for `Count`, 2 N alpha^2 for `QubitSigned`.
    pub fn total_decay_rate(&self) -> f64 {
        let n = self.space.n_copies() as f64;
        match self.weight {
            CollapseWeight::Count => n * self.alpha * self.alpha,
            CollapseWeight::QubitSigned => 2.0 * n * self.alpha * self.alpha,
        }
    }

    /// Jump amplitude alpha sqrt(w_m(s)) for pointer m and source label s.
    pub fn amplitude(&self, label: &BasisLabel, m: usize) -> f64 {
        self.alpha * self.weight.weight(label.occupation(m)).sqrt()
    }

    /// The structural rank-1 jump operators, in the pointer frame, with
    /// zero-amplitude entries pruned (their count is still reported by
    /// [`Self::operator_count`]).
    pub fn collapse_lindblads(&self) -> Vec<RankOneJump> {
        let d = self.space.local_dim();
        let mut jumps = Vec::with_capacity(self.space.total_dim() * d);
        for label in self.space.labels() {
            let source = label.flat_index(&self.space);
            for m in 0..d {
                let amplitude = self.amplitude(&label, m);
                if amplitude > 0.0 {
                    jumps.push(RankOneJump {
                        target: self.space.pointer_product_index(m),
                        source,
                        amplitude,
                    });
                }
            }
        }
        jumps
    }

    /// Dense jump operators in the computational frame (pointer rotation
    /// applied when one is set). Mostly for oracle comparisons; the
    /// structured evolution never materializes these.
    pub fn dense_jump_operators(&self) -> Result<Vec<ComplexMatrix>> {
        let dim = self.space.total_dim();
        let rotation = self.frame_rotation()?;
        Ok(self
            .collapse_lindblads()
            .iter()
            .map(|j| {
                let dense = j.dense(dim);
                match &rotation {
                    Some(v) => v.matmul(&dense).matmul(&v.conj_transpose()),
                    None => dense,
                }
            })
            .collect())
    }

    /// V = U^(tensor N) mapping the pointer frame to the computational
    /// frame, or `None` when they coincide.
    pub fn frame_rotation(&self) -> Result<Option<ComplexMatrix>> {
        match &self.pointer_basis {
            None => Ok(None),
            Some(u) => {
                let mut v = u.clone();
                for _ in 1..self.space.n_copies() {
                    v = v.kron(u)?;
                }
                Ok(Some(v))
            }
        }
    }
}

/// Embed a local operator on copy `copy_index` (1-based) of the space,
/// identity elsewhere.
pub fn embed_on_copy(local: &Operator, copy_index: usize, space: &CopySpace) -> Result<Operator> {
    if local.dim() != space.local_dim() {
        return Err(Error::DimensionMismatch {
            context: "embed_on_copy",
            expected: space.local_dim(),
            got: local.dim(),
        });
    }
    embed(local, copy_index, space.n_copies())
}

/// Per-copy objective-collapse operators gamma P^(j)_m: one embedded local
/// pointer projector for every copy j and pointer symbol m (N * d total).
pub fn objective_collapse_lindblads(space: &CopySpace, gamma: f64) -> Result<Vec<Operator>> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            constraint: "gamma >= 0",
            got: gamma,
        });
    }
    let d = space.local_dim();
    let mut ops = Vec::with_capacity(space.n_copies() * d);
    for j in 1..=space.n_copies() {
        for m in 0..d {
            let mut local = ComplexMatrix::zeros(d);
            local.set(m, m, Complex64::new(gamma, 0.0));
            let local = Operator::with_flags(local, true, true);
            ops.push(embed(&local, j, space.n_copies())?);
        }
    }
    Ok(ops)
}

/// N-fold tensor power of a local state.
pub fn product_state(local: &DensityMatrix, space: &CopySpace) -> Result<DensityMatrix> {
    if local.dim() != space.local_dim() {
        return Err(Error::DimensionMismatch {
            context: "product_state",
            expected: space.local_dim(),
            got: local.dim(),
        });
    }
    let mut matrix = local.matrix().clone();
    for _ in 1..space.n_copies() {
        matrix = matrix.kron(local.matrix())?;
    }
    DensityMatrix::from_positive(Operator::with_flags(matrix, true, true))
}

/// Sum of the same local Hamiltonian embedded on every copy.
pub fn copy_hamiltonian(local_h: &Operator, space: &CopySpace) -> Result<Operator> {
    if !local_h.is_hermitian() {
        return Err(Error::NotHermitian {
            residual: local_h.matrix().hermitian_residual(),
            tolerance: crate::config::TOL.hermitian_residual,
        });
    }
    if local_h.dim() != space.local_dim() {
        return Err(Error::DimensionMismatch {
            context: "copy_hamiltonian",
            expected: space.local_dim(),
            got: local_h.dim(),
        });
    }
    let dim = checked_power(space.local_dim(), space.n_copies(), "copy_hamiltonian")?;
    let mut total = ComplexMatrix::zeros(dim);
    for j in 1..=space.n_copies() {
        total = total.add(embed(local_h, j, space.n_copies())?.matrix());
    }
    Ok(Operator::with_flags(total, true, false))
}

/// Apply a rank-1 jump to a basis ket: |s'> maps to amplitude |target> when
/// s' = source, and to zero otherwise. Used by tests to confirm every
/// collapse operator sends basis kets to pointer products or kills them.
pub fn apply_jump_to_basis(jump: &RankOneJump, basis_index: usize, dim: usize) -> Vec<Complex64> {
    let mut out = vec![C_ZERO; dim];
    if basis_index == jump.source {
        out[jump.target] = Complex64::new(jump.amplitude, 0.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{pauli, Ket, PauliAxis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn occupation_examples() {
        let space = CopySpace::qubits(4).unwrap();
        let all_plus = BasisLabel::from_signs("++++", &space).unwrap();
        assert_eq!(all_plus.occupation(0), 4);
        assert_eq!(all_plus.qubit_occupation(0), 8); // N_+ = 2N
        let alternating = BasisLabel::from_signs("+-+-", &space).unwrap();
        assert_eq!(alternating.occupation(1), 2);
        assert_eq!(alternating.qubit_occupation(0), 4);
        assert_eq!(alternating.qubit_occupation(1), 4);
    }

    #[test]
    fn occupation_partitions_n() {
        let space = CopySpace::new(3, 3).unwrap();
        for label in space.labels() {
            let total: usize = (0..3).map(|m| label.occupation(m)).sum();
            assert_eq!(total, 3);
        }
    }

    #[test]
    fn flat_index_bijection() {
        let space = CopySpace::new(3, 3).unwrap();
        for i in 0..space.total_dim() {
            let label = space.label_from_index(i);
            assert_eq!(label.flat_index(&space), i);
        }
        // Copy 1 most significant: (1, 0, 0) over qutrits is index 9.
        let label = BasisLabel::new(vec![1, 0, 0], &space).unwrap();
        assert_eq!(label.flat_index(&space), 9);
    }

    #[test]
    fn single_qubit_jump_family() {
        let model = CollapseModel::qubit(1, 0.5).unwrap();
        assert_eq!(model.operator_count(), 4);
        let jumps = model.collapse_lindblads();
        // Two zero-amplitude operators pruned.
        assert_eq!(jumps.len(), 2);
        // L^+ from |+>: amplitude alpha sqrt(2).
        let from_plus: Vec<_> = jumps.iter().filter(|j| j.source == 0).collect();
        assert_eq!(from_plus.len(), 1);
        assert_eq!(from_plus[0].target, 0);
        assert!((from_plus[0].amplitude - 0.5 * 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn two_copy_amplitudes() {
        let model = CollapseModel::qubit(2, 1.0).unwrap();
        assert_eq!(model.operator_count(), 8); // d * d^N = 2^(N+1)
        let space = *model.space();
        let s = BasisLabel::from_signs("+-", &space).unwrap();
        // N_+ = N_- = 2, so both jumps carry alpha sqrt(2).
        assert!((model.amplitude(&s, 0) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((model.amplitude(&s, 1) - 2.0f64.sqrt()).abs() < 1e-15);
        let jumps = model.collapse_lindblads();
        let from_s: Vec<_> = jumps
            .iter()
            .filter(|j| j.source == s.flat_index(&space))
            .collect();
        assert_eq!(from_s.len(), 2);
        assert!(from_s.iter().any(|j| j.target == 0));
        assert!(from_s.iter().any(|j| j.target == 3));
    }

    #[test]
    fn jump_normalization_sums() {
        // sum_L L^dag L = 2 N alpha^2 I (qubit convention) and N alpha^2 I
        // (count convention), checked by dense summation.
        for n in 1..=4 {
            let model = CollapseModel::qubit(n, 0.7).unwrap();
            let dim = model.space().total_dim();
            let mut sum = ComplexMatrix::zeros(dim);
            for l in model.dense_jump_operators().unwrap() {
                sum = sum.add(&l.conj_transpose().matmul(&l));
            }
            let expected = ComplexMatrix::identity(dim)
                .scale(Complex64::new(model.total_decay_rate(), 0.0));
            assert!(sum.max_abs_diff(&expected) < 1e-12, "qubit n = {n}");
        }
        let model = CollapseModel::qudit(2, 3, 0.7).unwrap();
        let dim = model.space().total_dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for l in model.dense_jump_operators().unwrap() {
            sum = sum.add(&l.conj_transpose().matmul(&l));
        }
        let expected =
            ComplexMatrix::identity(dim).scale(Complex64::new(model.total_decay_rate(), 0.0));
        assert!(sum.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn jumps_map_basis_to_pointer_or_zero() {
        let model = CollapseModel::qubit(3, 1.0).unwrap();
        let space = *model.space();
        let pointers = [space.pointer_product_index(0), space.pointer_product_index(1)];
        for jump in model.collapse_lindblads() {
            for basis in 0..space.total_dim() {
                let image = apply_jump_to_basis(&jump, basis, space.total_dim());
                let support: Vec<usize> = image
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| z.norm() > 0.0)
                    .map(|(i, _)| i)
                    .collect();
                assert!(support.is_empty() || (support.len() == 1 && pointers.contains(&support[0])));
            }
        }
    }

    #[test]
    fn objective_collapse_family() {
        let space = CopySpace::qubits(1).unwrap();
        let ops = objective_collapse_lindblads(&space, 0.3).unwrap();
        assert_eq!(ops.len(), 2);
        // gamma |+><+| and gamma |-><-|.
        assert!((ops[0].matrix().get(0, 0).re - 0.3).abs() < 1e-15);
        assert!((ops[1].matrix().get(1, 1).re - 0.3).abs() < 1e-15);
        // Idempotent up to the gamma scaling.
        for op in &ops {
            let scaled = op.matrix().scale(Complex64::new(1.0 / 0.3, 0.0));
            assert!(scaled.matmul(&scaled).max_abs_diff(&scaled) < 1e-12);
        }
    }

    #[test]
    fn objective_collapse_selects_pointer_symbol() {
        // P^(j)_m acting on a basis ket keeps it iff s_j = m.
        let space = CopySpace::qubits(2).unwrap();
        let ops = objective_collapse_lindblads(&space, 1.0).unwrap();
        for (k, op) in ops.iter().enumerate() {
            let copy = k / 2 + 1;
            let m = k % 2;
            for label in space.labels() {
                let idx = label.flat_index(&space);
                let keeps = label.symbols()[copy - 1] as usize == m;
                let diag = op.matrix().get(idx, idx).re;
                assert_eq!(diag > 0.5, keeps);
            }
        }
    }

    #[test]
    fn product_state_examples() {
        let space = CopySpace::qubits(2).unwrap();
        let plus = Ket::basis(2, 0).unwrap();
        let local = DensityMatrix::pure(&plus).unwrap();
        let rho = product_state(&local, &space).unwrap();
        assert!((rho.population(0) - 1.0).abs() < 1e-15);

        // Purity multiplies: purity(rho^(x) N) = purity(rho)^N.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let local = crate::qmath::random::density(2, &mut rng);
            let space = CopySpace::qubits(3).unwrap();
            let rho = product_state(&local, &space).unwrap();
            let expected = local.purity().powi(3);
            assert!((rho.purity() - expected).abs() < 1e-10);
        }

        // N = 1 is the identity map.
        let space1 = CopySpace::qubits(1).unwrap();
        let rho1 = product_state(&local_qubit(), &space1).unwrap();
        assert!(rho1.matrix().max_abs_diff(local_qubit().matrix()) < 1e-15);
    }

    fn local_qubit() -> DensityMatrix {
        let amps = vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
        ];
        DensityMatrix::pure(&Ket::normalized(amps).unwrap()).unwrap()
    }

    #[test]
    fn copy_hamiltonian_spectrum() {
        let space = CopySpace::qubits(2).unwrap();
        let h = copy_hamiltonian(&pauli(PauliAxis::Z), &space).unwrap();
        let (values, _) = h.eig_hermitian().unwrap();
        let expected = [-2.0, 0.0, 0.0, 2.0];
        for (v, e) in values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }

        let space1 = CopySpace::qubits(1).unwrap();
        let h1 = copy_hamiltonian(&pauli(PauliAxis::Z), &space1).unwrap();
        assert!(h1.matrix().max_abs_diff(pauli(PauliAxis::Z).matrix()) < 1e-15);
    }

    #[test]
    fn embed_on_copy_checks_local_dim() {
        let space = CopySpace::qubits(2).unwrap();
        let e = embed_on_copy(&pauli(PauliAxis::Z), 1, &space).unwrap();
        assert_eq!(e.dim(), 4);
        assert!((e.matrix().get(3, 3).re + 1.0).abs() < 1e-15);
        let qutrit_space = CopySpace::new(2, 3).unwrap();
        assert!(embed_on_copy(&pauli(PauliAxis::Z), 1, &qutrit_space).is_err());
    }

    #[test]
    fn permutation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let space = CopySpace::new(3, 2).unwrap();
        let local = crate::qmath::random::density(2, &mut rng);
        let rho = product_state(&local, &space).unwrap();
        let h = copy_hamiltonian(&crate::qmath::random::hermitian(2, &mut rng), &space).unwrap();

        // Swap copies 1 and 3 on the flat index.
        let swap = |i: usize| -> usize {
            let label = space.label_from_index(i);
            let s = label.symbols();
            let swapped = BasisLabel::new(vec![s[2], s[0], s[1]], &space);
            // full cyclic permutation; invariance must hold for any relabeling
            swapped.unwrap().flat_index(&space)
        };
        for i in 0..space.total_dim() {
            for j in 0..space.total_dim() {
                let a = rho.matrix().get(i, j);
                let b = rho.matrix().get(swap(i), swap(j));
                assert!((a - b).norm() < 1e-12);
                let ha = h.matrix().get(i, j);
                let hb = h.matrix().get(swap(i), swap(j));
                assert!((ha - hb).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cap_errors() {
        assert!(CopySpace::qubits(13).is_err());
        assert!(CopySpace::qubits(12).is_ok());
    }
}
