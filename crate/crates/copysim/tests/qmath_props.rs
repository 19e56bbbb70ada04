//! Property tests for the algebraic invariants of the math layer.

use copysim::copyspace::{BasisLabel, CopySpace};
use copysim::povm::{unsharp_feasible, UnsharpPair};
use copysim::qmath::{
    embed, expectation, pauli, random, tensor, ComplexMatrix, DensityMatrix, Operator, PauliAxis,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #[test]
    fn tensor_is_associative(seed in 0u64..500) {
        let mut rng = seeded(seed);
        let a = random::general(2, &mut rng);
        let b = random::general(3, &mut rng);
        let c = random::general(2, &mut rng);
        let left = tensor(&[tensor(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = tensor(&[a, tensor(&[b, c]).unwrap()]).unwrap();
        prop_assert!(left.matrix().max_abs_diff(right.matrix()) <= 1e-12);
    }

    #[test]
    fn tensor_trace_multiplies(seed in 0u64..500) {
        let mut rng = seeded(seed.wrapping_add(1000));
        let a = random::general(2, &mut rng);
        let b = random::general(2, &mut rng);
        let product = tensor(&[a.clone(), b.clone()]).unwrap();
        let expected = a.matrix().trace() * b.matrix().trace();
        prop_assert!((product.matrix().trace() - expected).norm() <= 1e-10);
    }

    #[test]
    fn eig_reconstructs_hermitian(seed in 0u64..200, dim in 2usize..7) {
        let mut rng = seeded(seed.wrapping_add(2000));
        let a = random::hermitian(dim, &mut rng);
        let (values, vectors) = a.eig_hermitian().unwrap();
        let mut rebuilt = ComplexMatrix::zeros(dim);
        for (k, &value) in values.iter().enumerate() {
            for i in 0..dim {
                for j in 0..dim {
                    rebuilt.add_to(
                        i,
                        j,
                        vectors.get(i, k) * vectors.get(j, k).conj()
                            * Complex64::new(value, 0.0),
                    );
                }
            }
        }
        prop_assert!(rebuilt.max_abs_diff(a.matrix()) <= 1e-9);
        // A v = lambda v for each column.
        for (k, &value) in values.iter().enumerate() {
            let v: Vec<Complex64> = (0..dim).map(|i| vectors.get(i, k)).collect();
            let av = a.matrix().matvec(&v);
            for i in 0..dim {
                prop_assert!((av[i] - v[i] * Complex64::new(value, 0.0)).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn embed_preserves_flags_and_disjoint_slots_commute(seed in 0u64..300) {
        let mut rng = seeded(seed.wrapping_add(3000));
        let a = random::hermitian(2, &mut rng);
        let b = random::general(2, &mut rng);
        let ea = embed(&a, 1, 3).unwrap();
        let eb = embed(&b, 2, 3).unwrap();
        prop_assert!(ea.is_hermitian());
        prop_assert!(!eb.is_hermitian());
        let commutator = ea.matrix().commutator(eb.matrix());
        prop_assert!(commutator.max_abs() <= 1e-12);

        let positive = DensityMatrix::maximally_mixed(2);
        let ep = embed(positive.op(), 3, 3).unwrap();
        prop_assert!(ep.is_positive());
    }

    #[test]
    fn expectation_is_bilinear(seed in 0u64..300) {
        let mut rng = seeded(seed.wrapping_add(4000));
        let m1 = random::hermitian(3, &mut rng);
        let m2 = random::hermitian(3, &mut rng);
        let rho = random::density(3, &mut rng);
        let x = 0.37;
        let combined = Operator::hermitian(
            m1.matrix().scale(Complex64::new(x, 0.0)).add(m2.matrix()),
        )
        .unwrap();
        let lhs = expectation(&combined, &rho).unwrap();
        let rhs = expectation(&m1, &rho).unwrap() * Complex64::new(x, 0.0)
            + expectation(&m2, &rho).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10);

        // Hermitian observable on a state: real expectation.
        prop_assert!(expectation(&m1, &rho).unwrap().im.abs() <= 1e-12);
    }

    #[test]
    fn occupation_partitions_every_label(index in 0usize..81) {
        let space = CopySpace::new(4, 3).unwrap();
        let label = space.label_from_index(index);
        let total: usize = (0..3).map(|m| label.occupation(m)).sum();
        prop_assert_eq!(total, 4);
        prop_assert_eq!(label.flat_index(&space), index);
    }

    #[test]
    fn qubit_occupation_doubles_count(index in 0usize..64) {
        let space = CopySpace::qubits(6).unwrap();
        let label = space.label_from_index(index);
        for m in 0..2 {
            prop_assert_eq!(label.qubit_occupation(m), 2 * label.occupation(m));
        }
    }

    #[test]
    fn feasibility_is_monotone(e in 0.0f64..1.0, d in 0.0f64..1.0, shrink in 0.0f64..1.0) {
        let pair = UnsharpPair::new(e, d).unwrap();
        if unsharp_feasible(pair) {
            let smaller = UnsharpPair::new(e * shrink, d * shrink).unwrap();
            prop_assert!(unsharp_feasible(smaller));
        }
    }

    #[test]
    fn pauli_algebra(axis in prop_oneof![Just(PauliAxis::X), Just(PauliAxis::Y), Just(PauliAxis::Z)]) {
        let s = pauli(axis);
        let squared = s.matrix().matmul(s.matrix());
        prop_assert!(squared.max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-15);
        prop_assert!(s.matrix().trace().norm() <= 1e-15);
    }

    #[test]
    fn basis_label_round_trip(signs in proptest::collection::vec(prop_oneof![Just('+'), Just('-')], 5)) {
        let space = CopySpace::qubits(5).unwrap();
        let text: String = signs.iter().collect();
        let label = BasisLabel::from_signs(&text, &space).unwrap();
        let index = label.flat_index(&space);
        prop_assert_eq!(space.label_from_index(index), label);
    }
}
