use duality_core::binlin::{dual_basis, rank_f2, sample_full_rank, BinaryMatrix, BitVector};
use duality_core::qcore::linalg::{eigenvalues_hermitian, identity, kron_all, max_abs, ComplexMatrix, C64};
use duality_core::stabilizer::{
    build_split, commutation_phase, encoded_measurement_check, encoded_measurement_check_with_dual,
    fourier_relabel_defect, pauli_operator, PauliKind, PauliString, SubsystemSplit,
};
use proptest::prelude::*;

fn single(kind: PauliKind, on: bool) -> ComplexMatrix {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    match (kind, on) {
        (_, false) => identity(2),
        (PauliKind::Z, true) => ComplexMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
        (PauliKind::X, true) => ComplexMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
    }
}

fn pauli_oracle(p: &PauliString) -> ComplexMatrix {
    let factors: Vec<_> = (0..p.support.len()).map(|i| single(p.kind, p.support.get(i))).collect();
    kron_all(&factors)
}

fn full_rank_matrices(m: usize, n: usize) -> Vec<BinaryMatrix> {
    (0u64..1 << (m * n))
        .map(|bits| {
            let mut a = BinaryMatrix::zeros(m, n);
            for i in 0..m {
                for j in 0..n {
                    a.set(i, j, bits >> (i * n + j) & 1 == 1);
                }
            }
            a
        })
        .filter(|a| rank_f2(a) == m)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_matches_kron_oracle(bits in any::<u8>(), n in 1usize..7, x in any::<bool>()) {
        let support = BitVector::from_index(bits as usize & ((1 << n) - 1), n);
        let p = if x { PauliString::x(support) } else { PauliString::z(support) };
        prop_assert!(max_abs(&(pauli_operator(&p).unwrap() - pauli_oracle(&p))) == 0.0);
    }

    #[test]
    fn commutation_matches_matrices(g in any::<u8>(), h in any::<u8>(), n in 1usize..7) {
        let mask = (1usize << n) - 1;
        let (g, h) = (BitVector::from_index(g as usize & mask, n), BitVector::from_index(h as usize & mask, n));
        let xg = pauli_operator(&PauliString::x(g.clone())).unwrap();
        let zh = pauli_operator(&PauliString::z(h.clone())).unwrap();
        let sign = commutation_phase(&g, &h).unwrap();
        prop_assert!(max_abs(&(&xg * &zh - (&zh * &xg).scale(f64::from(sign)))) == 0.0);
    }
}

#[test]
fn trivial_operators() {
    assert_eq!(pauli_operator(&PauliString::z(BitVector::zeros(3))).unwrap(), identity(8));
    let x1 = pauli_operator(&PauliString::x(BitVector::parse("10").unwrap())).unwrap();
    assert_eq!(x1, kron_all(&[single(PauliKind::X, true), identity(2)]));
    let e1 = BitVector::unit(1, 0);
    assert_eq!(commutation_phase(&e1, &e1).unwrap(), -1);
    assert_eq!(commutation_phase(&e1, &BitVector::zeros(1)).unwrap(), 1);
}

#[test]
fn exhaustive_checks_up_to_three_qubits() {
    for n in 1..=3 {
        for m in 1..=n {
            for f in full_rank_matrices(m, n) {
                let s = build_split(&f).unwrap();
                let u = s.relabel();
                assert_eq!(u.adjoint() * &u, identity(1 << n));
                let report = encoded_measurement_check(&s).unwrap();
                assert!(report.passed(), "{:?}", report.failures);
                assert!(fourier_relabel_defect(&s).unwrap() < 1e-12);
                let amps: Vec<C64> = (0..1 << n).map(|i| C64::new(i as f64, 0.0)).collect();
                assert_eq!(s.apply_inverse(&s.apply(&amps).unwrap()).unwrap(), amps);
            }
        }
    }
}

#[test]
fn random_splits_at_four_and_five_qubits() {
    for seed in 0..10 {
        let n = 4 + (seed % 2) as usize;
        let f = sample_full_rank(1 + (seed as usize % n), n, seed).unwrap();
        let s = build_split(&f).unwrap();
        assert!(encoded_measurement_check(&s).unwrap().passed());
        assert!(fourier_relabel_defect(&s).unwrap() < 1e-12);
    }
}

#[test]
fn corrupted_dual_fails_commutation() {
    let f = BinaryMatrix::parse_rows(&["110", "011"]).unwrap();
    let s = build_split(&f).unwrap();
    let mut bad = dual_basis(&s.full()).unwrap();
    bad.set(0, 0, !bad.get(0, 0));
    let r = encoded_measurement_check_with_dual(&s, &bad).unwrap();
    assert!(r.measurement && r.conjugation);
    assert!(!r.commutation && !r.failures.is_empty());
}

#[test]
fn stabilized_subspace_dimension() {
    for seed in 0..6 {
        let n = 3 + (seed % 3) as usize;
        let m = 1 + seed as usize % n;
        let f = sample_full_rank(m, n, seed).unwrap();
        let dim = 1 << n;
        let mut proj = identity(dim);
        for j in 0..m {
            let z = pauli_operator(&PauliString::z(f.row(j).clone())).unwrap();
            proj *= (identity(dim) + z).scale(0.5);
        }
        let ones = eigenvalues_hermitian(&proj).iter().filter(|&&l| (l - 1.0).abs() < 1e-9).count();
        assert_eq!(ones, 1 << (n - m));
    }
}

#[test]
fn parity_split_reproduces_xor() {
    let s = build_split(&BinaryMatrix::parse_rows(&["11"]).unwrap()).unwrap();
    let fp = s.f_perp().clone();
    for z in 0..4usize {
        let bits = BitVector::from_index(z, 2);
        let expect = BitVector::from_bits(&[bits.get(0) ^ bits.get(1)])
            .concat(&fp.mul_vec(&bits).unwrap());
        assert_eq!(s.permutation()[z], expect.to_index());
    }
    assert_eq!(SubsystemSplit::from_text(&s.to_text()).unwrap(), s);
}
