use duality_core::qcore::linalg::{
    c64, digits, identity, index_of, kron, max_abs, partial_trace_matrix, ComplexMatrix,
    ComplexVector,
};
use duality_core::qcore::random::ginibre;
use duality_core::qcore::{
    fidelity, haar_state, haar_state_rng, measure_basis, partial_trace, purify, random_density,
    random_povm, random_unitary, rng_from_seed, trace_distance, uhlmann_isometry, Basis,
    DensityOperator, PureStateVector,
};
use proptest::prelude::*;

fn kron_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(a.nrows() * br, a.ncols() * bc);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `Tr_{traced}` by summing matrix entries whose traced digits agree.
fn partial_trace_oracle(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> ComplexMatrix {
    let kept: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let dk: usize = kept.iter().product();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let (dr, dc) = (digits(r, dims), digits(c, dims));
            let traced_equal = (0..dims.len())
                .filter(|i| !keep.contains(i))
                .all(|i| dr[i] == dc[i]);
            if traced_equal {
                let kr: Vec<usize> = keep.iter().map(|&i| dr[i]).collect();
                let kc: Vec<usize> = keep.iter().map(|&i| dc[i]).collect();
                out[(index_of(&kr, &kept), index_of(&kc, &kept))] += m[(r, c)];
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_matches_loops(seed in any::<u64>(), ar in 1usize..4, ac in 1usize..4, br in 1usize..4, bc in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let a = ginibre(ar, ac, &mut rng);
        let b = ginibre(br, bc, &mut rng);
        prop_assert!(max_abs(&(kron(&a, &b) - kron_oracle(&a, &b))) == 0.0);
    }

    #[test]
    fn partial_trace_matches_index_sum(seed in any::<u64>(), mask in 0u8..8) {
        let dims = [2usize, 3, 2];
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&dims, 3, &mut rng);
        let keep: Vec<usize> = (0..3).filter(|i| mask & (1 << i) != 0).collect();
        let (got, kept) = partial_trace_matrix(rho.matrix(), &dims, &keep).unwrap();
        prop_assert_eq!(kept, keep.iter().map(|&i| dims[i]).collect::<Vec<_>>());
        prop_assert!(max_abs(&(got - partial_trace_oracle(rho.matrix(), &dims, &keep))) < 1e-12);
    }

    #[test]
    fn permutation_round_trips(seed in any::<u64>()) {
        let psi = haar_state(&[2, 3, 4], seed);
        let back = psi.permute(&[2, 0, 1]).unwrap().permute(&[1, 2, 0]).unwrap();
        prop_assert_eq!(back.dims(), psi.dims());
        prop_assert!((back.amplitudes() - psi.amplitudes()).norm() == 0.0);
    }

    #[test]
    fn fidelity_trace_distance_bounds(seed in any::<u64>(), d in 2usize..5, rank in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&[d], rank.min(d), &mut rng);
        let sigma = random_density(&[d], d, &mut rng);
        let f = fidelity(&rho, &sigma).unwrap();
        let t = trace_distance(&rho, &sigma).unwrap();
        prop_assert!(1.0 - f <= t + 1e-9);
        prop_assert!(t <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }

    #[test]
    fn purification_reduces_back(seed in any::<u64>(), rank in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&[2, 2], rank, &mut rng);
        let psi = purify(&rho);
        prop_assert_eq!(*psi.dims().last().unwrap(), rank);
        let back = psi.reduced(&[0, 1]).unwrap();
        prop_assert!(max_abs(&(back.matrix() - rho.matrix())) < 1e-10);
    }

    #[test]
    fn uhlmann_attains_marginal_fidelity(seed in any::<u64>()) {
        let psi = haar_state(&[2, 3], seed);
        let phi = haar_state(&[2, 3], seed ^ 0xA5A5);
        let u = uhlmann_isometry(&psi, &phi, &[0]).unwrap();
        let f = fidelity(&psi.reduced(&[0]).unwrap(), &phi.reduced(&[0]).unwrap()).unwrap();
        prop_assert!((u.overlap - f).abs() < 1e-10);
        // (1 ⊗ W)|φ> overlaps |ψ> with modulus F
        let w = u.phi_to_psi_map();
        let moved = kron(&identity(2), w) * phi.amplitudes();
        let ov = psi.amplitudes().dotc(&moved).norm();
        prop_assert!((ov - f).abs() < 1e-10);
    }
}

#[test]
fn pure_state_fidelity_is_overlap() {
    let a = haar_state(&[3], 1);
    let b = haar_state(&[3], 2);
    let f = fidelity(&a.density(), &b.density()).unwrap();
    assert!((f - a.amplitudes().dotc(b.amplitudes()).norm()).abs() < 1e-10);
}

#[test]
fn haar_amplitudes_average_to_uniform() {
    let d = 4;
    let mut rng = rng_from_seed(7);
    let trials = 4000;
    let mean: f64 = (0..trials)
        .map(|_| haar_state_rng(&[d], &mut rng).amplitudes()[0].norm_sqr())
        .sum::<f64>()
        / trials as f64;
    // Var |a_0|² = (d−1)/(d²(d+1)); five standard errors.
    let se = ((d - 1) as f64 / (d * d * (d + 1)) as f64 / trials as f64).sqrt();
    assert!((mean - 0.25).abs() < 5.0 * se, "mean {mean}");
}

#[test]
fn random_unitaries_and_povms_are_valid() {
    let mut rng = rng_from_seed(3);
    let u = random_unitary(5, &mut rng);
    assert!(max_abs(&(u.adjoint() * &u - identity(5))) < 1e-12);
    let p = random_povm(3, 4, &mut rng);
    let total = p.elements().iter().fold(ComplexMatrix::zeros(3, 3), |a, e| a + e);
    assert!(max_abs(&(total - identity(3))) < 1e-9);
}

#[test]
fn fourier_measurement_of_basis_state_is_uniform() {
    let psi = PureStateVector::basis(vec![3, 2], 2).unwrap();
    let cq = measure_basis(&psi, Basis::Fourier, 0).unwrap();
    for &p in cq.probs() {
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn partial_trace_of_product_state() {
    let a = DensityOperator::maximally_mixed(vec![2]);
    let b = PureStateVector::new(
        ComplexVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]),
        vec![2],
    )
    .unwrap()
    .density();
    let ab = a.tensor(&b);
    let got = partial_trace(&ab, &[1]).unwrap();
    assert!(max_abs(&(got.matrix() - b.matrix())) < 1e-14);
}
