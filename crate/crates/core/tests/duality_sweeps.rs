use duality_core::binlin::sample_full_rank;
use duality_core::duality::{
    build_case_a_state, build_case_b_state, check_smooth_uncertainty, check_uncertainty,
    coherent_measurement, csi_to_pa, ghz_state, itilde_product_state, pa_to_csi,
    random_case_a_state, random_case_b_state, random_tripartite, recover_measurement_case_a,
    recover_measurement_case_b, verify_theorem1, Case, TripartiteState,
};
use duality_core::protocols::run_csi;
use duality_core::qcore::linalg::{identity, max_abs};
use duality_core::qcore::{c64, random_povm, rng_from_seed, PureStateVector};
use nalgebra::DVector;

#[test]
fn theorem1_holds_on_random_states() {
    for seed in 0..60 {
        let d = 2 + (seed % 2) as usize;
        let s = random_tripartite(&[d], &[2], &[2], seed).unwrap();
        let r = verify_theorem1(&s).unwrap();
        assert!(r.passed, "seed {seed}: {r:?}");
    }
}

#[test]
fn maximally_entangled_ab_is_perfectly_secret() {
    let bell = PureStateVector::normalized(
        DVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]),
        vec![2, 2],
    )
    .unwrap();
    let s = TripartiteState::new(bell, 1, 1).unwrap();
    let r = verify_theorem1(&s).unwrap();
    assert!(r.epsilon < 1e-7);
    assert!(r.achieved < 1e-12);
}

#[test]
fn coherent_measurement_is_isometric() {
    let mut rng = rng_from_seed(9);
    let povm = random_povm(3, 3, &mut rng);
    let u = coherent_measurement(&povm).unwrap();
    let m = u.matrix();
    assert!(max_abs(&(m.adjoint() * m - identity(3))) < 1e-9);
}

#[test]
fn recovery_constructions_meet_their_bounds() {
    for seed in 0..40 {
        let a_dims: &[usize] = if seed % 2 == 0 { &[2] } else { &[2, 2] };
        let a = random_case_a_state(a_dims, 2, 2, seed).unwrap();
        let (povm, r) = recover_measurement_case_a(&a).unwrap();
        assert_eq!(povm.len(), 1 << a_dims.len());
        assert!(r.passed, "case a, seed {seed}: {r:?}");
        let b = random_case_b_state(a_dims, 2, 2, seed).unwrap();
        let (_, r) = recover_measurement_case_b(&b).unwrap();
        assert!(r.passed, "case b, seed {seed}: {r:?}");
    }
}

#[test]
fn fully_leaked_case_a_still_yields_a_povm() {
    let theta: Vec<_> = (0..2)
        .map(|x| PureStateVector::basis(vec![1, 2], x).unwrap())
        .collect();
    let s = build_case_a_state(&[2], &[0.5, 0.5], &theta).unwrap();
    let (povm, r) = recover_measurement_case_a(&s).unwrap();
    assert_eq!(povm.len(), 2);
    assert!(r.epsilon > 0.4);
    assert!(r.passed);
}

#[test]
fn deterministic_case_b_is_checked_numerically() {
    let phi = vec![PureStateVector::basis(vec![2, 2], 3).unwrap(); 2];
    let s = build_case_b_state(&[2], &[1.0, 0.0], &phi).unwrap();
    let (_, r) = recover_measurement_case_b(&s).unwrap();
    // A is in |0>, so its X outcome is uniform and independent of R.
    assert!(r.epsilon < 1e-12);
    assert!((r.achieved - 1.0).abs() < 1e-9);
}

#[test]
fn csi_to_pa_on_random_states() {
    for seed in 0..20 {
        let s = random_tripartite(&[2, 2, 2], &[2], &[2], 100 + seed).unwrap();
        let f = sample_full_rank(2, 3, seed).unwrap();
        let (protocol, _) = run_csi(&s.z_given_b().unwrap(), &f).unwrap();
        let r = csi_to_pa(&s, &protocol).unwrap();
        assert_eq!(r.key_length, Some(1));
        assert!(r.passed, "seed {seed}: {r:?}");
    }
}

#[test]
fn pa_to_csi_on_random_cases() {
    for seed in 0..20 {
        let ell = 1 + (seed % 2) as usize;
        let g = sample_full_rank(ell, 3, seed).unwrap();
        let a = random_case_a_state(&[2, 2, 2], 1, 2, seed).unwrap();
        let (_, r) = pa_to_csi(&a, &g, Case::A).unwrap();
        assert_eq!(r.key_length.unwrap() + r.compressed_length.unwrap(), 3);
        assert!(r.passed, "case a, seed {seed}: {r:?}");
        let b = random_case_b_state(&[2, 2, 2], 2, 2, seed).unwrap();
        let (_, r) = pa_to_csi(&b, &g, Case::B).unwrap();
        assert!(r.passed, "case b, seed {seed}: {r:?}");
    }
}

#[test]
fn uncertainty_holds_on_random_states() {
    for seed in 0..200 {
        let d = 2 + (seed % 2) as usize;
        let s = random_tripartite(&[d], &[2], &[2], seed).unwrap();
        let r = check_uncertainty(&s).unwrap();
        assert!(r.passed, "seed {seed}: {r:?}");
    }
}

#[test]
fn secret_x_does_not_force_recoverable_z() {
    // H(X|R) is maximal here, yet Z stays hidden from B.
    let r = check_uncertainty(&itilde_product_state().unwrap()).unwrap();
    assert!((r.h_x_r - 1.0).abs() < 1e-9);
    assert!((r.h_z_b - 1.0).abs() < 1e-9);
}

#[test]
fn smooth_uncertainty_is_vacuous_at_small_dimension() {
    let r = check_smooth_uncertainty(&ghz_state(2).unwrap(), 0.01).unwrap();
    assert!(r.vacuous && r.passed);
    assert!(r.h_x_r + r.h_z_b >= 1.0 - 1e-6, "{r:?}");
    for seed in 0..5 {
        let s = random_tripartite(&[2], &[2], &[2], seed).unwrap();
        let r = check_smooth_uncertainty(&s, 0.1).unwrap();
        assert!(r.passed);
    }
}
