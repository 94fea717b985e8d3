use duality_core::binlin::{sample_full_rank, sample_uniform_linear, BinaryMatrix, BitVector};
use duality_core::entropy::{cq_min_entropy, guessing_probability, smooth_max_entropy, smooth_min_entropy, SmoothingBall};
use duality_core::protocols::{
    csi_length_bound, hash_cq, p_guess_with, p_secure, pa_length_bound, pa_length_from_entropy, pgm,
    run_csi, run_pa, PaProtocol,
};
use duality_core::qcore::linalg::{c64, eigh, ComplexMatrix, ComplexVector};
use duality_core::qcore::{
    haar_state, random_density, rng_from_seed, trace_distance, CqState, DensityOperator,
    PureStateVector,
};

fn ket(a: f64) -> ComplexVector {
    ComplexVector::from_vec(vec![c64(a.cos(), 0.0), c64(a.sin(), 0.0)])
}

/// `n` i.i.d. copies of `p_z |z><z| ⊗ |φ_z><φ_z|` with `φ₀ = |0>` and
/// `φ₁ = cos a|0> + sin a|1>`.
fn iid_cq(p: [f64; 2], a: f64, n: usize) -> CqState {
    let phis = [ket(0.0), ket(a)];
    let mut probs = Vec::new();
    let mut conds = Vec::new();
    for z in 0..1usize << n {
        let mut v = ComplexVector::from_vec(vec![c64(1.0, 0.0)]);
        let mut pr = 1.0;
        for i in 0..n {
            let b = (z >> (n - 1 - i)) & 1;
            pr *= p[b];
            v = duality_core::qcore::linalg::kron_vec(&v, &phis[b]);
        }
        probs.push(pr);
        conds.push(PureStateVector::new(v, vec![1 << n]).unwrap().density());
    }
    CqState::new(probs, conds).unwrap()
}

/// Block-diagonal `Σ_z p_z |z><z| ⊗ φ_z` assembled entry by entry.
fn assemble(probs: &[f64], blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let ds = blocks[0].nrows();
    let d = probs.len();
    let mut m = ComplexMatrix::zeros(d * ds, d * ds);
    for z in 0..d {
        for i in 0..ds {
            for j in 0..ds {
                m[(z * ds + i, z * ds + j)] = blocks[z][(i, j)] * probs[z];
            }
        }
    }
    m
}

fn p_secure_oracle(probs: &[f64], blocks: &[ComplexMatrix]) -> f64 {
    let d = probs.len();
    let ds = blocks[0].nrows();
    let avg = blocks.iter().zip(probs).fold(ComplexMatrix::zeros(ds, ds), |a, (b, &p)| a + b.scale(p));
    let real = DensityOperator::new(assemble(probs, blocks), vec![d * ds]).unwrap();
    let ideal = DensityOperator::new(
        assemble(&vec![1.0 / d as f64; d], &vec![avg; d]),
        vec![d * ds],
    )
    .unwrap();
    trace_distance(&real, &ideal).unwrap()
}

#[test]
fn p_secure_matches_assembled_trace_distance() {
    let mut rng = rng_from_seed(31);
    for _ in 0..10 {
        let conds: Vec<_> = (0..3).map(|_| random_density(&[2], 2, &mut rng)).collect();
        let probs = vec![0.5, 0.3, 0.2];
        let cq = CqState::new(probs.clone(), conds.clone()).unwrap();
        let blocks: Vec<_> = conds.iter().map(|c| c.matrix().clone()).collect();
        assert!((p_secure(&cq) - p_secure_oracle(&probs, &blocks)).abs() < 1e-12);
    }
    let phi = random_density(&[2], 2, &mut rng);
    let ideal = CqState::new(vec![0.5, 0.5], vec![phi.clone(), phi.clone()]).unwrap();
    assert!(p_secure(&ideal) < 1e-15);
    let det = CqState::new(vec![1.0, 0.0], vec![phi.clone(), phi]).unwrap();
    assert!((p_secure(&det) - 0.5).abs() < 1e-15);
}

#[test]
fn pgm_against_helstrom() {
    for a in [0.3f64, 0.9, 1.4] {
        let states: Vec<_> = [0.0, a]
            .iter()
            .map(|&t| PureStateVector::new(ket(t), vec![2]).unwrap().density())
            .collect();
        let cq = CqState::new(vec![0.5, 0.5], states).unwrap();
        let helstrom = 0.5 * (1.0 + (1.0 - a.cos().powi(2)).sqrt());
        let pg = p_guess_with(&cq, &pgm(&cq)).unwrap();
        assert!(pg >= helstrom * helstrom - 1e-12 && pg <= helstrom + 1e-12);
        assert!((guessing_probability(&cq).unwrap().0 - helstrom).abs() < 1e-7);
    }
}

#[test]
fn pgm_on_orthogonal_states_is_perfect() {
    let states: Vec<_> = (0..3).map(|i| PureStateVector::basis(vec![3], i).unwrap().density()).collect();
    let cq = CqState::new(vec![0.2, 0.3, 0.5], states).unwrap();
    assert!((p_guess_with(&cq, &pgm(&cq)).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn run_pa_on_ghz_is_secure() {
    let mut v = ComplexVector::zeros(8);
    v[0] = c64(1.0, 0.0);
    v[7] = c64(1.0, 0.0);
    let ghz = PureStateVector::normalized(v, vec![2, 2, 2]).unwrap();
    let (_, r) = run_pa(&ghz, &[0], &[2], &PaProtocol::new(BinaryMatrix::identity(1)).unwrap()).unwrap();
    assert!(r.achieved < 1e-12);
    let empty = PaProtocol::new(BinaryMatrix::zeros(0, 1)).unwrap();
    let (_, r) = run_pa(&ghz, &[0], &[2], &empty).unwrap();
    assert!(r.achieved < 1e-15);
}

#[test]
fn run_pa_matches_enumeration_oracle() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for seed in 0..5 {
        // A = qubits 0, 1; B = 2; R = 3
        let psi = haar_state(&[2, 2, 2, 2], seed);
        let g = sample_full_rank(1, 2, seed).unwrap();
        let (_, report) = run_pa(&psi, &[0, 1], &[3], &PaProtocol::new(g.clone()).unwrap()).unwrap();
        let mut blocks = vec![ComplexMatrix::zeros(2, 2); 2];
        for x in 0..4usize {
            // <x̃|_A ψ with <x̃|z> = Π_i (−1)^{x_i z_i} / √2
            let mut branch = ComplexVector::zeros(4);
            for z in 0..4usize {
                let sign = if (x & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                for rest in 0..4 {
                    branch[rest] += psi.amplitudes()[z * 4 + rest] * (sign * h * h);
                }
            }
            // trace out B (first factor of `rest`)
            let mut rho_r = ComplexMatrix::zeros(2, 2);
            for b in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        rho_r[(i, j)] += branch[b * 2 + i] * branch[b * 2 + j].conj();
                    }
                }
            }
            let k = g.mul_vec(&BitVector::from_index(x, 2)).unwrap().to_index();
            blocks[k] += rho_r;
        }
        let probs: Vec<f64> = blocks.iter().map(|b| b.trace().re).collect();
        let normed: Vec<_> = blocks.iter().zip(&probs).map(|(b, &p)| b.unscale(p)).collect();
        assert!((report.achieved - p_secure_oracle(&probs, &normed)).abs() < 1e-12);
    }
}

/// `Σ_c max over PGM decoding` assembled from scratch for every `c`.
fn csi_oracle(cq: &CqState, f: &BinaryMatrix) -> f64 {
    let n = f.cols();
    let ds = cq.side_dim();
    let mut total = 0.0;
    for c in 0..1usize << f.rows() {
        let members: Vec<usize> = (0..cq.alphabet())
            .filter(|&z| f.mul_vec(&BitVector::from_index(z, n)).unwrap().to_index() == c)
            .collect();
        let weighted: Vec<ComplexMatrix> = members
            .iter()
            .map(|&z| cq.conditionals()[z].matrix().scale(cq.probs()[z]))
            .collect();
        let s = weighted.iter().fold(ComplexMatrix::zeros(ds, ds), |a, b| a + b);
        let e = eigh(&s);
        let inv = e.map(|l| if l > 1e-12 { 1.0 / l.sqrt() } else { 0.0 });
        for w in &weighted {
            let lambda = &inv * w * &inv;
            total += (lambda * w).trace().re;
        }
    }
    total
}

#[test]
fn run_csi_matches_assembly_oracle() {
    let cq = iid_cq([0.5, 0.5], 0.35, 3);
    for seed in 0..4 {
        let f = sample_full_rank(2, 3, seed).unwrap();
        let (_, r) = run_csi(&cq, &f).unwrap();
        assert!((r.achieved - csi_oracle(&cq, &f)).abs() < 1e-8);
    }
    let (_, r) = run_csi(&cq, &BinaryMatrix::identity(3)).unwrap();
    assert!((r.achieved - 1.0).abs() < 1e-12);
    let orth: Vec<_> = (0..4).map(|i| PureStateVector::basis(vec![4], i).unwrap().density()).collect();
    let cq = CqState::new(vec![0.25; 4], orth).unwrap();
    let (_, r) = run_csi(&cq, &BinaryMatrix::zeros(0, 2)).unwrap();
    assert!((r.achieved - 1.0).abs() < 1e-12);
}

#[test]
fn nested_compressors_never_hurt() {
    let cq = iid_cq([0.6, 0.4], 0.5, 3);
    for seed in 0..4 {
        let full = sample_full_rank(3, 3, seed).unwrap();
        let mut prev = 0.0;
        for ell in 0..=3 {
            let (_, r) = run_csi(&cq, &full.row_range(0, ell)).unwrap();
            assert!(r.achieved >= prev - 1e-12);
            prev = r.achieved;
        }
    }
}

#[test]
fn shorter_keys_are_no_less_secure() {
    for seed in 0..4 {
        let psi = haar_state(&[2, 2, 2, 2, 2], seed);
        let g = sample_full_rank(3, 3, seed).unwrap();
        let mut prev = f64::INFINITY;
        for ell in (0..=3).rev() {
            let pa = PaProtocol::new(g.row_range(0, ell)).unwrap();
            let (_, r) = run_pa(&psi, &[0, 1, 2], &[4], &pa).unwrap();
            assert!(r.achieved <= prev + 1e-12);
            prev = r.achieved;
        }
    }
}

/// Four bits, each correlated with a qubit of R through nonorthogonal states.
fn leftover_test_state() -> CqState {
    let mut rng = rng_from_seed(77);
    let conds: Vec<_> = (0..16).map(|_| random_density(&[2], 1, &mut rng)).collect();
    CqState::new(vec![1.0 / 16.0; 16], conds).unwrap()
}

#[test]
fn leftover_hash_average_is_within_target() {
    let cq = leftover_test_state();
    let hmin = cq_min_entropy(&cq).unwrap();
    let eps2: f64 = 0.5;
    let ell = (hmin - 2.0 * (1.0 / eps2).log2()).floor() as usize;
    assert!(ell >= 1, "H_min = {hmin}");
    let samples: Vec<f64> = (0..200)
        .map(|seed| p_secure(&hash_cq(&cq, &sample_uniform_linear(ell, 4, seed)).unwrap()))
        .collect();
    let mean = samples.iter().sum::<f64>() / 200.0;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / 199.0;
    assert!(mean <= eps2 + 2.0 * (var / 200.0).sqrt(), "mean {mean}");
}

#[test]
fn converse_sanity_on_corpus() {
    let eps: f64 = 0.1;
    let delta = (2.0 * eps).sqrt();
    let mut rng = rng_from_seed(5);
    let two_bits = CqState::new(
        vec![0.25; 4],
        (0..4).map(|_| random_density(&[2], 1, &mut rng)).collect(),
    )
    .unwrap();
    let corpus = [iid_cq([0.5, 0.5], 1.2, 2), two_bits];
    for cq in &corpus {
        let n = cq.alphabet().trailing_zeros() as usize;
        let h = smooth_max_entropy(&cq.to_density(), &[1], SmoothingBall::new(delta).unwrap()).unwrap();
        for ell in 0..n {
            if (ell as f64) < h {
                let f = sample_full_rank(ell, n, ell as u64).unwrap();
                let (_, r) = run_csi(cq, &f).unwrap();
                assert!(r.achieved < 1.0 - eps, "ℓ = {ell}, H = {h}, p = {}", r.achieved);
            }
        }
    }
}

#[test]
fn length_bounds() {
    let uniform = CqState::new(
        vec![0.125; 8],
        vec![DensityOperator::maximally_mixed(vec![1]); 8],
    )
    .unwrap();
    assert_eq!(pa_length_bound(&uniform, 0.0, 0.5).unwrap().0, 3);
    assert_eq!(pa_length_from_entropy(-5.0, 0.1, 4), 0);
    let orth: Vec<_> = (0..4).map(|i| PureStateVector::basis(vec![4], i).unwrap().density()).collect();
    let cq = CqState::new(vec![0.25; 4], orth).unwrap();
    let (len, h) = csi_length_bound(&cq, 0.0, 0.25).unwrap();
    assert!(h.abs() < 1e-6);
    assert_eq!(len, 2);
    let fixed = iid_cq([0.5, 0.5], 0.35, 2);
    let (len, h) = pa_length_bound(&fixed, 0.05, 0.05).unwrap();
    let direct = smooth_min_entropy(&fixed.to_density(), &[1], SmoothingBall::new(0.05).unwrap()).unwrap();
    assert!((h - direct).abs() < 1e-9);
    assert_eq!(len, pa_length_from_entropy(direct, 0.05, 2));
}
