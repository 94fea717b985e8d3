//! Seeded random states, unitaries and POVMs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::*;
use super::state::{DensityOperator, Povm, PureStateVector};

pub type StateRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StateRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state from a normalized complex Gaussian vector.
pub fn haar_state_rng(dims: &[usize], rng: &mut impl Rng) -> PureStateVector {
    let n = product(dims);
    if n == 1 {
        return PureStateVector::basis(dims.to_vec(), 0).expect("unit dimension");
    }
    loop {
        let v = ComplexVector::from_fn(n, |_, _| gaussian(rng));
        if let Ok(s) = PureStateVector::normalized(v, dims.to_vec()) {
            return s;
        }
    }
}

/// Deterministic Haar-random pure state.
pub fn haar_state(dims: &[usize], seed: u64) -> PureStateVector {
    haar_state_rng(dims, &mut rng_from_seed(seed))
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase fix
/// `R_ii > 0`.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Mixed state obtained as the marginal of a Haar-random purification with
/// ancilla dimension `rank`.
pub fn random_density(dims: &[usize], rank: usize, rng: &mut impl Rng) -> DensityOperator {
    let mut all = dims.to_vec();
    all.push(rank.max(1));
    let psi = haar_state_rng(&all, rng);
    let keep: Vec<usize> = (0..dims.len()).collect();
    psi.reduced(&keep).expect("valid indices")
}

/// Random POVM with `k` elements on dimension `d`: `Λ_i = S^{-1/2} G_i G_i† S^{-1/2}`.
pub fn random_povm(d: usize, k: usize, rng: &mut impl Rng) -> Povm {
    let gs: Vec<ComplexMatrix> = (0..k)
        .map(|_| {
            let g = ginibre(d, d, rng);
            &g * g.adjoint()
        })
        .collect();
    let s = gs.iter().fold(ComplexMatrix::zeros(d, d), |a, g| a + g);
    let t = inv_sqrt_on_support(&s, 0.0);
    Povm::new(gs.iter().map(|g| hermitian_part(&(&t * g * &t))).collect())
        .expect("normalized by construction")
}
