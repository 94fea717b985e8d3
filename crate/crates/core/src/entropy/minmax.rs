//! Min- and max-entropy and the guessing probability as semidefinite
//! programs.

use crate::qcore::linalg::{
    eigh, hermitian_part, inv_sqrt_on_support, partial_trace_matrix, ComplexMatrix, C64,
};
use crate::qcore::state::{purify, DensityOperator, Povm};
use crate::qcore::CqState;
use crate::sdp::{hermitian_basis, Coeff, Sense, SdpProblem, Terms};
use crate::{Error, Result};

use super::split_ab;

/// `1_A ⊗ E` for a sparse coefficient `E` on `B`.
pub(crate) fn one_kron(da: usize, db: usize, e: &Coeff) -> Coeff {
    match e {
        Coeff::Sparse(entries) => Coeff::Sparse(
            (0..da)
                .flat_map(|a| entries.iter().map(move |&(p, q, v)| (a * db + p, a * db + q, v)))
                .collect(),
        ),
        Coeff::Dense(m) => Coeff::Dense(crate::qcore::linalg::kron(
            &crate::qcore::linalg::identity(da),
            m,
        )),
    }
}

/// Shift a sparse coefficient into a larger block at `offset`.
pub(crate) fn shifted(e: &Coeff, offset: usize, scale: f64) -> Coeff {
    match e {
        Coeff::Sparse(entries) => Coeff::Sparse(
            entries
                .iter()
                .map(|&(p, q, v)| (p + offset, q + offset, v * scale))
                .collect(),
        ),
        Coeff::Dense(_) => unreachable!("only sparse coefficients are shifted"),
    }
}

pub(crate) fn dense(e: &Coeff, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    if let Coeff::Sparse(entries) = e {
        for &(p, q, v) in entries {
            m[(p, q)] += v;
        }
    }
    m
}

/// `⟨E, ρ⟩` for a sparse Hermitian `E`.
pub(crate) fn pair(e: &Coeff, rho: &ComplexMatrix) -> f64 {
    match e {
        Coeff::Sparse(entries) => entries.iter().map(|&(p, q, v)| (v * rho[(q, p)]).re).sum(),
        Coeff::Dense(m) => (m * rho).trace().re,
    }
}

/// Support of a PSD matrix: isometry `V` onto eigenvectors with eigenvalue
/// above `cutoff` and those eigenvalues.
pub(crate) fn support(m: &ComplexMatrix, cutoff: f64) -> (ComplexMatrix, Vec<f64>) {
    let e = eigh(m);
    let idx: Vec<usize> = (0..e.values.len()).filter(|&i| e.values[i] > cutoff).collect();
    let n = m.nrows();
    let v = ComplexMatrix::from_fn(n, idx.len(), |r, c| e.vectors[(r, idx[c])]);
    (v, idx.iter().map(|&i| e.values[i]).collect())
}

pub(crate) const SUPPORT_CUTOFF: f64 = 1e-10;

/// `2^{−H_min(A|B)} = max { Tr ρX : X ⪰ 0, Tr_A X = 1_B }`.
fn min_entropy_guess(rho: &ComplexMatrix, da: usize, db: usize) -> Result<f64> {
    let mut p = SdpProblem::new(vec![da * db], Sense::Maximize);
    p.objective(0, Coeff::Dense(rho.clone()));
    for e in hermitian_basis(db) {
        let rhs = pair(&e, &crate::qcore::linalg::identity(db));
        p.constrain(vec![(0, one_kron(da, db, &e))], rhs);
    }
    Ok(p.solve()?.value)
}

/// `H_min(A|B)` where `B` are the `conditioned_on` subsystems.
pub fn min_entropy(rho: &DensityOperator, conditioned_on: &[usize]) -> Result<f64> {
    let (r, da, db) = split_ab(rho, conditioned_on)?;
    check_envelope(da * db)?;
    let v = min_entropy_guess(r.matrix(), da, db)?;
    Ok(-v.log2())
}

pub(crate) fn check_envelope(n: usize) -> Result<()> {
    if n > 64 {
        return Err(Error::Envelope(format!(
            "SDP-backed entropy needs dimension ≤ 64, got {n}"
        )));
    }
    Ok(())
}

/// `H_max(A|B) = −H_min(A|C)` on a purification `ψ_ABC`.
pub fn max_entropy(rho: &DensityOperator, conditioned_on: &[usize]) -> Result<f64> {
    let (r, _, _) = split_ab(rho, conditioned_on)?;
    let psi = purify(&r);
    let rho_ac = psi.reduced(&[0, 2])?;
    min_entropy(&rho_ac, &[1]).map(|h| -h)
}

/// `H_max(A|B) = log₂ max_σ F(ρ_AB, 1_A ⊗ σ_B)²` evaluated directly with the
/// fidelity written as `max Re Tr X` over `[[ρ, X], [X†, τ]] ⪰ 0`.
pub fn max_entropy_direct(rho: &DensityOperator, conditioned_on: &[usize]) -> Result<f64> {
    let (r, da, db) = split_ab(rho, conditioned_on)?;
    check_envelope(da * db)?;
    let (v, lam) = support(r.matrix(), SUPPORT_CUTOFF);
    let rank = lam.len();
    let rho_r = ComplexMatrix::from_fn(rank, rank, |i, j| {
        if i == j {
            C64::new(lam[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut p = SdpProblem::new(vec![2 * rank, db], Sense::Maximize);
    p.objective(
        0,
        Coeff::Sparse(
            (0..rank)
                .flat_map(|i| [(i, rank + i, C64::new(0.5, 0.0)), (rank + i, i, C64::new(0.5, 0.0))])
                .collect(),
        ),
    );
    for e in hermitian_basis(rank) {
        p.constrain(vec![(0, e.clone())], pair(&e, &rho_r));
        let lifted = &v * dense(&e, rank) * v.adjoint();
        let (red, _) = partial_trace_matrix(&lifted, &[da, db], &[1])?;
        let terms: Terms = vec![(0, shifted(&e, rank, 1.0)), (1, Coeff::Dense(-hermitian_part(&red)))];
        p.constrain(terms, 0.0);
    }
    p.constrain(
        (0..db).map(|i| (1, Coeff::sym(i, i, 1.0))).collect(),
        1.0,
    );
    let f = p.solve()?.value;
    Ok(2.0 * f.log2())
}

/// Optimal probability of guessing `Z` from the side system, with an optimal
/// measurement: `max Σ_z p_z Tr(φ_z Λ_z)` over POVMs.
pub fn guessing_probability(cq: &CqState) -> Result<(f64, Povm)> {
    let d = cq.alphabet();
    let ds = cq.side_dim();
    if d > 32 || ds > 32 {
        return Err(Error::Envelope(format!(
            "guessing probability needs alphabet and side ≤ 32, got {d} and {ds}"
        )));
    }
    let mut p = SdpProblem::new(vec![ds; d], Sense::Maximize);
    for (z, (&pz, phi)) in cq.probs().iter().zip(cq.conditionals()).enumerate() {
        if pz > 0.0 {
            p.objective(z, Coeff::Dense(phi.matrix().scale(pz)));
        }
    }
    let id = crate::qcore::linalg::identity(ds);
    for e in hermitian_basis(ds) {
        let rhs = pair(&e, &id);
        p.constrain((0..d).map(|z| (z, e.clone())).collect(), rhs);
    }
    let sol = p.solve()?;
    let clamped: Vec<ComplexMatrix> = sol
        .x
        .iter()
        .map(|x| eigh(x).map(|l| l.max(0.0)))
        .collect();
    let total = clamped
        .iter()
        .fold(ComplexMatrix::zeros(ds, ds), |a, x| a + x);
    let t = inv_sqrt_on_support(&total, 0.0);
    let elements: Vec<ComplexMatrix> = clamped
        .iter()
        .map(|x| hermitian_part(&(&t * x * &t)))
        .collect();
    let povm = Povm::new(elements)?;
    let value = crate::protocols::p_guess_with(cq, &povm)?;
    Ok((value, povm))
}

/// `H_min(Z|S)` of the cq density operator, via the min-entropy SDP.
pub fn cq_min_entropy(cq: &CqState) -> Result<f64> {
    let rho = cq.to_density();
    let b: Vec<usize> = (1..rho.dims().len()).collect();
    min_entropy(&rho, &b)
}

