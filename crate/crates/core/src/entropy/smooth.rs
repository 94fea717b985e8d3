//! Smoothed min- and max-entropy over the purification-distance ball of
//! subnormalized states.

use crate::qcore::linalg::{ComplexMatrix, C64};
use crate::qcore::state::{purify, DensityOperator};
use crate::sdp::{hermitian_basis, Coeff, Sense, SdpProblem, Terms};
use crate::Result;

use super::minmax::{check_envelope, dense, max_entropy, min_entropy, pair, shifted, support, SUPPORT_CUTOFF};
use super::{split_ab, SmoothingBall};

/// `Tr_A E` for a sparse `E` on `A ⊗ B`, scaled.
fn trace_a(e: &Coeff, db: usize, scale: f64) -> Option<Coeff> {
    let Coeff::Sparse(entries) = e else { return None };
    let kept: Vec<(usize, usize, C64)> = entries
        .iter()
        .filter(|&&(p, q, _)| p / db == q / db)
        .map(|&(p, q, v)| (p % db, q % db, v * scale))
        .collect();
    (!kept.is_empty()).then_some(Coeff::Sparse(kept))
}

/// `H_min^ε(A|B)`: the largest min-entropy of a subnormalized `ρ̄` with
/// `F(ρ, ρ̄) ≥ √(1 − ε²)`, posed as a single SDP
///
/// ```text
/// minimize Tr σ  s.t.  1⊗σ − ρ̄ ⪰ 0,  Tr ρ̄ ≤ 1,
///                      [[ρ_s, X], [X†, V†ρ̄V]] ⪰ 0,  Re Tr X ≥ √(1 − ε²)
/// ```
///
/// where `V` spans the support of `ρ` and `ρ_s = V†ρV`.
pub fn smooth_min_entropy(
    rho: &DensityOperator,
    conditioned_on: &[usize],
    ball: SmoothingBall,
) -> Result<f64> {
    let eps = ball.epsilon();
    if eps == 0.0 {
        return min_entropy(rho, conditioned_on);
    }
    let (r, da, db) = split_ab(rho, conditioned_on)?;
    let n = da * db;
    check_envelope(n)?;
    let (v, lam) = support(r.matrix(), SUPPORT_CUTOFF);
    let k = lam.len();
    let rho_s = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        k,
        lam.iter().map(|&l| C64::new(l, 0.0)),
    ));

    const SIGMA: usize = 0;
    const SLACK: usize = 1;
    const RHO_BAR: usize = 2;
    const W: usize = 3;
    const T_TRACE: usize = 4;
    const T_FID: usize = 5;
    let mut p = SdpProblem::new(vec![db, n, n, 2 * k, 1, 1], Sense::Minimize);
    for i in 0..db {
        p.objective(SIGMA, Coeff::sym(i, i, 1.0));
    }
    // slack + ρ̄ = 1⊗σ
    for e in hermitian_basis(n) {
        let mut terms: Terms = vec![(SLACK, e.clone()), (RHO_BAR, e.clone())];
        if let Some(t) = trace_a(&e, db, -1.0) {
            terms.push((SIGMA, t));
        }
        p.constrain(terms, 0.0);
    }
    // top-left block fixed to ρ_s, bottom-right block equal to V†ρ̄V
    for e in hermitian_basis(k) {
        p.constrain(vec![(W, e.clone())], pair(&e, &rho_s));
        let lifted = &v * dense(&e, k) * v.adjoint();
        p.constrain(vec![(W, shifted(&e, k, 1.0)), (RHO_BAR, Coeff::Dense(-lifted))], 0.0);
    }
    let mut trace_terms: Terms = (0..n).map(|i| (RHO_BAR, Coeff::sym(i, i, 1.0))).collect();
    trace_terms.push((T_TRACE, Coeff::sym(0, 0, 1.0)));
    p.constrain(trace_terms, 1.0);
    let fid = Coeff::Sparse(
        (0..k)
            .flat_map(|i| [(i, k + i, C64::new(0.5, 0.0)), (k + i, i, C64::new(0.5, 0.0))])
            .collect(),
    );
    p.constrain(vec![(W, fid), (T_FID, Coeff::sym(0, 0, -1.0))], (1.0 - eps * eps).sqrt());

    let sol = p.solve()?;
    Ok(-sol.value.log2())
}

/// `H_max^ε(A|B) = −H_min^ε(A|C)` on a purification `ψ_ABC`.
pub fn smooth_max_entropy(
    rho: &DensityOperator,
    conditioned_on: &[usize],
    ball: SmoothingBall,
) -> Result<f64> {
    if ball.epsilon() == 0.0 {
        return max_entropy(rho, conditioned_on);
    }
    let (r, _, _) = split_ab(rho, conditioned_on)?;
    let psi = purify(&r);
    let rho_ac = psi.reduced(&[0, 2])?;
    smooth_min_entropy(&rho_ac, &[1], ball).map(|h| -h)
}
