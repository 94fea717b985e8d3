//! Projective measurements in the computational and Fourier bases.

use serde::{Deserialize, Serialize};

use super::linalg::*;
use super::state::{CqState, DensityOperator, PureStateVector};
use crate::{Error, Result};

/// Measurement basis for a `d`-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `|z>`
    Computational,
    /// `|x̃> = d^{-1/2} Σ_z ω^{-xz} |z>`
    Fourier,
}

impl Basis {
    pub fn other(self) -> Self {
        match self {
            Basis::Computational => Basis::Fourier,
            Basis::Fourier => Basis::Computational,
        }
    }

    /// Matrix whose row `k` is the bra of basis vector `k`.
    pub fn bra_matrix(self, d: usize) -> ComplexMatrix {
        match self {
            Basis::Computational => identity(d),
            Basis::Fourier => fourier_bra_matrix(d),
        }
    }
}

/// Unnormalized post-measurement branches of a pure state.
///
/// Row `k` of the returned matrix is `(<k| ⊗ 1)|ψ>` where `k` ranges over the
/// joint outcomes of `targets` (mixed radix, first target most significant)
/// and the remaining subsystems keep their relative order, with dimensions
/// given by the second return value.
pub fn branches(
    psi: &PureStateVector,
    basis: Basis,
    targets: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    let k = psi.dims().len();
    if targets.is_empty() {
        return Err(Error::InvalidSubsystems("no measurement target".into()));
    }
    let mut sorted = targets.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.iter().any(|&t| t >= k) {
        return Err(Error::InvalidSubsystems(format!(
            "targets {targets:?} invalid for {k} subsystems"
        )));
    }
    let order = order_with_front(targets, k);
    let p = psi.permute(&order)?;
    let target_dims = &p.dims()[..targets.len()];
    let dt = product(target_dims);
    let mut rest: Vec<usize> = p.dims()[targets.len()..].to_vec();
    if rest.is_empty() {
        rest.push(1);
    }
    let m = reshape(p.amplitudes(), dt, p.dim() / dt);
    let rows = match basis {
        Basis::Computational => m,
        Basis::Fourier => {
            let f = kron_all(
                &target_dims
                    .iter()
                    .map(|&d| fourier_bra_matrix(d))
                    .collect::<Vec<_>>(),
            );
            f * m
        }
    };
    Ok((rows, rest))
}

/// Measure several subsystems jointly; the conditional states live on all
/// remaining subsystems.
pub fn measure_basis_many(
    psi: &PureStateVector,
    basis: Basis,
    targets: &[usize],
) -> Result<CqState> {
    let (rows, rest) = branches(psi, basis, targets)?;
    let side = product(&rest);
    let mut probs = Vec::with_capacity(rows.nrows());
    let mut conditionals = Vec::with_capacity(rows.nrows());
    for r in 0..rows.nrows() {
        let v = rows.row(r).transpose();
        let p = v.norm_squared();
        probs.push(p);
        conditionals.push(if p > 0.0 {
            DensityOperator::trusted(outer(&v).unscale(p), rest.clone())
        } else {
            DensityOperator::maximally_mixed(rest.clone())
        });
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    debug_assert!(side >= 1);
    Ok(CqState::trusted(probs, conditionals))
}

/// Measure one subsystem of a pure state.
pub fn measure_basis(psi: &PureStateVector, basis: Basis, target: usize) -> Result<CqState> {
    measure_basis_many(psi, basis, &[target])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ghz() -> PureStateVector {
        let mut v = ComplexVector::zeros(8);
        v[0] = ONE;
        v[7] = ONE;
        PureStateVector::normalized(v, vec![2, 2, 2]).unwrap()
    }

    #[test]
    fn ghz_computational() {
        let cq = measure_basis(&ghz(), Basis::Computational, 0).unwrap();
        assert!((cq.probs()[0] - 0.5).abs() < 1e-12);
        assert!((cq.conditionals()[0].matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((cq.conditionals()[1].matrix()[(3, 3)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_fourier_is_uniform() {
        let phi = PureStateVector::normalized(
            ComplexVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]),
            vec![2],
        )
        .unwrap();
        let psi = PureStateVector::basis(vec![2], 0).unwrap().tensor(&phi);
        let cq = measure_basis(&psi, Basis::Fourier, 0).unwrap();
        assert!((cq.probs()[0] - 0.5).abs() < 1e-12);
        let diff = cq.conditionals()[0].matrix() - cq.conditionals()[1].matrix();
        assert!(max_abs(&diff) < 1e-12);
    }

    #[test]
    fn bad_target_is_rejected() {
        assert!(measure_basis(&ghz(), Basis::Computational, 3).is_err());
    }
}
