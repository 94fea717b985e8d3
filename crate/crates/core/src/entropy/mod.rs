//! Conditional entropies in bits: von Neumann, min, max and their smoothed
//! variants, plus the optimal guessing probability of a cq ensemble.

mod classical;
mod minmax;
mod smooth;

pub use classical::{classical_smooth_min_entropy, water_fill};
pub use minmax::{cq_min_entropy, guessing_probability, max_entropy, max_entropy_direct, min_entropy};
pub use smooth::{smooth_max_entropy, smooth_min_entropy};

pub use crate::qcore::CqState;

use serde::{Deserialize, Serialize};

use crate::qcore::linalg::{check_index_set, eigenvalues_hermitian};
use crate::qcore::measure::{measure_basis, Basis};
use crate::qcore::state::{partial_trace, DensityOperator, PureStateVector};
use crate::{Error, Result};

/// Observable measured on a `d`-level system: `Z` is the computational basis,
/// `X` its Fourier conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    Z,
    X,
}

impl Observable {
    pub fn basis(self) -> Basis {
        match self {
            Observable::Z => Basis::Computational,
            Observable::X => Basis::Fourier,
        }
    }
}

/// Purification-distance ball of radius `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingBall {
    epsilon: f64,
}

impl SmoothingBall {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::Precondition(format!(
                "smoothing radius {epsilon} outside [0, 1)"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// `−Σ x log₂ x` over a probability-like vector with `0 log 0 = 0`.
pub fn shannon(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

pub fn von_neumann(rho: &DensityOperator) -> f64 {
    shannon(&eigenvalues_hermitian(rho.matrix()))
}

/// `H(A|B) = H(AB) − H(B)` where `B` is `conditioned_on` and `A` the rest.
pub fn cond_entropy(rho: &DensityOperator, conditioned_on: &[usize]) -> Result<f64> {
    let b = check_index_set(conditioned_on, rho.dims().len())?;
    let hb = if b.is_empty() {
        0.0
    } else {
        von_neumann(&partial_trace(rho, &b)?)
    };
    Ok(von_neumann(rho) - hb)
}

/// `H(Z|S) = H(p) + Σ_z p_z H(φ_z) − H(Σ_z p_z φ_z)` for a cq ensemble.
pub fn cq_cond_entropy(cq: &CqState) -> f64 {
    let joint: f64 = shannon(cq.probs())
        + cq
            .probs()
            .iter()
            .zip(cq.conditionals())
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, c)| p * von_neumann(c))
            .sum::<f64>();
    joint - shannon(&eigenvalues_hermitian(&cq.side_average()))
}

/// Measure `target` of `psi` and condition on the subsystems in `side`
/// (indices into `psi`).
pub fn measured_cond_entropy(
    psi: &PureStateVector,
    observable: Observable,
    target: usize,
    side: &[usize],
) -> Result<f64> {
    let side = check_index_set(side, psi.dims().len())?;
    if side.contains(&target) {
        return Err(Error::InvalidSubsystems(format!(
            "target {target} is also a side system"
        )));
    }
    let cq = measure_basis(psi, observable.basis(), target)?;
    let remap: Vec<usize> = side.iter().map(|&s| if s > target { s - 1 } else { s }).collect();
    let restricted = if remap.is_empty() {
        cq.restrict_side(&[])?
    } else {
        cq.restrict_side(&remap)?
    };
    Ok(cq_cond_entropy(&restricted))
}

/// Reorder `rho` so the non-conditioning subsystems come first, returning
/// `(state, dim_A, dim_B)`.
pub(crate) fn split_ab(
    rho: &DensityOperator,
    conditioned_on: &[usize],
) -> Result<(DensityOperator, usize, usize)> {
    let k = rho.dims().len();
    let b = check_index_set(conditioned_on, k)?;
    if b.len() == k {
        return Err(Error::InvalidSubsystems("nothing left to condition".into()));
    }
    let mut order: Vec<usize> = (0..k).filter(|i| !b.contains(i)).collect();
    let na = order.len();
    order.extend(&b);
    let p = rho.permute(&order)?;
    let da: usize = p.dims()[..na].iter().product();
    let db: usize = p.dims()[na..].iter().product();
    let flat = p.with_dims(vec![da, db])?;
    Ok((flat, da, db))
}
