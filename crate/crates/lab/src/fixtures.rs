//! Built-in sources used when no state file is given.

use std::f64::consts::PI;

use duality_core::qcore::{c64, CqState, DensityOperator, PureStateVector};
use duality_core::qcore::linalg::ComplexVector;
use duality_core::Result;

fn qubit(theta: f64) -> Result<DensityOperator> {
    let v = ComplexVector::from_vec(vec![c64(theta.cos(), 0.0), c64(theta.sin(), 0.0)]);
    Ok(PureStateVector::new(v, vec![2])?.density())
}

/// Four-bit register, uniform, with side state `cos(πz/16)|0> + sin(πz/16)|1>`.
pub fn pa_source() -> Result<CqState> {
    let conditionals = (0..16).map(|z| qubit(PI * z as f64 / 16.0)).collect::<Result<Vec<_>>>()?;
    CqState::new(vec![1.0 / 16.0; 16], conditionals)
}

/// One copy: uniform bit, side states `|0>` and `cos 0.35|0> + sin 0.35|1>`.
pub fn csi_source_single() -> Result<CqState> {
    CqState::new(vec![0.5, 0.5], vec![qubit(0.0)?, qubit(0.35)?])
}

/// `n` i.i.d. copies of [`csi_source_single`]; the first copy is the most
/// significant bit.
pub fn csi_source(n: usize) -> Result<CqState> {
    let one = csi_source_single()?;
    let mut cq = one.clone();
    for _ in 1..n {
        let mut probs = Vec::new();
        let mut conds = Vec::new();
        for (p, rho) in cq.probs().iter().zip(cq.conditionals()) {
            for (q, sigma) in one.probs().iter().zip(one.conditionals()) {
                probs.push(p * q);
                conds.push(rho.tensor(sigma));
            }
        }
        cq = CqState::new(probs, conds)?;
    }
    Ok(cq)
}
