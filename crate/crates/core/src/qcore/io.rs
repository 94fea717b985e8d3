//! JSON state files: `{ "dims": [...], "re": [[...]], "im": [[...]] }`.
//!
//! Matrices are stored row-major; a pure state is a single-row matrix.
//! Doubles are written in shortest round-trip form, so a save/load cycle is
//! bit-exact.

use serde::{Deserialize, Serialize};

use super::linalg::*;
use super::state::{CqState, DensityOperator, PureStateVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// A state read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(PureStateVector),
    Mixed(DensityOperator),
}

impl StateData {
    pub fn density(&self) -> DensityOperator {
        match self {
            StateData::Pure(p) => p.density(),
            StateData::Mixed(m) => m.clone(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            StateData::Pure(p) => p.dims(),
            StateData::Mixed(m) => m.dims(),
        }
    }
}

impl StateFile {
    fn from_matrix(m: &ComplexMatrix, dims: &[usize]) -> Self {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dims: dims.to_vec(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    fn to_matrix(&self) -> Result<ComplexMatrix> {
        let r = self.re.len();
        if r == 0 || self.im.len() != r {
            return Err(Error::Parse("re/im row counts differ or are empty".into()));
        }
        let c = self.re[0].len();
        if self.re.iter().chain(&self.im).any(|row| row.len() != c) {
            return Err(Error::Parse("ragged rows".into()));
        }
        Ok(ComplexMatrix::from_fn(r, c, |i, j| c64(self.re[i][j], self.im[i][j])))
    }

    pub fn from_pure(psi: &PureStateVector) -> Self {
        let v = psi.amplitudes();
        Self::from_matrix(&ComplexMatrix::from_fn(1, v.len(), |_, j| v[j]), psi.dims())
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        Self::from_matrix(rho.matrix(), rho.dims())
    }

    pub fn into_state(&self) -> Result<StateData> {
        let m = self.to_matrix()?;
        if m.nrows() == 1 && product(&self.dims) == m.ncols() && m.ncols() > 1 {
            let v = m.row(0).transpose();
            return Ok(StateData::Pure(PureStateVector::new(v, self.dims.clone())?));
        }
        Ok(StateData::Mixed(DensityOperator::new(m, self.dims.clone())?))
    }
}

pub fn pure_to_json(psi: &PureStateVector) -> Result<String> {
    Ok(serde_json::to_string(&StateFile::from_pure(psi))?)
}

pub fn density_to_json(rho: &DensityOperator) -> Result<String> {
    Ok(serde_json::to_string(&StateFile::from_density(rho))?)
}

pub fn state_from_json(text: &str) -> Result<StateData> {
    serde_json::from_str::<StateFile>(text)?.into_state()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CqFile {
    pub probs: Vec<f64>,
    pub conditionals: Vec<StateFile>,
}

pub fn cq_to_json(cq: &CqState) -> Result<String> {
    let file = CqFile {
        probs: cq.probs().to_vec(),
        conditionals: cq.conditionals().iter().map(StateFile::from_density).collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

pub fn cq_from_json(text: &str) -> Result<CqState> {
    let file: CqFile = serde_json::from_str(text)?;
    let conditionals = file
        .conditionals
        .iter()
        .map(|s| s.into_state().map(|d| d.density()))
        .collect::<Result<Vec<_>>>()?;
    CqState::new(file.probs, conditionals)
}
