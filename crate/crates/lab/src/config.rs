use std::path::{Path, PathBuf};

use clap::ValueEnum;
use duality_core::duality::Case;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    #[default]
    Entropy,
    PaRun,
    CsiRun,
    DualityVerify,
    UncertaintySweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Entropy => "entropy",
            Self::PaRun => "pa-run",
            Self::CsiRun => "csi-run",
            Self::DualityVerify => "duality-verify",
            Self::UncertaintySweep => "uncertainty-sweep",
        }
    }
}

/// Statement checked by `duality-verify`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
pub enum Theorem {
    /// Recoverability of Z from B implies secrecy of X against R.
    #[default]
    #[serde(rename = "theorem1")]
    #[value(name = "theorem1")]
    Theorem1,
    /// Secrecy implies recoverability for case-(a) states.
    #[serde(rename = "theorem2a")]
    #[value(name = "theorem2a")]
    Theorem2a,
    /// Secrecy implies recoverability for case-(b) states.
    #[serde(rename = "theorem2b")]
    #[value(name = "theorem2b")]
    Theorem2b,
    #[serde(rename = "csi-to-pa")]
    #[value(name = "csi-to-pa")]
    CsiToPa,
    #[serde(rename = "pa-to-csi")]
    #[value(name = "pa-to-csi")]
    PaToCsi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Fixture {
    /// Haar-random pure state on `A ⊗ B ⊗ R`.
    #[default]
    Random,
    /// `Σ_z |z,z,z>/√d`.
    Ghz,
    /// `(|0> + i|1>)/√2 ⊗ Φ⁺_BR`.
    Itilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HashSampler {
    #[default]
    FullRank,
    UniformLinear,
    Toeplitz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a sweep depends on. List-valued parameters cycle with the
/// trial index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub timings: bool,
    /// State file (`entropy`) or cq file (`pa-run`, `csi-run`).
    pub state: Option<PathBuf>,
    /// Subsystems conditioned on by `entropy` when reading a state file.
    pub conditioned_on: Vec<usize>,
    /// Dimension of A, cycled per trial.
    pub dims: Vec<usize>,
    /// Number of qubits in A for the case-(a)/(b) constructions.
    pub qubits: Vec<usize>,
    pub b_dim: usize,
    pub r_dim: usize,
    pub theorem: Theorem,
    pub fixture: Fixture,
    /// Key or compression lengths; empty means "use the entropy bound".
    pub lengths: Vec<usize>,
    pub cases: Vec<Case>,
    pub eps1: f64,
    pub eps2: f64,
    /// Smoothing parameters for `uncertainty-sweep`; empty means unsmoothed.
    pub deltas: Vec<f64>,
    pub hash: HashSampler,
    /// Copies of the built-in source used by `csi-run`.
    pub copies: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: Command::default(),
            seed: 0,
            trials: 1,
            format: Format::Csv,
            out: None,
            timings: false,
            state: None,
            conditioned_on: Vec::new(),
            dims: vec![2],
            qubits: vec![1],
            b_dim: 2,
            r_dim: 2,
            theorem: Theorem::default(),
            fixture: Fixture::default(),
            lengths: Vec::new(),
            cases: vec![Case::A, Case::B],
            eps1: 0.05,
            eps2: 0.05,
            deltas: Vec::new(),
            hash: HashSampler::default(),
            copies: 3,
        }
    }
}

const MAX_DIM: usize = 8;
const MAX_QUBITS: usize = 4;

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        if self.trials == 0 {
            return bad("trial count must be at least 1".into());
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| !(2..=MAX_DIM).contains(&d)) {
            return bad(format!("dims {:?} outside 2..={MAX_DIM}", self.dims));
        }
        if self.qubits.is_empty() || self.qubits.iter().any(|&n| !(1..=MAX_QUBITS).contains(&n)) {
            return bad(format!("qubits {:?} outside 1..={MAX_QUBITS}", self.qubits));
        }
        for (name, d) in [("b_dim", self.b_dim), ("r_dim", self.r_dim)] {
            if !(1..=MAX_DIM).contains(&d) {
                return bad(format!("{name} = {d} outside 1..={MAX_DIM}"));
            }
        }
        for (name, e) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if !(e > 0.0 && e < 1.0) {
                return bad(format!("{name} = {e} outside (0, 1)"));
            }
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
            return bad(format!("delta = {d} outside (0, 1)"));
        }
        if self.cases.is_empty() {
            return bad("case list is empty".into());
        }
        if !(1..=3).contains(&self.copies) {
            return bad(format!("copies = {} outside 1..=3", self.copies));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_uses_kebab_case_names() {
        let cfg = ExperimentConfig::from_json(
            r#"{"command": "duality-verify", "theorem": "pa-to-csi", "cases": ["b"], "trials": 3}"#,
        )
        .unwrap();
        assert_eq!(cfg.command, Command::DualityVerify);
        assert_eq!(cfg.theorem, Theorem::PaToCsi);
        assert_eq!(cfg.cases, vec![Case::B]);
        assert_eq!(cfg.eps1, 0.05);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"trails": 3}"#).is_err());
    }

    #[test]
    fn validation_catches_zero_trials_and_bad_dims() {
        let mut cfg = ExperimentConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.dims = vec![1];
        assert!(cfg.validate().is_err());
        cfg.dims = vec![2, 3];
        cfg.validate().unwrap();
    }
}
