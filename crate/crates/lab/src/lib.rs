//! Experiment harness: configuration, deterministic seeding, the sweep
//! drivers and report serialization behind the `duality-lab` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod report;
pub mod seeding;

pub use config::{Command, ExperimentConfig, Fixture, Format, HashSampler, Theorem};
pub use error::{LabError, Result};
pub use experiments::run_experiment;
pub use report::{serialize_report, ReportDocument, Summary, TrialRecord, Value};
pub use seeding::derive_seed;
