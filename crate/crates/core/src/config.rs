//! Numerical tolerances shared by the whole crate.
//!
//! Every threshold used to validate states, measurements and solver output
//! lives in [`Tolerances`]. A single process-wide record is consulted through
//! [`tolerances`]; tests or the CLI may replace it with [`set_tolerances`].

use std::sync::RwLock;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Max-entry deviation from Hermiticity accepted for density operators.
    pub hermitian: f64,
    /// Most negative eigenvalue that is clamped to zero instead of rejected.
    pub eigen_floor: f64,
    /// Allowed deviation of a state's trace from one.
    pub trace: f64,
    /// Allowed deviation of a state vector's norm from one.
    pub norm: f64,
    /// Allowed defect of `W^H W - I` for isometries.
    pub isometry: f64,
    /// Allowed deviation of POVM completeness.
    pub povm: f64,
    /// Absolute duality gap at which an SDP solution is accepted.
    pub sdp_gap: f64,
    /// Gap/infeasibility target at which the interior-point loop stops early.
    pub sdp_target: f64,
    /// Iteration cap of the interior-point loop.
    pub sdp_max_iterations: usize,
    /// Eigenvalues of the PGM average state below this are treated as zero.
    pub pgm_cutoff: f64,
    /// Entropy threshold used to decide whether a state has case (a)/(b) form.
    pub case_detection: f64,
    /// Slack granted to the theorem bounds when comparing measured values.
    pub bound_slack: f64,
    /// Emit newline-delimited JSON diagnostics from the SDP solver on stderr.
    pub sdp_trace: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            eigen_floor: 1e-10,
            trace: 1e-10,
            norm: 1e-10,
            isometry: 1e-9,
            povm: 1e-9,
            sdp_gap: 1e-7,
            sdp_target: 1e-10,
            sdp_max_iterations: 200,
            pgm_cutoff: 1e-12,
            case_detection: 1e-6,
            bound_slack: 1e-9,
            sdp_trace: false,
        }
    }
}

static GLOBAL: RwLock<Option<Tolerances>> = RwLock::new(None);

/// Current tolerance record (the defaults unless overridden).
pub fn tolerances() -> Tolerances {
    GLOBAL
        .read()
        .map(|g| g.unwrap_or_default())
        .unwrap_or_default()
}

/// Replace the process-wide tolerance record.
pub fn set_tolerances(t: Tolerances) {
    if let Ok(mut g) = GLOBAL.write() {
        *g = Some(t);
    }
}
