//! Numerics for privacy amplification and compression with quantum side
//! information, and executable checks of the duality between the two.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`] dense complex linear algebra and quantum-state primitives
//! * [`sdp`] a small dense primal-dual interior-point solver
//! * [`entropy`] von Neumann, min/max and smoothed conditional entropies
//! * [`binlin`] GF(2) linear algebra and linear hash families
//! * [`stabilizer`] CSS Pauli operators and subsystem relabeling
//! * [`protocols`] runnable PA / CSI protocols and their length bounds
//! * [`duality`] recoverability/security conversions and uncertainty checks

pub mod binlin;
pub mod config;
pub mod duality;
pub mod entropy;
pub mod error;
pub mod protocols;
pub mod qcore;
pub mod sdp;
pub mod stabilizer;

pub use error::{Error, Result};
