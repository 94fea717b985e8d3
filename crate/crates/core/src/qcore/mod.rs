//! Dense complex linear algebra and quantum-state primitives.

pub mod io;
pub mod linalg;
pub mod measure;
pub mod random;
pub mod state;

pub use linalg::{c64, kron, ComplexMatrix, ComplexVector, C64};
pub use measure::{branches, measure_basis, measure_basis_many, Basis};
pub use random::{haar_state, haar_state_rng, random_density, random_povm, random_unitary, rng_from_seed};
pub use state::{
    fidelity, partial_trace, purify, root_fidelity, trace_distance, uhlmann_isometry,
    uhlmann_isometry_between, CqState, DensityOperator, Isometry, Povm, PureStateVector, Uhlmann,
};
