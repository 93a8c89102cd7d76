//! Samplers for random circuits, gateset walks and stochastic local
//! Hamiltonian evolution.

pub mod arch;
pub mod gateset;
pub mod slh;
pub mod walk;

pub use arch::{sample_step, slh_step, ArchKind, ArchSpec, CircuitArchitecture, SlhParams, StepLabel};
pub use gateset::GateSet;
pub use slh::{Normalization, SlhIncrementBasis};
pub use walk::{walk, walk_endpoint, RecordMode, WalkTrace};
