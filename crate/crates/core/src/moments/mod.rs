//! Moment operators, the design Hamiltonian and closed-form bound calculators.

pub mod bounds;
pub mod cache;
pub mod hamiltonian;
pub mod mc;
pub mod projector;

pub use bounds::*;
pub use hamiltonian::{
    design_hamiltonian, design_hamiltonian_with, global_projector_site_major,
    rqc_step_moment_operator, spectral_gap, step_expander_norm, two_site_projector,
    DesignHamiltonian, GapMethod, GapReport, HamiltonianCaps,
};
pub use mc::mc_moment_operator;
pub use projector::{haar_moment_projector, haar_moment_projector_capped, Layout, MomentOperator};
