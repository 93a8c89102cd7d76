//! Numerical laboratory for random quantum circuits: Haar geometry, moment
//! operators and design Hamiltonians, random walks on the unitary group,
//! brute-force ε-complexity, and desk-scale saturation/recurrence experiments.

pub mod complexity;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod graph;
pub mod linalg;
pub mod moments;
pub mod qmath;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use qmath::{
    distance_state, distance_to_identity, distance_unitary, haar_state, haar_unitary,
    shortest_arc, PhaseSet, PureState, Unitary, UnitaryChannel,
};
pub use stats::Estimate;
