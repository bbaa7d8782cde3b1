//! Quantum Teichmüller computations on punctured surfaces.
//!
//! The crate builds Chekhov–Fock algebras from ideal triangulations, their
//! local finite-dimensional representations, and the intertwining operators
//! relating representations attached to different triangulations.
//!
//! * [`surface_topology`]: triangulations, σ, dual graphs, homology, flips.
//! * [`quantum_algebra`]: q-commuting monomials, fusion embeddings, Φ maps.
//! * [`representations`]: local representations and their invariants.
//! * [`intertwiners`]: intertwiner construction and the pseudo-Anosov pipeline.
//! * [`acceptance`]: the end-to-end checks run by `cargo test` and `qteich selftest`.

pub mod acceptance;
pub mod intertwiners;
pub mod linalg;
pub mod quantum_algebra;
pub mod representations;
pub mod surface_topology;

pub use linalg::{CMat, C64};

use thiserror::Error;

/// Umbrella error for cross-module pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Topology(#[from] surface_topology::TopologyError),
    #[error(transparent)]
    Algebra(#[from] quantum_algebra::AlgebraError),
    #[error(transparent)]
    Rep(#[from] representations::RepError),
    #[error(transparent)]
    Intertwiner(#[from] intertwiners::IntertwinerError),
}

pub type Result<T> = std::result::Result<T, Error>;
