//! Scattering quantum random walks (SQRW) on square grids, cubic lattices,
//! walled grids and perfect mazes.
//!
//! The walk lives on directed edge states: every undirected edge `{A, B}`
//! contributes `|A,B⟩` (entering `B` from `A`) and `|B,A⟩`. Each node scatters
//! its incoming amplitudes into its outgoing states with the local operator
//! `(2/n)J − I`, and marked nodes use the negated operator.
//!
//! On top of the simulator sit the hybrid quantum/classical search models
//! ([`search`]) and the experiment drivers ([`sweep`]) that optimize the number
//! of unitary steps and the classical search radius.

pub mod error;
pub mod geometry;
pub mod search;
pub mod sweep;
pub mod walk;

pub use error::{Error, Result};
pub use geometry::{Coord, Geometry, NodeId};
pub use walk::{MarkedSet, ProbabilityField, RadialProfile, WalkState, Walker};
