//! Diagrammatic calculus for approximate message passing.
//!
//! Graph polynomials indexed by multigraphs ("diagrams"), their evaluation on
//! matrices, the limiting traffic distributions of random matrix ensembles,
//! AMP iterations with exact and scalar Onsager corrections, and the
//! state-evolution recursions that predict them.

pub mod amp;
pub mod diagrams;
pub mod ensembles;
pub mod error;
pub mod freeprob;
pub mod gaussian;
pub mod graphpoly;
pub mod matrix;
pub mod rng;
pub mod state_evolution;
pub mod stats;

pub use diagrams::{Diagram, DiagramClass, VertexPartition};
pub use error::{Result, TampError};
pub use matrix::Matrix;
