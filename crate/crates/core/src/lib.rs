//! Decay centrality on undirected graphs and its relation to degree and
//! closeness.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: simple undirected graphs, connectivity and BFS distance profiles.
//! - [`centrality`]: degree, farness/closeness, decay centrality, the
//!   higher-order farness vectors and the factored difference polynomials.
//! - [`ordering`]: lexicographic and unsorted-dominance comparators, the
//!   sufficient-condition checkers and maximizer sets.
//! - [`generation`]: seeded sampling of connected G(n,p) graphs.
//! - [`simulation`]: the Monte-Carlo harness over a decay-parameter grid.

pub mod centrality;
pub mod error;
pub mod generation;
pub mod graph;
pub mod grid;
pub mod ordering;
pub mod simulation;

pub use centrality::{CentralityTable, Closeness, NodeCentrality};
pub use error::{Error, Result};
pub use graph::{DistanceProfile, Graph, NodeId};
pub use grid::DeltaGrid;
pub use ordering::{ComparisonVerdict, ConditionReport, MaximizerSets, Relation, Rule};
