//! Optimal partitions of graph nodes into connected coalitions under
//! valuations that ignore interactions between non-adjacent members.

pub mod classify;
pub mod dispatch;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod minor_free;
pub mod sat;
pub mod separator;
pub mod separator_solver;
pub mod tree;
pub mod valuation;

pub use error::{GcsgError, Result};
pub use classify::{classify_graph, GraphClass};
pub use dispatch::{solve, Algorithm, SolveOptions, SolveReport};
pub use enumeration::{solve_bruteforce, Solution};
pub use graph::{BoundaryConstraint, CoalitionStructure, Graph, NodeSet};
pub use valuation::{EdgeSumValuation, Valuation, Value};
