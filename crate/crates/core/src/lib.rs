//! Construction and verification toolkit for Ramsey-Turán lower-bound
//! graphs built from high-dimensional sphere geometry, together with an
//! exact-rational calculus reproducing the matching upper bounds.
//!
//! The pipeline: partition a unit sphere into equal-measure cells, read a
//! family of complete bipartite graphs off a blown-up hypercube, build an
//! r-uniform hypergraph on tuples of cell representatives whose hyperedges
//! witness near-antipodal alignments, blow the hypergraph up and delete
//! forbidden sub-configurations, and assemble the final graph from two
//! shadow-graph copies joined by coordinate-wise near-neighbor cross edges.
//! Verification covers clique freeness (exact search), hypergraph
//! postconditions, independence heuristics, and the geometric inequalities
//! the construction leans on.

pub mod calculus;
pub mod error;
pub mod hypercube;
pub mod hypergraph;
pub mod rng;
pub mod sphere;

pub use error::{Error, Result};
