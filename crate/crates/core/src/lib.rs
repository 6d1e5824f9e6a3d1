//! Exact graph-homomorphism analysis and data-dependent generalization
//! bounds for pattern-augmented message-passing graph classifiers.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`], [`dataset`]: graphs, pattern constructors and dataset I/O;
//! * [`canon`], [`hom`]: canonical labels and exact counting;
//! * [`matrix`]: homomorphism matrices and exact rank;
//! * [`trees`]: pattern-tree enumeration;
//! * [`fwl`]: pattern-seeded colour refinement and histogram features;
//! * [`divergence`]: KL, TV, Wasserstein-1 and friends;
//! * [`bounds`]: graph- and node-level bound assembly.

pub mod bounds;
pub mod canon;
pub mod dataset;
pub mod divergence;
pub mod error;
pub mod fwl;
pub mod graph;
pub mod hom;
pub mod matrix;
pub mod pattern;
pub mod trees;

pub use error::{Error, ParseError, Result};
pub use graph::{Graph, RootedGraph};
pub use hom::HomCount;
pub use pattern::{Pattern, PatternSet};
