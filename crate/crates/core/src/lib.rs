//! Spectral gaps of random walks on graphs and their complements.
//!
//! The crate builds simple undirected graphs (from edge lists, named families,
//! seeded random models, or exhaustive enumeration), computes walk spectra,
//! mixing curves, bottleneck ratios and couplings, and checks a collection of
//! gap bounds against measured values, emitting [`BoundReport`]s.

pub mod bottleneck;
pub mod bounds;
pub mod coupling;
pub mod enumerate;
pub mod error;
pub mod family;
pub mod graph;
pub mod numfmt;
pub mod report;
pub mod rng;
pub mod scan;
pub mod spectra;

pub use error::{Error, Result};
pub use family::{build_family, GraphFamilySpec};
pub use graph::{parse_edge_list, Graph, PairSet};
pub use report::{BoundReport, Sense, TheoremId};
