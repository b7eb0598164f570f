//! Community detection on weighted undirected graphs.
//!
//! The main optimizer is [`combo`], a search over mergers, splits and
//! Kernighan-Lin recombinations of community pairs that works with either
//! [`ObjectiveKind::Modularity`] or [`ObjectiveKind::CodeLength`] (the map
//! equation). A [`louvain`] baseline, [`partition::nmi`], and a planted
//! partition generator in [`synthgen`] support benchmarking.

pub mod combo;
pub mod datasets;
pub mod error;
pub mod graph;
pub mod io;
pub mod louvain;
pub mod objective;
pub mod partition;
pub mod synthgen;

pub use combo::{optimize, optimize_from, ComboConfig, ComboResult};
pub use error::{Error, Result};
pub use graph::Graph;
pub use louvain::{louvain, LouvainConfig, LouvainResult};
pub use objective::{brute_force_best, codelength, modularity, ObjectiveKind};
pub use partition::{nmi, Partition};
pub use synthgen::{generate, PlantedSpec};
