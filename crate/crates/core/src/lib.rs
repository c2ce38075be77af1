//! Rumor-source detection on networks under querying with untruthful answers.
//!
//! The library simulates SI rumor diffusion on regular trees and general
//! graphs, interrogates the infected nodes through noisy identity and
//! direction questions, and estimates the source with batch (SB-Q) and
//! interactive (ID-Q) querying strategies plus their MLE baselines. Closed
//! form detection-probability and budget bounds live in [`bounds`], and
//! [`experiment`] drives seeded Monte Carlo sweeps that tally detection
//! probabilities into CSV/SVG outputs.

pub mod bounds;
pub mod centrality;
pub mod diffusion;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod graph;
pub mod querying;
pub mod seed;

pub use error::Error;
pub use graph::{Graph, GraphKind, LazyRegularTree, NodeId};

pub type Result<T> = std::result::Result<T, Error>;
