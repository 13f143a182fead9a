//! Core-periphery structure inference for undirected simple graphs.
//!
//! Two constrained stochastic block models are fit by Gibbs sampling: a
//! hub-and-spoke model (two blocks, within-core density > core-periphery
//! density > within-periphery density) and a layered model (`l` blocks with
//! strictly decreasing layer densities, where the density of an edge is set
//! by the outermost endpoint). Model selection between the two is by minimum
//! description length, estimated by Monte Carlo marginalization over the
//! ordered density priors.
//!
//! The crate also ships the classic deterministic baselines (k-core
//! decomposition, two-block edge-count fitting), partition comparison
//! metrics (VI, NVI, AMI), planted-model generators for validation
//! experiments, and a CLI (`cpsbm`) wrapping all of it.

pub mod classic;
pub mod config;
pub mod error;
pub mod graph;
pub mod manifest;
pub mod mdl;
pub mod metrics;
pub mod model;
pub mod partition;
pub mod pipeline;
pub mod rng;
pub mod sampler;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{load_edge_list, preprocess, EdgeListFormat, Graph, RawEdgeList};
pub use model::{BlockStats, DensityVector, ModelKind};
pub use partition::Partition;
