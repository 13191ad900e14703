//! Core-periphery random hypergraph model with layered, rank-dependent edge
//! probabilities.
//!
//! The crate covers the full workflow: loading and cleaning hypergraphs,
//! computing the partition statistics that make the likelihood linear in the
//! number of nodes, maximum-likelihood and MAP fitting (optionally learning
//! ranks from node features), exact sampling, core-size thresholds, layer
//! selection and the logistic / permutation baselines.

// NaN must fail validation, hence `!(x > 0.0)`; index loops mirror the math.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod cigam;
pub mod coresize;
pub mod error;
pub mod hypergraph;
pub mod modelselect;
pub mod numeric;
pub mod partition;
pub mod rng;
pub mod sampler;

pub use cigam::{
    edge_probability, fit, gradient, log_barrier, log_likelihood, log_prior, CPrior, FitOptions,
    FitResult, FittedModel, GammaPrior, ModelParams, PriorConfig, RankMap, RankSource,
};
pub use error::{Error, Result};
pub use hypergraph::{Edge, FeatureMatrix, Hypergraph, Normalization, OrderRange};
pub use partition::{LayerConfig, PartitionStats, Partitioner, RankVector};
pub use rng::RngStream;
