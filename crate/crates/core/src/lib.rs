//! Random symmetric positive definite and correlation matrices whose zero
//! pattern is prescribed by an undirected graph.
//!
//! ```
//! use ggmgen::graph::UndirectedGraph;
//! use ggmgen::linalg::matches_pattern;
//! use ggmgen::samplers::{Method, SamplerConfig};
//!
//! let g = UndirectedGraph::chain(5);
//! let cfg = SamplerConfig::with_seed(7);
//! let batch = Method::Uniform.sample_batch(&g, &cfg, true, 3).unwrap();
//! assert!(batch.iter().all(|m| matches_pattern(m, &g, 0.0)));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
pub use graph::{AcyclicOrientation, Ordering, UndirectedGraph};
pub use linalg::{BnParams, CholeskyFactor, CorrelationMatrix, SymmetricMatrix, UnitRowCholeskyFactor};
pub use samplers::{HemisphereVector, Law, Method, SamplerConfig};
