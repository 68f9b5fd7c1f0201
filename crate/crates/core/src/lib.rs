//! Variable-length Markov chains under contamination.
//!
//! The crate simulates finite-depth VLMCs, contaminates samples under
//! zero-inflation, process and flip noise, estimates context trees from the
//! contaminated samples, and evaluates the uniform deviation bounds against
//! an exact hidden-state oracle.

pub mod bounds;
pub mod contamination;
pub mod context_tree;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod io;
pub mod oracle;
pub mod sampler;

pub use contamination::{NoiseSpec, Regime};
pub use context_tree::{ContextTree, EstimatedTree, StringSet, Symbol};
pub use error::{Error, Result};
pub use oracle::Oracle;
pub use sampler::{derive_stream, sample_chain, Sample, SeedSpec};
