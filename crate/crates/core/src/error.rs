use thiserror::Error;

use crate::context_tree::Symbol;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("context undetermined: past of length {past_len} is shorter than the matching branch (depth {depth})")]
    UndeterminedContext { past_len: usize, depth: usize },

    #[error(
        "power iteration did not converge after {iterations} sweeps (last change {last_change:e})"
    )]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("state space with {states} states exceeds the exact-oracle limit of {limit}")]
    StateSpaceTooLarge { states: usize, limit: usize },

    #[error("string {0:?} has zero stationary mass")]
    ZeroMassString(Vec<Symbol>),

    #[error("observed past {0:?} has zero probability under the contaminated process")]
    ZeroMassPast(Vec<Symbol>),

    #[error("no witness: internal node {0:?} is not refined by any divergence set C_k")]
    NoWitness(Vec<Symbol>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("length mismatch: clean sample has {clean} symbols, contaminant has {contaminant}")]
    LengthMismatch { clean: usize, contaminant: usize },

    #[error("process contamination requires a contaminant")]
    MissingContaminant,

    #[error("a contaminant is only accepted by process contamination")]
    UnexpectedContaminant,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
