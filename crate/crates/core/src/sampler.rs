//! Reproducible stationary sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context_tree::{ContextTree, Symbol};
use crate::error::{Error, Result};
use crate::oracle::MarkovEmbedding;

/// Above this many embedding states the sampler burns in instead of drawing
/// the initial past from the exact stationary law.
pub const EXACT_INIT_MAX_STATES: usize = 1 << 12;
pub const BURN_IN_STEPS: usize = 10_000;

/// A finite sequence of symbols over `{0, .., alphabet_size - 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    alphabet_size: usize,
    symbols: Vec<Symbol>,
}

impl Sample {
    pub fn new(alphabet_size: usize, symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidSample(
                "sample must contain at least one symbol".into(),
            ));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s as usize >= alphabet_size) {
            return Err(Error::InvalidSample(format!(
                "symbol {s} is outside the alphabet of size {alphabet_size}"
            )));
        }
        Ok(Self {
            alphabet_size,
            symbols,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }
}

/// Identifies one independent random stream.
///
/// `stream_index` selects the per-trial stream; `lane` separates the
/// independent draws made within a trial (clean chain, contaminant chain,
/// noise mask).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
    #[serde(default)]
    pub lane: u32,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        derive_stream(master_seed, 0)
    }

    pub fn with_lane(self, lane: u32) -> Self {
        Self { lane, ..self }
    }

    /// ChaCha8 keyed by `(master_seed, lane)` on stream `stream_index`; the
    /// map from specs to generators is injective.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..12].copy_from_slice(&self.lane.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream_index);
        rng
    }
}

pub fn derive_stream(master_seed: u64, index: u64) -> SeedSpec {
    SeedSpec {
        master_seed,
        stream_index: index,
        lane: 0,
    }
}

fn draw(row_cdf: &[f64], u: f64) -> usize {
    row_cdf
        .iter()
        .position(|&c| u < c)
        .unwrap_or(row_cdf.len() - 1)
}

fn cdf(row: &[f64]) -> Vec<f64> {
    row.iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

/// Draws `n` consecutive symbols of the stationary chain.
///
/// The first `h` symbols are a stationary past drawn from the exact law of
/// the order-`h` embedding; the remaining ones follow the kernel.
pub fn sample_chain(tree: &ContextTree, n: usize, seed: SeedSpec) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidSample("sample length must be >= 1".into()));
    }
    let alphabet = tree.alphabet_size();
    let order = tree.depth().max(1);
    let mut rng = seed.rng();
    let exact = crate::oracle::state_count(alphabet, order)
        .map(|s| s <= EXACT_INIT_MAX_STATES)
        .unwrap_or(false);

    let mut symbols = Vec::with_capacity(n.max(order));
    if exact {
        let embedding = MarkovEmbedding::new(tree)?;
        let pi = embedding.stationary()?;
        let state_cdf = cdf(&pi);
        let rows: Vec<Vec<f64>> = (0..embedding.n_states())
            .map(|s| cdf(embedding.row(s)))
            .collect();
        let mut state = draw(&state_cdf, rng.random::<f64>());
        symbols.extend(crate::context_tree::decode(state, order, alphabet));
        while symbols.len() < n {
            let a = draw(&rows[state], rng.random::<f64>());
            symbols.push(a as Symbol);
            state = embedding.successor(state, a);
        }
        symbols.truncate(n);
    } else {
        log::warn!(
            "tree depth {} too large for exact stationary initialization; burning in {} steps",
            tree.depth(),
            BURN_IN_STEPS
        );
        let rows: Vec<Vec<f64>> = (0..tree.len()).map(|i| cdf(tree.row_at(i))).collect();
        let depth = tree.depth();
        let mut buffer: Vec<Symbol> = vec![0; depth];
        let mut emitted = 0usize;
        while symbols.len() < n {
            let past = &buffer[buffer.len() - depth..];
            let row = tree.row_index_of(past)?;
            let a = draw(&rows[row], rng.random::<f64>()) as Symbol;
            buffer.push(a);
            if buffer.len() > 4 * depth + 64 {
                buffer.drain(..buffer.len() - depth);
            }
            emitted += 1;
            if emitted > BURN_IN_STEPS {
                symbols.push(a);
            }
        }
    }
    Sample::new(alphabet, symbols)
}
