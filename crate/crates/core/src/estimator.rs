//! Counts, smoothed empirical kernels and the context-tree estimator.

use serde::{Deserialize, Serialize};

use crate::context_tree::{all_strings, encode, prepend, EstimatedTree, StringSet, Symbol};
use crate::error::{Error, Result};
use crate::sampler::Sample;

/// Cap on the number of candidate strings of the deepest level.
pub const MAX_CANDIDATES: usize = 1 << 16;

/// Number of occurrences of `w` in the sample (overlaps counted). The empty
/// string occurs `n + 1` times.
pub fn count(sample: &Sample, w: &[Symbol]) -> u64 {
    let z = sample.symbols();
    if w.len() > z.len() {
        return 0;
    }
    if w.is_empty() {
        return z.len() as u64 + 1;
    }
    z.windows(w.len()).filter(|win| *win == w).count() as u64
}

/// Occurrence counts of every string up to a fixed length, filled in one
/// pass with a rolling window.
#[derive(Debug, Clone)]
pub struct CountTable {
    alphabet_size: usize,
    n: usize,
    /// `by_len[l][code]` counts the string of length `l` with that code.
    by_len: Vec<Vec<u64>>,
}

impl CountTable {
    pub fn new(sample: &Sample, max_len: usize) -> Result<Self> {
        let alphabet_size = sample.alphabet_size();
        let top = alphabet_size
            .checked_pow(max_len as u32)
            .filter(|&c| c <= MAX_CANDIDATES * alphabet_size)
            .ok_or_else(|| Error::Config(format!("count table of depth {max_len} is too large")))?;
        let mut by_len: Vec<Vec<u64>> = (0..=max_len)
            .map(|l| vec![0; alphabet_size.pow(l as u32)])
            .collect();
        by_len[0][0] = sample.len() as u64 + 1;
        let mut code = 0usize;
        for (t, &s) in sample.symbols().iter().enumerate() {
            code = (code * alphabet_size + s as usize) % top;
            let mut width = 1;
            for (l, counts) in by_len.iter_mut().enumerate().skip(1) {
                if l > t + 1 {
                    break;
                }
                width *= alphabet_size;
                counts[code % width] += 1;
            }
        }
        Ok(Self {
            alphabet_size,
            n: sample.len(),
            by_len,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_len(&self) -> usize {
        self.by_len.len() - 1
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// `N_n(w)`; panics if `w` is longer than the table depth.
    pub fn get(&self, w: &[Symbol]) -> u64 {
        self.by_len[w.len()][encode(w, self.alphabet_size)]
    }

    /// `N_n(w·) = Σ_b N_n(wb)`.
    pub fn followers(&self, w: &[Symbol]) -> u64 {
        let base = encode(w, self.alphabet_size) * self.alphabet_size;
        self.by_len[w.len() + 1][base..base + self.alphabet_size]
            .iter()
            .sum()
    }

    /// `p̂(a|w) = (N(wa) + 1) / (N(w·) + |A|)`.
    pub fn kernel(&self, w: &[Symbol]) -> Vec<f64> {
        let n = self.alphabet_size;
        let base = encode(w, n) * n;
        let row = &self.by_len[w.len() + 1][base..base + n];
        let den = row.iter().sum::<u64>() + n as u64;
        row.iter().map(|&c| (c + 1) as f64 / den as f64).collect()
    }

    /// `Δ_n(w) = max_a |p̂(a|w) - p̂(a|suf(w))|` for nonempty `w`.
    pub fn delta(&self, w: &[Symbol]) -> f64 {
        assert!(!w.is_empty(), "delta is defined for nonempty strings");
        let own = self.kernel(w);
        let parent = self.kernel(&w[1..]);
        own.iter()
            .zip(&parent)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn empirical_kernel(sample: &Sample, w: &[Symbol]) -> Result<Vec<f64>> {
    if w.len() + 1 > sample.len() {
        return Err(Error::Config(format!(
            "kernel of a length-{} string needs at least {} symbols",
            w.len(),
            w.len() + 1
        )));
    }
    Ok(CountTable::new(sample, w.len() + 1)?.kernel(w))
}

pub fn delta(sample: &Sample, w: &[Symbol]) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::Domain("delta needs a nonempty string".into()));
    }
    if w.len() + 1 > sample.len() {
        return Err(Error::Config(format!(
            "delta of a length-{} string needs at least {} symbols",
            w.len(),
            w.len() + 1
        )));
    }
    Ok(CountTable::new(sample, w.len() + 1)?.delta(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub delta: f64,
    pub d: usize,
    /// Truncation level used when comparing with a reference tree.
    pub k: usize,
}

impl EstimationConfig {
    pub fn check(&self, n: usize) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::Config(format!(
                "delta must be a positive real, got {}",
                self.delta
            )));
        }
        if self.d == 0 || self.k == 0 {
            return Err(Error::Config("d and K must be >= 1".into()));
        }
        if self.k > self.d {
            return Err(Error::Config(format!(
                "K = {} exceeds d = {}",
                self.k, self.d
            )));
        }
        if self.d >= n {
            return Err(Error::Config(format!(
                "d = {} must be smaller than the sample length {n}",
                self.d
            )));
        }
        Ok(())
    }
}

/// The context-tree estimator: every `ω` with `1 <= |ω| <= d` such that
/// (i) `Δ(a·suf(ω)) > δ` for some symbol `a`, and (ii) `Δ(uω) <= δ` for all
/// nonempty `u` with `|uω| <= d`. Candidates range over all strings, seen
/// or not.
pub fn estimate_tree(sample: &Sample, cfg: &EstimationConfig) -> Result<EstimatedTree> {
    cfg.check(sample.len())?;
    let table = CountTable::new(sample, cfg.d + 1)?;
    Ok(estimate_from_counts(&table, cfg.delta, cfg.d))
}

pub fn estimate_from_counts(table: &CountTable, delta: f64, d: usize) -> EstimatedTree {
    let n = table.alphabet_size();
    // deltas[l][code] = Δ of the length-l string, l = 1..=d
    let mut deltas: Vec<Vec<f64>> = vec![Vec::new()];
    for l in 1..=d {
        deltas.push(all_strings(l, n).map(|w| table.delta(&w)).collect());
    }
    // deeper[l][code] = max Δ over strings of length <= d strictly extending it
    let mut deeper: Vec<Vec<f64>> = (0..=d).map(|l| vec![0.0; n.pow(l as u32)]).collect();
    for l in (1..d).rev() {
        for code in 0..n.pow(l as u32) {
            let mut m = 0.0_f64;
            for a in 0..n {
                // prepending `a` to a string of length l adds a * n^l to its code
                let child = a * n.pow(l as u32) + code;
                m = m.max(deltas[l + 1][child]).max(deeper[l + 1][child]);
            }
            deeper[l][code] = m;
        }
    }

    let mut strings = StringSet::new();
    for l in 1..=d {
        for (code, w) in all_strings(l, n).enumerate() {
            let suffix = &w[1..];
            let refines =
                (0..n).any(|a| deltas[l][encode(&prepend(a as Symbol, suffix), n)] > delta);
            if refines && deeper[l][code] <= delta {
                strings.insert(w);
            }
        }
    }
    EstimatedTree {
        alphabet_size: n,
        strings,
    }
}

/// Strings satisfying only condition (i); used to check monotonicity in δ.
pub fn refinement_candidates(table: &CountTable, delta: f64, d: usize) -> StringSet {
    let n = table.alphabet_size();
    (1..=d)
        .flat_map(|l| all_strings(l, n))
        .filter(|w| (0..n).any(|a| table.delta(&prepend(a as Symbol, &w[1..])) > delta))
        .collect()
}
