//! Finite-depth probabilistic context trees.
//!
//! Every string in this crate is stored oldest symbol first, so the most
//! recent symbol of a past is its last element and the "suffix" of a string
//! is a tail slice.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};

pub type Symbol = u8;

/// A set of strings, ordered so that iteration and serialization are stable.
pub type StringSet = BTreeSet<Vec<Symbol>>;

/// Tolerance on row sums when a tree is loaded.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub suffix_free: bool,
    pub complete: bool,
    pub rows_ok: bool,
    pub alpha: f64,
    /// Human-readable description of every violation found.
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.suffix_free && self.complete && self.rows_ok
    }
}

/// Checks the structural and probabilistic invariants of a candidate tree
/// without constructing it.
pub fn validate(alphabet_size: usize, contexts: &[(Vec<Symbol>, Vec<f64>)]) -> ValidationReport {
    let mut problems = Vec::new();

    let mut rows_ok = true;
    let mut alpha = f64::INFINITY;
    for (ctx, row) in contexts {
        if let Some(&s) = ctx.iter().find(|&&s| s as usize >= alphabet_size) {
            rows_ok = false;
            problems.push(format!(
                "context {ctx:?} uses symbol {s} outside the alphabet of size {alphabet_size}"
            ));
        }
        if row.len() != alphabet_size {
            rows_ok = false;
            problems.push(format!(
                "row of context {ctx:?} has {} entries, expected {alphabet_size}",
                row.len()
            ));
        }
        for &p in row {
            alpha = alpha.min(p);
            if !(p.is_finite() && p > 0.0) {
                rows_ok = false;
                problems.push(format!(
                    "row of context {ctx:?} has non-positive entry {p} (non-nullness)"
                ));
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            rows_ok = false;
            problems.push(format!("row of context {ctx:?} sums to {sum}"));
        }
    }
    if contexts.is_empty() {
        alpha = 0.0;
        problems.push("tree has no contexts".to_string());
    }

    let strings: Vec<&[Symbol]> = contexts.iter().map(|(c, _)| c.as_slice()).collect();
    let suffix_free = match first_suffix_violation(&strings) {
        Some((short, long)) => {
            problems.push(format!(
                "not suffix-free: {short:?} is a suffix of {long:?}"
            ));
            false
        }
        None => true,
    };
    let complete = match first_missing_branch(&strings, alphabet_size) {
        Some(missing) => {
            problems.push(format!(
                "not complete: branch {missing:?} is neither a context nor an internal node"
            ));
            false
        }
        None => !contexts.is_empty(),
    };

    ValidationReport {
        suffix_free,
        complete,
        rows_ok,
        alpha,
        problems,
    }
}

/// Returns a pair `(s, w)` where `s` is a suffix of `w` (or a duplicate).
fn first_suffix_violation<'a>(strings: &[&'a [Symbol]]) -> Option<(&'a [Symbol], &'a [Symbol])> {
    for (i, a) in strings.iter().enumerate() {
        for (j, b) in strings.iter().enumerate() {
            if i != j && a.len() <= b.len() && b.ends_with(a) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Returns a string whose parent is an internal node but which is neither a
/// string of the set nor itself an internal node.
fn first_missing_branch(strings: &[&[Symbol]], alphabet_size: usize) -> Option<Vec<Symbol>> {
    let members: BTreeSet<&[Symbol]> = strings.iter().copied().collect();
    let internal: BTreeSet<&[Symbol]> = strings
        .iter()
        .flat_map(|s| (1..=s.len()).map(move |cut| &s[cut..]))
        .collect();
    for node in &internal {
        for a in 0..alphabet_size {
            let mut child = Vec::with_capacity(node.len() + 1);
            child.push(a as Symbol);
            child.extend_from_slice(node);
            if !members.contains(child.as_slice()) && !internal.contains(child.as_slice()) {
                return Some(child);
            }
        }
    }
    None
}

pub fn is_suffix_free<S: AsRef<[Symbol]>>(strings: &[S]) -> bool {
    let refs: Vec<&[Symbol]> = strings.iter().map(|s| s.as_ref()).collect();
    first_suffix_violation(&refs).is_none()
}

/// True when, read as a trie from the most recent symbol backward, every
/// internal node has all `alphabet_size` children. The empty set is not
/// complete.
pub fn is_complete<S: AsRef<[Symbol]>>(strings: &[S], alphabet_size: usize) -> bool {
    let refs: Vec<&[Symbol]> = strings.iter().map(|s| s.as_ref()).collect();
    !refs.is_empty() && first_missing_branch(&refs, alphabet_size).is_none()
}

/// A validated, immutable probabilistic context tree of finite depth.
#[derive(Debug, Clone)]
pub struct ContextTree {
    alphabet_size: usize,
    contexts: Vec<Vec<Symbol>>,
    rows: Vec<Vec<f64>>,
    index: HashMap<Vec<Symbol>, usize>,
    depth: usize,
}

impl ContextTree {
    /// Validates and builds a tree. Rows are renormalized after the
    /// tolerance check so that each sums to one up to rounding.
    pub fn new(alphabet_size: usize, contexts: Vec<(Vec<Symbol>, Vec<f64>)>) -> Result<Self> {
        if alphabet_size < 2 || alphabet_size > Symbol::MAX as usize + 1 {
            return Err(Error::InvalidTree(format!(
                "alphabet size {alphabet_size} must be in 2..=256"
            )));
        }
        let report = validate(alphabet_size, &contexts);
        if !report.is_valid() {
            return Err(Error::InvalidTree(report.problems.join("; ")));
        }
        let mut sorted = contexts;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let (contexts, rows): (Vec<_>, Vec<_>) = sorted
            .into_iter()
            .map(|(c, row)| {
                let sum: f64 = row.iter().sum();
                (c, row.into_iter().map(|p| p / sum).collect::<Vec<_>>())
            })
            .unzip();
        let index = contexts
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let depth = contexts.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Self {
            alphabet_size,
            contexts,
            rows,
            index,
            depth,
        })
    }

    /// The memoryless tree whose only context is the empty string.
    pub fn iid(row: Vec<f64>) -> Result<Self> {
        let n = row.len();
        Self::new(n, vec![(Vec::new(), row)])
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Length of the longest context.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    /// Minimum transition probability over all contexts and symbols.
    pub fn alpha(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contexts(&self) -> impl Iterator<Item = (&[Symbol], &[f64])> + '_ {
        self.contexts
            .iter()
            .zip(&self.rows)
            .map(|(c, r)| (c.as_slice(), r.as_slice()))
    }

    pub fn context_set(&self) -> StringSet {
        self.contexts.iter().cloned().collect()
    }

    pub fn is_context(&self, s: &[Symbol]) -> bool {
        self.index.contains_key(s)
    }

    /// The kernel row attached to a context string.
    pub fn row(&self, context: &[Symbol]) -> Option<&[f64]> {
        self.index.get(context).map(|&i| self.rows[i].as_slice())
    }

    pub fn validation_report(&self) -> ValidationReport {
        let entries: Vec<_> = self
            .contexts
            .iter()
            .cloned()
            .zip(self.rows.iter().cloned())
            .collect();
        validate(self.alphabet_size, &entries)
    }

    pub(crate) fn row_index_of(&self, past: &[Symbol]) -> Result<usize> {
        let longest = self.depth.min(past.len());
        for len in 0..=longest {
            if let Some(&i) = self.index.get(&past[past.len() - len..]) {
                return Ok(i);
            }
        }
        Err(Error::UndeterminedContext {
            past_len: past.len(),
            depth: self.depth,
        })
    }

    pub(crate) fn row_at(&self, index: usize) -> &[f64] {
        &self.rows[index]
    }

    /// The unique context that is a suffix of `past`.
    pub fn context_of(&self, past: &[Symbol]) -> Result<&[Symbol]> {
        self.row_index_of(past).map(|i| self.contexts[i].as_slice())
    }

    /// Next-symbol law given `past`.
    pub fn transition(&self, past: &[Symbol]) -> Result<&[f64]> {
        self.row_index_of(past).map(|i| self.rows[i].as_slice())
    }
}

/// A set of strings returned by the context-tree estimator. It need not be a
/// valid context tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimatedTree {
    pub alphabet_size: usize,
    pub strings: StringSet,
}

impl EstimatedTree {
    pub fn is_context_tree(&self) -> bool {
        let strings: Vec<&Vec<Symbol>> = self.strings.iter().collect();
        is_suffix_free(&strings) && is_complete(&strings, self.alphabet_size)
    }
}

/// Truncation at level `k`: strings no longer than `k`, plus the length-`k`
/// suffix of every longer string.
pub fn truncate<'a, I>(strings: I, k: usize) -> StringSet
where
    I: IntoIterator<Item = &'a Vec<Symbol>>,
{
    strings
        .into_iter()
        .map(|s| {
            if s.len() <= k {
                s.clone()
            } else {
                s[s.len() - k..].to_vec()
            }
        })
        .collect()
}

pub fn tree_equal(a: &StringSet, b: &StringSet) -> bool {
    a == b
}

/// Base-`alphabet_size` code of a string, oldest symbol most significant.
pub fn encode(s: &[Symbol], alphabet_size: usize) -> usize {
    s.iter().fold(0, |acc, &x| acc * alphabet_size + x as usize)
}

pub fn decode(mut code: usize, len: usize, alphabet_size: usize) -> Vec<Symbol> {
    let mut s = vec![0; len];
    for slot in s.iter_mut().rev() {
        *slot = (code % alphabet_size) as Symbol;
        code /= alphabet_size;
    }
    s
}

/// All strings of exactly `len` symbols in code order.
pub fn all_strings(len: usize, alphabet_size: usize) -> impl Iterator<Item = Vec<Symbol>> {
    let total = alphabet_size.pow(len as u32);
    (0..total).map(move |c| decode(c, len, alphabet_size))
}

/// Prepends `a` (as the older symbol) to `s`.
pub fn prepend(a: Symbol, s: &[Symbol]) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(s.len() + 1);
    out.push(a);
    out.extend_from_slice(s);
    out
}

/// Parses a compact binary-ish string such as `"10"` into symbols. Only used
/// for digits `0..=9`.
pub fn parse_digits(s: &str) -> Vec<Symbol> {
    s.bytes().map(|b| b - b'0').collect()
}
