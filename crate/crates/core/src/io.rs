//! File formats: tree files (JSON), sample files (whitespace-separated
//! symbols) and estimated-tree files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::context_tree::{ContextTree, EstimatedTree, Symbol};
use crate::error::{Error, Result};
use crate::sampler::Sample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub context: Vec<Symbol>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeFile {
    pub alphabet_size: usize,
    pub contexts: Vec<ContextEntry>,
}

impl TreeFile {
    pub fn from_tree(tree: &ContextTree) -> Self {
        Self {
            alphabet_size: tree.alphabet_size(),
            contexts: tree
                .contexts()
                .map(|(c, p)| ContextEntry {
                    context: c.to_vec(),
                    probs: p.to_vec(),
                })
                .collect(),
        }
    }

    pub fn into_tree(self) -> Result<ContextTree> {
        let contexts = self
            .contexts
            .into_iter()
            .map(|e| (e.context, e.probs))
            .collect();
        ContextTree::new(self.alphabet_size, contexts)
    }
}

pub fn parse_tree(text: &str) -> Result<ContextTree> {
    let file: TreeFile = serde_json::from_str(text)?;
    file.into_tree()
}

pub fn tree_to_string(tree: &ContextTree) -> String {
    serde_json::to_string_pretty(&TreeFile::from_tree(tree)).expect("tree serializes") + "\n"
}

pub fn read_tree(path: impl AsRef<Path>) -> Result<ContextTree> {
    parse_tree(&fs::read_to_string(path)?)
}

/// Parses whitespace-separated base-10 symbols. The alphabet size is
/// `alphabet_size` when given, otherwise `max(2, largest symbol + 1)`.
pub fn parse_sample(text: &str, alphabet_size: Option<usize>) -> Result<Sample> {
    let symbols = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<Symbol>()
                .map_err(|e| Error::Parse(format!("bad symbol {tok:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let inferred = symbols
        .iter()
        .map(|&s| s as usize + 1)
        .max()
        .unwrap_or(0)
        .max(2);
    Sample::new(alphabet_size.unwrap_or(inferred), symbols)
}

/// Canonical text form: symbols separated by single spaces, one trailing
/// newline.
pub fn sample_to_string(sample: &Sample) -> String {
    let mut out = String::with_capacity(sample.len() * 2);
    for (i, s) in sample.symbols().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&s.to_string());
    }
    out.push('\n');
    out
}

pub fn read_sample(path: impl AsRef<Path>, alphabet_size: Option<usize>) -> Result<Sample> {
    parse_sample(&fs::read_to_string(path)?, alphabet_size)
}

pub fn write_sample(path: impl AsRef<Path>, sample: &Sample) -> Result<()> {
    fs::write(path, sample_to_string(sample))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateMeta {
    pub delta: f64,
    pub d: usize,
    pub n: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringEntry {
    pub context: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatedTreeFile {
    pub alphabet_size: usize,
    pub contexts: Vec<StringEntry>,
    pub meta: EstimateMeta,
}

impl EstimatedTreeFile {
    pub fn new(tree: &EstimatedTree, meta: EstimateMeta) -> Self {
        Self {
            alphabet_size: tree.alphabet_size,
            contexts: tree
                .strings
                .iter()
                .map(|s| StringEntry { context: s.clone() })
                .collect(),
            meta,
        }
    }

    pub fn to_estimated_tree(&self) -> EstimatedTree {
        EstimatedTree {
            alphabet_size: self.alphabet_size,
            strings: self.contexts.iter().map(|e| e.context.clone()).collect(),
        }
    }
}
