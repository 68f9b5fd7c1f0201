//! Contamination regimes applied to clean samples.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::context_tree::{ContextTree, Symbol};
use crate::error::{Error, Result};
use crate::sampler::{Sample, SeedSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Each 1 is read as 0 with probability ε.
    #[serde(rename = "zero")]
    ZeroInflation,
    /// With probability ε the symbol of an independent chain Y is read.
    Process,
    /// Each binary symbol is flipped with probability ε.
    Flip,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::ZeroInflation => "zero",
            Regime::Process => "process",
            Regime::Flip => "flip",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Regime::ZeroInflation),
            "process" => Ok(Regime::Process),
            "flip" => Ok(Regime::Flip),
            other => Err(Error::Parse(format!(
                "unknown regime {other:?} (expected zero|process|flip)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NoiseSpec {
    pub regime: Regime,
    pub epsilon: f64,
    /// Law of Y; only used by process contamination.
    pub contaminant: Option<ContextTree>,
    pub seed: SeedSpec,
}

impl NoiseSpec {
    pub fn new(regime: Regime, epsilon: f64, seed: SeedSpec) -> Self {
        Self {
            regime,
            epsilon,
            contaminant: None,
            seed,
        }
    }

    pub fn with_contaminant(mut self, tree: ContextTree) -> Self {
        self.contaminant = Some(tree);
        self
    }

    pub(crate) fn check_epsilon(&self) -> Result<()> {
        check_epsilon(self.epsilon)
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "epsilon must lie in [0, 1), got {epsilon}"
        )))
    }
}

/// The i.i.d. mask `ξ_1..ξ_n` with `P(ξ_t = 1) = 1 - ε`; `true` means the
/// clean symbol is kept.
pub fn noise_mask(n: usize, epsilon: f64, seed: SeedSpec) -> Result<Vec<bool>> {
    check_epsilon(epsilon)?;
    if n == 0 {
        return Err(Error::InvalidSample("mask length must be >= 1".into()));
    }
    let mut rng = seed.rng();
    Ok((0..n).map(|_| rng.random::<f64>() >= epsilon).collect())
}

/// Contaminates `x` with a mask drawn from `noise.seed`.
pub fn contaminate(x: &Sample, noise: &NoiseSpec, y: Option<&Sample>) -> Result<Sample> {
    check_inputs(x, noise.regime, y)?;
    let mask = noise_mask(x.len(), noise.epsilon, noise.seed)?;
    contaminate_with_mask(x, noise.regime, &mask, y)
}

fn check_inputs(x: &Sample, regime: Regime, y: Option<&Sample>) -> Result<()> {
    match (regime, y) {
        (Regime::Process, None) => return Err(Error::MissingContaminant),
        (Regime::Process, Some(y)) => {
            if y.alphabet_size() != x.alphabet_size() {
                return Err(Error::AlphabetMismatch(format!(
                    "contaminant alphabet {} differs from clean alphabet {}",
                    y.alphabet_size(),
                    x.alphabet_size()
                )));
            }
            if y.len() != x.len() {
                return Err(Error::LengthMismatch {
                    clean: x.len(),
                    contaminant: y.len(),
                });
            }
        }
        (_, Some(_)) => return Err(Error::UnexpectedContaminant),
        (_, None) => {
            if x.alphabet_size() != 2 {
                return Err(Error::AlphabetMismatch(format!(
                    "{regime} contamination needs a binary alphabet, sample has {}",
                    x.alphabet_size()
                )));
            }
        }
    }
    Ok(())
}

/// Applies a given mask. Sharing one mask (and one `x`, `y`) across regimes
/// yields the coupled contaminated chains.
pub fn contaminate_with_mask(
    x: &Sample,
    regime: Regime,
    mask: &[bool],
    y: Option<&Sample>,
) -> Result<Sample> {
    check_inputs(x, regime, y)?;
    if mask.len() != x.len() {
        return Err(Error::LengthMismatch {
            clean: x.len(),
            contaminant: mask.len(),
        });
    }
    let xs = x.symbols();
    let z: Vec<Symbol> = match regime {
        Regime::ZeroInflation => xs
            .iter()
            .zip(mask)
            .map(|(&s, &keep)| if keep { s } else { 0 })
            .collect(),
        Regime::Flip => xs
            .iter()
            .zip(mask)
            .map(|(&s, &keep)| if keep { s } else { 1 - s })
            .collect(),
        Regime::Process => {
            let ys = y.expect("checked above").symbols();
            xs.iter()
                .zip(ys)
                .zip(mask)
                .map(|((&s, &t), &keep)| if keep { s } else { t })
                .collect()
        }
    };
    Sample::new(x.alphabet_size(), z)
}
