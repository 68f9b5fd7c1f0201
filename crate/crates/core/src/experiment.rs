//! Monte Carlo recovery experiments and exact oracle checks.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{flip_bound, process_bound, zero_inflation_bound};
use crate::contamination::{contaminate_with_mask, noise_mask, NoiseSpec, Regime};
use crate::context_tree::{tree_equal, truncate, ContextTree, StringSet, Symbol};
use crate::error::{Error, Result};
use crate::estimator::{estimate_tree, EstimationConfig};
use crate::oracle::Oracle;
use crate::sampler::{derive_stream, sample_chain, SeedSpec};

/// Lanes of a trial's seed.
pub const LANE_CLEAN: u32 = 0;
pub const LANE_CONTAMINANT: u32 = 1;
pub const LANE_MASK: u32 = 2;

/// Slack allowed when comparing exact oracle values with bounds and floors.
pub const CHECK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Choice<T> {
    Auto,
    Value(T),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub tree: ContextTree,
    pub contaminant: Option<ContextTree>,
    pub regimes: Vec<Regime>,
    pub eps: Vec<f64>,
    pub ns: Vec<usize>,
    pub trials: usize,
    pub delta: Choice<f64>,
    pub d: Choice<usize>,
    pub k: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn check(&self) -> Result<()> {
        if self.regimes.is_empty() || self.eps.is_empty() || self.ns.is_empty() {
            return Err(Error::Config(
                "regime, epsilon and n grids must be nonempty".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if let Some(&e) = self.eps.iter().find(|e| !(0.0..1.0).contains(*e)) {
            return Err(Error::Config(format!("epsilon {e} outside [0, 1)")));
        }
        if self.regimes.contains(&Regime::Process) && self.contaminant.is_none() {
            return Err(Error::MissingContaminant);
        }
        Ok(())
    }
}

/// Resolves `auto` choices: `d` from the oracle and `δ = D_d / 2`, the
/// midpoint of the admissible window.
pub fn resolve_estimation(
    tree: &ContextTree,
    delta: Choice<f64>,
    d: Choice<usize>,
    k: usize,
) -> Result<EstimationConfig> {
    let oracle = Oracle::new(tree)?;
    let d = match d {
        Choice::Value(d) => d,
        Choice::Auto => oracle.depth_d(k)?,
    };
    let delta = match delta {
        Choice::Value(v) => v,
        Choice::Auto => {
            let gap = oracle.divergence(d)?.gap.ok_or_else(|| {
                Error::Config(format!("auto delta needs D_{d}, but C_{d} is empty"))
            })?;
            gap / 2.0
        }
    };
    Ok(EstimationConfig { delta, d, k })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryRow {
    pub regime: Regime,
    pub eps: f64,
    pub n: usize,
    pub trials: usize,
    pub recovered: usize,
}

impl RecoveryRow {
    pub fn rate(&self) -> f64 {
        self.recovered as f64 / self.trials as f64
    }
}

/// Runs one trial and reports whether the truncated estimate equals the
/// truncated true tree.
fn run_trial(
    cfg: &ExperimentConfig,
    est: &EstimationConfig,
    target: &StringSet,
    regime: Regime,
    eps: f64,
    n: usize,
    seed: SeedSpec,
) -> Result<bool> {
    let x = sample_chain(&cfg.tree, n, seed.with_lane(LANE_CLEAN))?;
    let y = match regime {
        Regime::Process => {
            let tree = cfg.contaminant.as_ref().ok_or(Error::MissingContaminant)?;
            Some(sample_chain(tree, n, seed.with_lane(LANE_CONTAMINANT))?)
        }
        _ => None,
    };
    let mask = noise_mask(n, eps, seed.with_lane(LANE_MASK))?;
    let z = contaminate_with_mask(&x, regime, &mask, y.as_ref())?;
    let estimate = estimate_tree(&z, est)?;
    Ok(tree_equal(&truncate(&estimate.strings, est.k), target))
}

/// Recovery counts for every `(regime, ε, n)` cell. Trial `t` of each cell
/// uses `derive_stream(master_seed, t)`, so output is independent of the
/// worker count.
pub fn recover_rate(cfg: &ExperimentConfig) -> Result<Vec<RecoveryRow>> {
    cfg.check()?;
    let est = resolve_estimation(&cfg.tree, cfg.delta, cfg.d, cfg.k)?;
    let contexts: Vec<Vec<Symbol>> = cfg.tree.contexts().map(|(c, _)| c.to_vec()).collect();
    let target = truncate(&contexts, cfg.k);

    let cells: Vec<(Regime, f64, usize)> = cfg
        .regimes
        .iter()
        .flat_map(|&r| {
            cfg.eps
                .iter()
                .flat_map(move |&e| cfg.ns.iter().map(move |&n| (r, e, n)))
        })
        .collect();
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials as u64).map(move |t| (c, t)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let outcomes: Vec<Result<(usize, bool)>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, t)| {
                let (regime, eps, n) = cells[c];
                let seed = derive_stream(cfg.master_seed, t);
                run_trial(cfg, &est, &target, regime, eps, n, seed).map(|ok| (c, ok))
            })
            .collect()
    });

    let mut recovered = vec![0usize; cells.len()];
    for outcome in outcomes {
        let (c, ok) = outcome?;
        if ok {
            recovered[c] += 1;
        }
    }
    Ok(cells
        .iter()
        .zip(recovered)
        .map(|(&(regime, eps, n), rec)| RecoveryRow {
            regime,
            eps,
            n,
            trials: cfg.trials,
            recovered: rec,
        })
        .collect())
}

/// Fixed 17-significant-digit rendering used in CSV output.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn recovery_csv(rows: &[RecoveryRow]) -> String {
    let mut out = String::from("regime,eps,n,trials,recovered,rate\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.regime,
            fmt_real(r.eps),
            r.n,
            r.trials,
            r.recovered,
            fmt_real(r.rate())
        ));
    }
    out
}

/// Uniform deviation bound for a regime, or `None` when the continuity
/// hypothesis of the clean tree fails.
pub fn regime_bound(oracle: &Oracle, noise: &NoiseSpec) -> Result<Option<f64>> {
    let profile = oracle.continuity_rates();
    if !profile.hypothesis_holds() {
        return Ok(None);
    }
    let alpha = oracle.tree().alpha();
    let (beta, star) = (profile.beta_sum, profile.beta_star);
    let eps = noise.epsilon;
    let bound = match noise.regime {
        Regime::ZeroInflation => zero_inflation_bound(eps, alpha, beta, star)?,
        Regime::Flip => flip_bound(eps, alpha, beta, star)?,
        Regime::Process => {
            let y = noise
                .contaminant
                .as_ref()
                .ok_or(Error::MissingContaminant)?;
            process_bound(
                eps,
                oracle.tree().alphabet_size(),
                beta,
                f64::min(alpha * star, y.alpha()),
            )?
        }
    };
    Ok(Some(bound))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheckRow {
    pub regime: Regime,
    pub eps: f64,
    pub kmax: usize,
    pub deviation: f64,
    pub argmax: Vec<Symbol>,
    pub min_conditional: f64,
    /// Lower bound on every contaminated conditional.
    pub floor: f64,
    pub floor_ok: bool,
    pub bound: Option<f64>,
    pub pass: bool,
    pub reason: Option<String>,
}

/// Exhaustive comparison of the exact deviation with the regime's bound.
pub fn oracle_check(
    tree: &ContextTree,
    regime: Regime,
    eps_grid: &[f64],
    kmax: usize,
    contaminant: Option<&ContextTree>,
) -> Result<Vec<OracleCheckRow>> {
    if kmax == 0 {
        return Err(Error::Config("kmax must be >= 1".into()));
    }
    let oracle = Oracle::new(tree)?;
    eps_grid
        .iter()
        .map(|&eps| {
            let mut noise = NoiseSpec::new(regime, eps, SeedSpec::new(0));
            noise.contaminant = contaminant.cloned();
            let sweep = oracle.noisy_sweep(&noise, kmax)?;
            let bound = regime_bound(&oracle, &noise)?;
            let floor = match regime {
                Regime::ZeroInflation => (1.0 - eps) * tree.alpha(),
                Regime::Process => tree
                    .alpha()
                    .min(contaminant.map_or(f64::INFINITY, |y| y.alpha())),
                // convex combination of P(X_0 = a | Z) and P(X_0 != a | Z), both >= α_X
                Regime::Flip => tree.alpha(),
            };
            let floor_ok = sweep.min_conditional >= floor - CHECK_TOLERANCE;
            let (pass, reason) = match bound {
                Some(b) if sweep.deviation_sup <= b + CHECK_TOLERANCE => (true, None),
                Some(b) => (
                    false,
                    Some(format!(
                        "deviation {} exceeds bound {b}",
                        sweep.deviation_sup
                    )),
                ),
                None => (
                    false,
                    Some(
                        "bound undefined: continuity hypothesis fails (some beta_k >= 1)"
                            .to_string(),
                    ),
                ),
            };
            Ok(OracleCheckRow {
                regime,
                eps,
                kmax,
                deviation: sweep.deviation_sup,
                argmax: sweep.argmax,
                min_conditional: sweep.min_conditional,
                floor,
                floor_ok,
                bound,
                pass,
                reason,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> ContextTree {
        ContextTree::new(
            2,
            vec![
                (vec![1], vec![0.3, 0.7]),
                (vec![1, 0], vec![0.6, 0.4]),
                (vec![0, 0], vec![0.8, 0.2]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn auto_resolution_on_reference() {
        let est = resolve_estimation(&reference(), Choice::Auto, Choice::Auto, 2).unwrap();
        assert_eq!(est.d, 2);
        let gap = Oracle::new(&reference())
            .unwrap()
            .divergence(2)
            .unwrap()
            .gap
            .unwrap();
        assert_eq!(est.delta, gap / 2.0);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![RecoveryRow {
            regime: Regime::ZeroInflation,
            eps: 0.05,
            n: 100,
            trials: 4,
            recovered: 3,
        }];
        let csv = recovery_csv(&rows);
        assert_eq!(
            csv,
            "regime,eps,n,trials,recovered,rate\nzero,5.0000000000000003e-2,100,4,3,7.5000000000000000e-1\n"
        );
    }

    #[test]
    fn config_errors() {
        let mut cfg = ExperimentConfig {
            tree: reference(),
            contaminant: None,
            regimes: vec![Regime::Process],
            eps: vec![0.0],
            ns: vec![100],
            trials: 1,
            delta: Choice::Auto,
            d: Choice::Auto,
            k: 2,
            master_seed: 1,
            workers: 1,
        };
        assert!(matches!(recover_rate(&cfg), Err(Error::MissingContaminant)));
        cfg.regimes = vec![Regime::ZeroInflation];
        cfg.trials = 0;
        assert!(recover_rate(&cfg).is_err());
    }
}
