use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use log::info;

use vlmc_core::bounds::{process_constants, zero_inflation_constants};
use vlmc_core::contamination::contaminate;
use vlmc_core::estimator::{estimate_tree, EstimationConfig};
use vlmc_core::experiment::{
    oracle_check, recover_rate, recovery_csv, resolve_estimation, Choice, ExperimentConfig,
    LANE_MASK,
};
use vlmc_core::io::{read_sample, read_tree, sample_to_string, EstimateMeta, EstimatedTreeFile};
use vlmc_core::{sample_chain, ContextTree, NoiseSpec, Regime, SeedSpec};

/// Exit status of `oracle-check` when some row fails its bound or floor.
const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "vlmc",
    version,
    about = "Simulate, contaminate and estimate variable-length Markov chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample path from a context tree.
    Simulate(SimulateArgs),
    /// Contaminate a sample file.
    Contaminate(ContaminateArgs),
    /// Estimate a context tree from a sample file.
    Estimate(EstimateArgs),
    /// Report the deviation bounds and recovery constants of a tree.
    Bounds(BoundsArgs),
    /// Monte Carlo recovery rates as CSV.
    RecoverRate(RecoverArgs),
    /// Compare exact contaminated conditionals with the deviation bounds.
    OracleCheck(OracleArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ContaminateArgs {
    #[arg(long)]
    sample: PathBuf,
    #[arg(long)]
    regime: Regime,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample file of the contaminant chain (process regime only).
    #[arg(long)]
    contaminant: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    sample: PathBuf,
    /// Reference tree; needed to resolve `auto` values.
    #[arg(long)]
    tree: Option<PathBuf>,
    #[arg(long, default_value = "auto", value_parser = parse_choice::<f64>)]
    delta: Choice<f64>,
    #[arg(long, default_value = "auto", value_parser = parse_choice::<usize>)]
    d: Choice<usize>,
    #[arg(long = "K", default_value_t = 2)]
    big_k: usize,
    /// Recorded in the output metadata.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    tree: PathBuf,
    /// Contaminant tree; selects the process-contamination constants.
    #[arg(long)]
    contaminant: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    #[arg(long = "K", default_value_t = 2)]
    big_k: usize,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value = "auto", value_parser = parse_choice::<f64>)]
    delta: Choice<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    contaminant: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', required = true)]
    regime: Vec<Regime>,
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u64).range(1..))]
    n: Vec<u64>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value = "auto", value_parser = parse_choice::<f64>)]
    delta: Choice<f64>,
    #[arg(long, default_value = "auto", value_parser = parse_choice::<usize>)]
    d: Choice<usize>,
    #[arg(long = "K", default_value_t = 2)]
    big_k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    regime: Regime,
    #[arg(long, value_delimiter = ',', required = true)]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    kmax: usize,
    #[arg(long)]
    contaminant: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_choice<T: std::str::FromStr>(s: &str) -> Result<Choice<T>, String>
where
    T::Err: std::fmt::Display,
{
    if s == "auto" {
        Ok(Choice::Auto)
    } else {
        s.parse()
            .map(Choice::Value)
            .map_err(|e| format!("expected `auto` or a number: {e}"))
    }
}

fn usage_error(msg: &str) -> ! {
    Cli::command()
        .error(ErrorKind::ArgumentConflict, msg)
        .exit()
}

fn tree_at(path: &Path) -> Result<ContextTree> {
    read_tree(path).with_context(|| format!("invalid tree file {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let tree = tree_at(&args.tree)?;
    let sample = sample_chain(&tree, args.n as usize, SeedSpec::new(args.seed))?;
    emit(args.out.as_deref(), &sample_to_string(&sample))
}

fn contaminate_cmd(args: ContaminateArgs) -> Result<()> {
    match (args.regime, &args.contaminant) {
        (Regime::Process, None) => usage_error("--regime process requires --contaminant"),
        (Regime::ZeroInflation | Regime::Flip, Some(_)) => {
            usage_error("--contaminant is only used with --regime process")
        }
        _ => {}
    }
    let x = read_sample(&args.sample, None)?;
    let y = args
        .contaminant
        .as_ref()
        .map(|p| read_sample(p, Some(x.alphabet_size())))
        .transpose()?;
    let noise = NoiseSpec::new(
        args.regime,
        args.eps,
        SeedSpec::new(args.seed).with_lane(LANE_MASK),
    );
    let z = contaminate(&x, &noise, y.as_ref())?;
    emit(args.out.as_deref(), &sample_to_string(&z))
}

fn estimate(args: EstimateArgs) -> Result<()> {
    let sample = read_sample(&args.sample, None)?;
    let cfg = match (args.delta, args.d) {
        (Choice::Value(delta), Choice::Value(d)) => EstimationConfig {
            delta,
            d,
            k: args.big_k,
        },
        (delta, d) => {
            let Some(path) = &args.tree else {
                usage_error("`auto` delta or d requires --tree");
            };
            resolve_estimation(&tree_at(path)?, delta, d, args.big_k)?
        }
    };
    info!("estimating with delta = {}, d = {}", cfg.delta, cfg.d);
    let est = estimate_tree(&sample, &cfg)?;
    let meta = EstimateMeta {
        delta: cfg.delta,
        d: cfg.d,
        n: sample.len(),
        seed: args.seed,
    };
    let text = serde_json::to_string_pretty(&EstimatedTreeFile::new(&est, meta))? + "\n";
    emit(args.out.as_deref(), &text)
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let tree = tree_at(&args.tree)?;
    let contaminant = args.contaminant.as_deref().map(tree_at).transpose()?;
    let delta = match args.delta {
        Choice::Value(v) => v,
        Choice::Auto => resolve_estimation(&tree, Choice::Auto, Choice::Auto, args.big_k)?.delta,
    };
    let n = args.n as usize;
    let reports = args
        .eps
        .iter()
        .map(|&eps| match &contaminant {
            Some(y) => process_constants(&tree, y, eps, delta, args.big_k, n),
            None => zero_inflation_constants(&tree, eps, delta, args.big_k, n),
        })
        .collect::<vlmc_core::Result<Vec<_>>>()?;
    emit(
        args.out.as_deref(),
        &(serde_json::to_string_pretty(&reports)? + "\n"),
    )
}

fn recover(args: RecoverArgs) -> Result<()> {
    if args.regime.contains(&Regime::Process) && args.contaminant.is_none() {
        usage_error("--regime process requires --contaminant");
    }
    let cfg = ExperimentConfig {
        tree: tree_at(&args.tree)?,
        contaminant: args.contaminant.as_deref().map(tree_at).transpose()?,
        regimes: args.regime,
        eps: args.eps,
        ns: args.n.iter().map(|&n| n as usize).collect(),
        trials: args.trials,
        delta: args.delta,
        d: args.d,
        k: args.big_k,
        master_seed: args.seed,
        workers: args.workers,
    };
    let rows = recover_rate(&cfg)?;
    emit(args.out.as_deref(), &recovery_csv(&rows))
}

fn oracle(args: OracleArgs) -> Result<bool> {
    match (args.regime, &args.contaminant) {
        (Regime::Process, None) => usage_error("--regime process requires --contaminant"),
        (Regime::ZeroInflation | Regime::Flip, Some(_)) => {
            usage_error("--contaminant is only used with --regime process")
        }
        _ => {}
    }
    let tree = tree_at(&args.tree)?;
    let contaminant = args.contaminant.as_deref().map(tree_at).transpose()?;
    let rows = oracle_check(
        &tree,
        args.regime,
        &args.eps,
        args.kmax,
        contaminant.as_ref(),
    )?;
    emit(
        args.out.as_deref(),
        &(serde_json::to_string_pretty(&rows)? + "\n"),
    )?;
    Ok(rows.iter().all(|r| r.pass && r.floor_ok))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(a) => simulate(a)?,
        Command::Contaminate(a) => contaminate_cmd(a)?,
        Command::Estimate(a) => estimate(a)?,
        Command::Bounds(a) => bounds(a)?,
        Command::RecoverRate(a) => recover(a)?,
        Command::OracleCheck(a) => {
            if !oracle(a)? {
                return Ok(ExitCode::from(EXIT_CHECK_FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
