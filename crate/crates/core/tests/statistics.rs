//! Sampling-based checks against the exact oracle.

mod common;

use common::{fair_coin, reference};
use vlmc_core::context_tree::{all_strings, parse_digits, StringSet};
use vlmc_core::estimator::{estimate_tree, CountTable, EstimationConfig};
use vlmc_core::experiment::resolve_estimation;
use vlmc_core::experiment::Choice;
use vlmc_core::{derive_stream, sample_chain, Oracle};

/// Empirical frequency of every string of length <= 3 lies within five
/// batch-means standard errors of its stationary probability.
#[test]
fn stationarity_of_long_samples() {
    let tree = reference();
    let oracle = Oracle::new(&tree).unwrap();
    let n = 1_000_000;
    let batches = 100;
    let sample = sample_chain(&tree, n, derive_stream(11, 0)).unwrap();
    let z = sample.symbols();
    for len in 1..=3 {
        for w in all_strings(len, 2) {
            let hits: Vec<f64> = z
                .windows(len)
                .map(|win| f64::from(win == w.as_slice()))
                .collect();
            let mean = hits.iter().sum::<f64>() / hits.len() as f64;
            let size = hits.len() / batches;
            let means: Vec<f64> = hits
                .chunks_exact(size)
                .map(|c| c.iter().sum::<f64>() / size as f64)
                .collect();
            let var =
                means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (means.len() - 1) as f64;
            let se = (var / means.len() as f64).sqrt();
            let mu = oracle.marginal_prob(&w);
            assert!(
                (mean - mu).abs() <= 5.0 * se,
                "{w:?}: {mean} vs {mu} (se {se})"
            );
        }
    }
}

#[test]
fn estimator_recovers_reference_tree() {
    let tree = reference();
    let cfg = resolve_estimation(&tree, Choice::Auto, Choice::Auto, 2).unwrap();
    assert_eq!(cfg.d, 2);
    let sample = sample_chain(&tree, 200_000, derive_stream(5, 0)).unwrap();
    let est = estimate_tree(&sample, &cfg).unwrap();
    let expected: StringSet = ["1", "10", "00"].iter().map(|s| parse_digits(s)).collect();
    assert_eq!(est.strings, expected);
    assert!(est.is_context_tree());
}

#[test]
fn estimator_on_fair_coin_is_empty() {
    let cfg = resolve_estimation(&reference(), Choice::Auto, Choice::Auto, 2).unwrap();
    let sample = sample_chain(&fair_coin(), 200_000, derive_stream(6, 0)).unwrap();
    let est = estimate_tree(&sample, &cfg).unwrap();
    assert!(est.strings.is_empty(), "{:?}", est.strings);
    assert!(!est.is_context_tree());
}

#[test]
fn iid_deltas_vanish() {
    let sample = sample_chain(&fair_coin(), 1_000_000, derive_stream(8, 0)).unwrap();
    let table = CountTable::new(&sample, 4).unwrap();
    for len in 1..=3 {
        for w in all_strings(len, 2) {
            assert!(table.delta(&w) < 0.01, "{w:?}: {}", table.delta(&w));
        }
    }
}

#[test]
fn estimator_is_deterministic() {
    let sample = sample_chain(&reference(), 5_000, derive_stream(9, 0)).unwrap();
    let cfg = EstimationConfig {
        delta: 0.03,
        d: 3,
        k: 2,
    };
    assert_eq!(
        estimate_tree(&sample, &cfg).unwrap(),
        estimate_tree(&sample, &cfg).unwrap()
    );
}
