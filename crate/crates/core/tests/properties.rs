//! Property tests over random trees, samples and bound inputs.

#![allow(clippy::needless_range_loop)]

mod common;

use proptest::prelude::*;

use vlmc_core::bounds::{flip_bound, process_bound, zero_inflation_bound};
use vlmc_core::contamination::{contaminate_with_mask, noise_mask};
use vlmc_core::context_tree::{truncate, Symbol};
use vlmc_core::estimator::{refinement_candidates, CountTable};
use vlmc_core::experiment::regime_bound;
use vlmc_core::{
    derive_stream, sample_chain, ContextTree, NoiseSpec, Oracle, Regime, Sample, SeedSpec,
};

const MAX_DEPTH: usize = 3;

/// Binary tree of depth <= 3 grown from split flags; node `s` splits when
/// `splits[slot(s)]` is set.
fn grow(splits: &[bool], rows: &[f64]) -> ContextTree {
    fn slot(s: &[Symbol]) -> usize {
        // breadth-first index of the node
        (1usize << s.len()) - 1 + vlmc_core::context_tree::encode(s, 2)
    }
    let mut leaves = Vec::new();
    let mut stack = vec![Vec::<Symbol>::new()];
    while let Some(s) = stack.pop() {
        if s.len() < MAX_DEPTH && splits[slot(&s)] {
            for a in 0..2 {
                let mut child = vec![a];
                child.extend(&s);
                stack.push(child);
            }
        } else {
            leaves.push(s);
        }
    }
    let contexts = leaves
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, vec![rows[i], 1.0 - rows[i]]))
        .collect();
    ContextTree::new(2, contexts).unwrap()
}

fn trees() -> impl Strategy<Value = ContextTree> {
    (
        prop::collection::vec(any::<bool>(), 7),
        prop::collection::vec(0.1f64..0.9, 8),
    )
        .prop_map(|(splits, rows)| grow(&splits, &rows))
}

fn samples() -> impl Strategy<Value = Sample> {
    (2usize..=3)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(0..n as Symbol, 10..300)))
        .prop_map(|(n, z)| Sample::new(n, z).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_is_idempotent(tree in trees(), k in 1usize..5) {
        let contexts: Vec<Vec<Symbol>> = tree.contexts().map(|(c, _)| c.to_vec()).collect();
        let once = truncate(&contexts, k);
        let twice = truncate(&once, k);
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.iter().all(|s| s.len() <= k));
    }

    #[test]
    fn continuity_profile_shape(tree in trees()) {
        let p = Oracle::new(&tree).unwrap().continuity_rates();
        prop_assert!(p.beta_k.windows(2).all(|w| w[0] >= w[1]));
        for (k, &b) in p.beta_k.iter().enumerate() {
            if k >= tree.depth() {
                prop_assert_eq!(b, 0.0);
            }
        }
        if p.hypothesis_holds() {
            prop_assert!(p.beta_star > 0.0 && p.beta_star <= 1.0);
        }
    }

    #[test]
    fn conditionals_agree_with_rows(tree in trees()) {
        let oracle = Oracle::new(&tree).unwrap();
        for (ctx, row) in tree.contexts() {
            let got = oracle.conditional_on_string(ctx).unwrap();
            prop_assert!(got.iter().zip(row).all(|(a, b)| (a - b).abs() <= 1e-12));
        }
    }

    #[test]
    fn contaminated_rows_and_floors(
        tree in trees(),
        eps in 0.0f64..0.5,
        regime in prop_oneof![Just(Regime::ZeroInflation), Just(Regime::Flip), Just(Regime::Process)],
    ) {
        let oracle = Oracle::new(&tree).unwrap();
        let y = ContextTree::iid(vec![0.3, 0.7]).unwrap();
        let mut noise = NoiseSpec::new(regime, eps, SeedSpec::new(0));
        if regime == Regime::Process {
            noise.contaminant = Some(y.clone());
        }
        let sweep = oracle.noisy_sweep(&noise, 4).unwrap();
        let floor = match regime {
            Regime::ZeroInflation => (1.0 - eps) * tree.alpha(),
            Regime::Process => tree.alpha().min(y.alpha()),
            Regime::Flip => tree.alpha(),
        };
        prop_assert!(sweep.min_conditional >= floor - 1e-12);
        for omega in [vec![], vec![1], vec![0, 1, 1]] {
            let p = oracle.noisy_conditional(&noise, &omega).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        if let Some(bound) = regime_bound(&oracle, &noise).unwrap() {
            prop_assert!(sweep.deviation_sup <= bound + 1e-12, "{} > {}", sweep.deviation_sup, bound);
        }
    }

    #[test]
    fn count_and_kernel_invariants(sample in samples(), len in 0usize..4) {
        let n = sample.len();
        let table = CountTable::new(&sample, len + 1).unwrap();
        let a = sample.alphabet_size();
        for code in 0..a.pow(len as u32) {
            let w = vlmc_core::context_tree::decode(code, len, a);
            let c = table.get(&w);
            if !w.is_empty() {
                prop_assert!(c as usize <= n + 1 - w.len());
            }
            prop_assert!(table.followers(&w) <= c);
            let k = table.kernel(&w);
            prop_assert!((k.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(k.iter().all(|&p| p > 0.0 && p < 1.0));
        }
    }

    #[test]
    fn raising_delta_shrinks_refinements(sample in samples(), d1 in 0.001f64..0.5, step in 0.0f64..0.5) {
        let table = CountTable::new(&sample, 4).unwrap();
        let low = refinement_candidates(&table, d1, 3);
        let high = refinement_candidates(&table, d1 + step, 3);
        prop_assert!(high.is_subset(&low));
    }

    #[test]
    fn bound_ordering(
        eps in 0.0f64..0.99,
        alpha in 0.01f64..=0.5,
        beta in 0.0f64..5.0,
        beta_star in 0.01f64..=1.0,
        more in 0.0f64..0.5,
    ) {
        let k1 = flip_bound(eps, alpha, beta, beta_star).unwrap();
        let k2 = zero_inflation_bound(eps, alpha, beta, beta_star).unwrap();
        let k3 = process_bound(eps, 2, beta, f64::min(alpha * beta_star, alpha)).unwrap();
        prop_assert!(k2 <= k1 && k1 <= k3);
        let e2 = (eps + more).min(0.99);
        prop_assert!(flip_bound(e2, alpha, beta, beta_star).unwrap() >= k1);
        prop_assert!(zero_inflation_bound(e2, alpha, beta, beta_star).unwrap() >= k2);
        prop_assert!(process_bound(e2, 2, beta, f64::min(alpha * beta_star, alpha)).unwrap() >= k3);
    }

    #[test]
    fn contamination_invariants(seed in any::<u64>(), eps in 0.0f64..0.9, n in 1usize..400) {
        let tree = ContextTree::iid(vec![0.4, 0.6]).unwrap();
        let x = sample_chain(&tree, n, derive_stream(seed, 0)).unwrap();
        let y = sample_chain(&tree, n, derive_stream(seed, 1)).unwrap();
        let mask = noise_mask(n, eps, derive_stream(seed, 2)).unwrap();
        let zero = contaminate_with_mask(&x, Regime::ZeroInflation, &mask, None).unwrap();
        let flip = contaminate_with_mask(&x, Regime::Flip, &mask, None).unwrap();
        let proc = contaminate_with_mask(&x, Regime::Process, &mask, Some(&y)).unwrap();
        for t in 0..n {
            let (xt, yt) = (x.symbols()[t], y.symbols()[t]);
            if xt == 0 {
                prop_assert_eq!(zero.symbols()[t], 0);
            }
            prop_assert!(zero.symbols()[t] <= xt);
            prop_assert_eq!(flip.symbols()[t] != xt, !mask[t]);
            prop_assert!(proc.symbols()[t] == xt || proc.symbols()[t] == yt);
        }
    }
}
