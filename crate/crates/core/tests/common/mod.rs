#![allow(dead_code)]

use vlmc_core::ContextTree;

pub fn tree(rows: &[(&str, [f64; 2])]) -> ContextTree {
    let contexts = rows
        .iter()
        .map(|(s, p)| (vlmc_core::context_tree::parse_digits(s), p.to_vec()))
        .collect();
    ContextTree::new(2, contexts).unwrap()
}

/// Depth-2 binary tree {1, 10, 00}.
pub fn reference() -> ContextTree {
    tree(&[("1", [0.3, 0.7]), ("10", [0.6, 0.4]), ("00", [0.8, 0.2])])
}

/// Same shape as `reference` with every β_k < 1.
pub fn mild() -> ContextTree {
    tree(&[
        ("1", [0.4, 0.6]),
        ("10", [0.55, 0.45]),
        ("00", [0.65, 0.35]),
    ])
}

pub fn fair_coin() -> ContextTree {
    ContextTree::iid(vec![0.5, 0.5]).unwrap()
}
