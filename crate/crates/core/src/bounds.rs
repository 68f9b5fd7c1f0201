//! Closed-form robustness bounds and recovery constants.
//!
//! All inputs come from the exact oracle, never from samples. Constants that
//! depend on `β*` are `None` when the continuity hypothesis fails (some
//! `β_k >= 1`), because the product `Π(1 - β_k)` is then not a positive
//! constant and the formulas have no meaning.

use std::f64::consts::E;

use serde::Serialize;

use crate::context_tree::ContextTree;
use crate::error::{Error, Result};
use crate::oracle::{ContinuityProfile, Oracle};

fn check_common(eps: f64, alpha: f64, beta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!(
            "epsilon must lie in [0, 1), got {eps}"
        )));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    Ok(())
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1], got {v}")))
    }
}

/// Zero-inflation bound `k₂ = ε[1 + 4β / min(1, (1+ε)αβ*)]`.
pub fn zero_inflation_bound(eps: f64, alpha: f64, beta: f64, beta_star: f64) -> Result<f64> {
    check_common(eps, alpha, beta)?;
    check_unit("beta_star", beta_star)?;
    Ok(eps * (1.0 + 4.0 * beta / f64::min(1.0, (1.0 + eps) * alpha * beta_star)))
}

/// Flip-noise bound `k₁ = ε[1 + 4β / min(1, αβ*)]`.
pub fn flip_bound(eps: f64, alpha: f64, beta: f64, beta_star: f64) -> Result<f64> {
    check_common(eps, alpha, beta)?;
    check_unit("beta_star", beta_star)?;
    Ok(eps * (1.0 + 4.0 * beta / f64::min(1.0, alpha * beta_star)))
}

/// Process-contamination bound `k₃ = ε[2 + 4(N-1)β_X / min(1, (αβ*)_min)]`.
pub fn process_bound(
    eps: f64,
    alphabet_size: usize,
    beta_x: f64,
    alpha_beta_star_min: f64,
) -> Result<f64> {
    check_common(eps, 1.0, beta_x)?;
    if alphabet_size < 2 {
        return Err(Error::Domain(format!(
            "alphabet size must be >= 2, got {alphabet_size}"
        )));
    }
    check_unit("alpha_beta_star_min", alpha_beta_star_min)?;
    let spread = 4.0 * (alphabet_size - 1) as f64 * beta_x;
    Ok(eps * (2.0 + spread / f64::min(1.0, alpha_beta_star_min)))
}

/// Every explicit constant attached to one `(tree, ε, δ, K, n)` setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub regime: String,
    pub eps: f64,
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub n: usize,
    pub alphabet_size: usize,
    #[serde(rename = "alpha_X")]
    pub alpha_x: f64,
    #[serde(rename = "beta_X")]
    pub beta_x: f64,
    #[serde(rename = "beta_star_X")]
    pub beta_star_x: f64,
    pub continuity_hypothesis: bool,
    #[serde(rename = "alpha_Y")]
    pub alpha_y: Option<f64>,
    #[serde(rename = "beta_Y")]
    pub beta_y: Option<f64>,
    pub beta_star_min: Option<f64>,
    pub alpha_min: Option<f64>,
    /// Value used in `c₃` for process contamination (max form).
    pub beta_alpha_max: Option<f64>,
    /// The same quantity with min in place of max, recorded for comparison.
    pub beta_alpha_max_min_form: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k3: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub d: Option<usize>,
    pub n0: Option<f64>,
    pub k_bar: Option<f64>,
    #[serde(rename = "D_d")]
    pub d_gap: Option<f64>,
    pub delta_window_low: Option<f64>,
    pub delta_window_high: Option<f64>,
    pub delta_in_window: bool,
    /// `c₂·exp(-c₃(n - d))`.
    pub error_bound: Option<f64>,
    pub vacuous: bool,
    pub n_below_threshold: bool,
    pub valid: bool,
    pub reason: Option<String>,
}

struct TreeFacts {
    n: usize,
    alpha: f64,
    profile: ContinuityProfile,
    depth: Result<usize>,
    gap: Option<f64>,
}

fn tree_facts(oracle: &Oracle, big_k: usize) -> Result<TreeFacts> {
    let depth = oracle.depth_d(big_k);
    let gap = match &depth {
        Ok(d) => oracle.divergence(*d)?.gap,
        Err(_) => None,
    };
    Ok(TreeFacts {
        n: oracle.tree().alphabet_size(),
        alpha: oracle.tree().alpha(),
        profile: oracle.continuity_rates(),
        depth,
        gap,
    })
}

fn check_setting(eps: f64, big_k: usize) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!(
            "epsilon must lie in [0, 1), got {eps}"
        )));
    }
    if big_k == 0 {
        return Err(Error::Domain("K must be >= 1".into()));
    }
    Ok(())
}

fn empty_report(
    regime: &str,
    eps: f64,
    delta: f64,
    big_k: usize,
    n: usize,
    x: &TreeFacts,
) -> BoundsReport {
    BoundsReport {
        regime: regime.to_string(),
        eps,
        delta,
        k: big_k,
        n,
        alphabet_size: x.n,
        alpha_x: x.alpha,
        beta_x: x.profile.beta_sum,
        beta_star_x: x.profile.beta_star,
        continuity_hypothesis: x.profile.hypothesis_holds(),
        alpha_y: None,
        beta_y: None,
        beta_star_min: None,
        alpha_min: None,
        beta_alpha_max: None,
        beta_alpha_max_min_form: None,
        k1: None,
        k2: None,
        k3: None,
        c1: None,
        c2: None,
        c3: None,
        d: x.depth.as_ref().ok().copied(),
        n0: None,
        k_bar: None,
        d_gap: x.gap,
        delta_window_low: None,
        delta_window_high: None,
        delta_in_window: false,
        error_bound: None,
        vacuous: false,
        n_below_threshold: false,
        valid: false,
        reason: None,
    }
}

/// Fills the δ-window, validity and error-bound fields from `c₁`, `c₂`,
/// `c₃`, `n₀` and `k̄` already present in `report`.
fn finish(mut report: BoundsReport, mut reasons: Vec<String>) -> BoundsReport {
    if let (Some(c1), Some(gap)) = (report.c1, report.d_gap) {
        let low = c1 * report.eps;
        let high = gap - c1 * report.eps;
        report.delta_window_low = Some(low);
        report.delta_window_high = Some(high);
        report.delta_in_window = low < report.delta && report.delta < high;
        let eps_ok = report.eps < gap / (2.0 * c1);
        if !eps_ok || low >= high {
            reasons.push(format!(
                "epsilon {} is not below D_d/(2 c1) = {}",
                report.eps,
                gap / (2.0 * c1)
            ));
        }
    }
    if let Some(n0) = report.n0 {
        report.n_below_threshold = report.n as f64 <= n0;
    }
    if let (Some(c2), Some(c3), Some(d)) = (report.c2, report.c3, report.d) {
        if report.n > d {
            let bound = c2 * (-c3 * (report.n - d) as f64).exp();
            report.error_bound = Some(bound);
            report.vacuous = bound >= 1.0;
        }
    }
    report.valid = reasons.is_empty() && report.c1.is_some() && report.d_gap.is_some();
    report.reason = if reasons.is_empty() {
        None
    } else {
        Some(reasons.join("; "))
    };
    report
}

fn base_reasons(x: &TreeFacts) -> Vec<String> {
    let mut reasons = Vec::new();
    if let Err(e) = &x.depth {
        reasons.push(format!("depth d undefined: {e}"));
    } else if x.gap.is_none() {
        reasons.push("D_d undefined: divergence set C_d is empty".to_string());
    }
    if !x.profile.hypothesis_holds() {
        reasons.push(format!(
            "continuity hypothesis fails: beta_k = {:?} has an entry >= 1, so beta_star = {} is not a positive constant",
            x.profile.beta_k, x.profile.beta_star
        ));
    }
    reasons
}

/// Zero-inflation recovery constants.
pub fn zero_inflation_constants(
    tree: &ContextTree,
    eps: f64,
    delta: f64,
    big_k: usize,
    n: usize,
) -> Result<BoundsReport> {
    check_setting(eps, big_k)?;
    let oracle = Oracle::new(tree)?;
    let x = tree_facts(&oracle, big_k)?;
    let mut report = empty_report("zero", eps, delta, big_k, n, &x);
    let reasons = base_reasons(&x);
    let (alpha, beta, beta_star) = (x.alpha, x.profile.beta_sum, x.profile.beta_star);

    if x.profile.hypothesis_holds() {
        let k1 = flip_bound(eps, alpha, beta, beta_star)?;
        let k2 = zero_inflation_bound(eps, alpha, beta, beta_star)?;
        // coupled comparison: Y shares X's constants, so (αβ*)_min = αβ*
        let k3 = process_bound(eps, x.n, beta, f64::min(alpha * beta_star, alpha))?;
        report.k1 = Some(k1);
        report.k2 = Some(k2);
        report.k3 = Some(k3);
        report.c1 = Some(2.0 * (1.0 + 4.0 * beta / f64::min(alpha * beta_star, 1.0)));
        if let Ok(d) = x.depth {
            let di = d as i32;
            let noise = (1.0 - eps).powi(di);
            report.c2 = Some(2f64.powi(di) * 12.0 * E.powf(1.0 / E));
            if n > d {
                let k_bar = k2 + 3.0 / ((n - d) as f64 * alpha.powi(di) * noise);
                report.k_bar = Some(k_bar);
                if let Some(gap) = x.gap {
                    let margin = f64::min(gap - delta, delta) - 2.0 * k_bar;
                    report.c3 = Some(
                        margin * margin * alpha.powi(2 * di) * (1.0 - eps).powi(3 * di + 1)
                            / (256.0 * E * (d + 1) as f64 * (1.0 + beta / alpha)),
                    );
                }
            }
            if let Some(gap) = x.gap {
                report.n0 =
                    Some(6.0 / ((gap - delta - 2.0 * k2) * alpha.powi(di) * noise) + d as f64);
            }
        }
    }
    Ok(finish(report, reasons))
}

/// Process-contamination recovery constants.
pub fn process_constants(
    tree_x: &ContextTree,
    tree_y: &ContextTree,
    eps: f64,
    delta: f64,
    big_k: usize,
    n: usize,
) -> Result<BoundsReport> {
    check_setting(eps, big_k)?;
    if tree_x.alphabet_size() != tree_y.alphabet_size() {
        return Err(Error::AlphabetMismatch(format!(
            "clean tree has {} symbols, contaminant has {}",
            tree_x.alphabet_size(),
            tree_y.alphabet_size()
        )));
    }
    let oracle = Oracle::new(tree_x)?;
    let x = tree_facts(&oracle, big_k)?;
    let y_profile = Oracle::new(tree_y)?.continuity_rates();
    let alpha_y = tree_y.alpha();
    let beta_y = y_profile.beta_sum;

    let mut report = empty_report("process", eps, delta, big_k, n, &x);
    let reasons = base_reasons(&x);
    let (alpha, beta, beta_star) = (x.alpha, x.profile.beta_sum, x.profile.beta_star);
    let alpha_min = alpha.min(alpha_y);
    let big_n = x.n as f64;
    let ratio_x = 1.0 + beta / alpha;
    let ratio_y = 1.0 + beta_y / alpha_y;
    report.alpha_y = Some(alpha_y);
    report.beta_y = Some(beta_y);
    report.alpha_min = Some(alpha_min);
    report.beta_alpha_max = Some(ratio_x.max(ratio_y));
    report.beta_alpha_max_min_form = Some(ratio_x.min(ratio_y));

    if x.profile.hypothesis_holds() {
        let ab_min = f64::min(alpha * beta_star, alpha_y);
        report.beta_star_min = Some(ab_min);
        report.k1 = Some(flip_bound(eps, alpha, beta, beta_star)?);
        report.k2 = Some(zero_inflation_bound(eps, alpha, beta, beta_star)?);
        report.k3 = Some(process_bound(eps, x.n, beta, ab_min)?);
        let bracket = 1.0 + 2.0 * (big_n - 1.0) * beta / f64::min(ab_min, 1.0);
        let c1 = 4.0 * bracket;
        report.c1 = Some(c1);
        if let Ok(d) = x.depth {
            let di = d as i32;
            report.c2 = Some(48.0 * big_n.powi(di) * (big_n + 1.0) * E.powf(1.0 / E));
            if n > d {
                let k_bar = eps * c1 / 2.0 + (big_n + 1.0) / ((n - d) as f64 * alpha_min.powi(di));
                report.k_bar = Some(k_bar);
                if let Some(gap) = x.gap {
                    let margin = f64::min(gap - delta, delta) - 2.0 * k_bar;
                    report.c3 = Some(
                        margin * margin * alpha_min.powi(2 * di)
                            / (128.0 * big_n * big_n * E * (d + 1) as f64 * ratio_x.max(ratio_y)),
                    );
                }
            }
            if let Some(gap) = x.gap {
                report.n0 = Some(
                    2.0 * (big_n + 1.0)
                        / ((gap - delta - 4.0 * eps * bracket) * alpha_min.powi(di))
                        + d as f64,
                );
            }
        }
    }
    Ok(finish(report, reasons))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memoryless_bounds_collapse() {
        assert_eq!(zero_inflation_bound(0.1, 0.5, 0.0, 1.0).unwrap(), 0.1);
        assert_eq!(flip_bound(0.1, 0.5, 0.0, 1.0).unwrap(), 0.1);
        assert_eq!(process_bound(0.1, 2, 0.0, 0.3).unwrap(), 0.2);
        assert_eq!(zero_inflation_bound(0.0, 0.3, 2.0, 0.4).unwrap(), 0.0);
        assert_eq!(process_bound(0.0, 3, 2.0, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(zero_inflation_bound(1.0, 0.5, 0.0, 1.0).is_err());
        assert!(zero_inflation_bound(0.1, 0.0, 0.0, 1.0).is_err());
        assert!(zero_inflation_bound(0.1, 0.5, -1.0, 1.0).is_err());
        assert!(zero_inflation_bound(0.1, 0.5, 1.0, 0.0).is_err());
        assert!(flip_bound(0.1, 0.5, 1.0, -0.0).is_err());
        assert!(process_bound(0.1, 1, 1.0, 0.5).is_err());
    }

    #[test]
    fn flip_bound_dominates_zero_inflation_bound() {
        for &(eps, alpha, beta, star) in &[
            (0.05, 0.2, 1.0, 0.3),
            (0.3, 0.45, 0.1, 0.9),
            (0.01, 0.5, 3.0, 0.05),
        ] {
            assert!(
                flip_bound(eps, alpha, beta, star).unwrap()
                    >= zero_inflation_bound(eps, alpha, beta, star).unwrap()
            );
        }
    }

    #[test]
    fn memoryless_trees_have_undefined_gap() {
        let coin = ContextTree::iid(vec![0.5, 0.5]).unwrap();
        let r = zero_inflation_constants(&coin, 0.05, 0.1, 2, 1000).unwrap();
        assert!(!r.valid);
        assert!(r.reason.unwrap().contains("undefined"));
        assert_eq!(r.k1, Some(0.05));
        assert_eq!(r.k2, Some(0.05));
        assert_eq!(r.k3, Some(0.1));
    }
}
