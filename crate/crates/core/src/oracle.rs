//! Exact theoretical quantities of a finite-depth VLMC.
//!
//! A tree of depth `h` is embedded into an order-`h` Markov chain on the
//! `N^h` strings of length `h` (state code: oldest symbol most significant).
//! Everything else (cylinder laws, conditionals, continuity rates,
//! divergence sets and the contaminated conditionals) is computed exactly
//! from that chain.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::contamination::{NoiseSpec, Regime};
use crate::context_tree::{encode, truncate, ContextTree, StringSet, Symbol};
use crate::error::{Error, Result};

/// Convergence threshold on the total-variation change per power sweep.
pub const STATIONARY_TOLERANCE: f64 = 1e-12;
pub const STATIONARY_MAX_ITERATIONS: usize = 1_000_000;
/// Tolerance used when deciding whether two conditional laws differ.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-12;
/// Largest state space the exact oracle accepts.
pub const MAX_STATES: usize = 1 << 20;

/// Order-`h` chain equivalent to a tree of depth at most `h`.
#[derive(Debug, Clone)]
pub struct MarkovEmbedding {
    alphabet_size: usize,
    order: usize,
    n_states: usize,
    /// `rows[state]` is the next-symbol law out of `state`.
    rows: Vec<Vec<f64>>,
}

impl MarkovEmbedding {
    /// Embedding of order `max(depth, 1)`.
    pub fn new(tree: &ContextTree) -> Result<Self> {
        Self::with_order(tree, tree.depth().max(1))
    }

    pub fn with_order(tree: &ContextTree, order: usize) -> Result<Self> {
        let n = tree.alphabet_size();
        let n_states = state_count(n, order)?;
        let mut rows = Vec::with_capacity(n_states);
        let mut past = vec![0; order];
        for code in 0..n_states {
            fill_string(code, n, &mut past);
            rows.push(tree.transition(&past)?.to_vec());
        }
        Ok(Self {
            alphabet_size: n,
            order,
            n_states,
            rows,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.rows[state]
    }

    /// State reached from `state` after emitting `a`.
    #[inline]
    pub fn successor(&self, state: usize, a: usize) -> usize {
        (state * self.alphabet_size + a) % self.n_states
    }

    /// One application of the transition operator: `out = dist · P`.
    pub fn step(&self, dist: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (s, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (a, &p) in self.rows[s].iter().enumerate() {
                out[self.successor(s, a)] += mass * p;
            }
        }
    }

    /// Stationary law by power iteration from the uniform law.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let mut pi = vec![1.0 / self.n_states as f64; self.n_states];
        let mut next = vec![0.0; self.n_states];
        let mut change = f64::INFINITY;
        for _ in 0..STATIONARY_MAX_ITERATIONS {
            self.step(&pi, &mut next);
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|x| *x /= total);
            change = 0.5
                * pi.iter()
                    .zip(&next)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>();
            std::mem::swap(&mut pi, &mut next);
            if change < STATIONARY_TOLERANCE {
                return Ok(pi);
            }
        }
        Err(Error::NoConvergence {
            iterations: STATIONARY_MAX_ITERATIONS,
            last_change: change,
        })
    }
}

pub(crate) fn state_count(alphabet_size: usize, order: usize) -> Result<usize> {
    let mut states: usize = 1;
    for _ in 0..order {
        states = states
            .checked_mul(alphabet_size)
            .filter(|&s| s <= MAX_STATES)
            .ok_or(Error::StateSpaceTooLarge {
                states: usize::MAX,
                limit: MAX_STATES,
            })?;
    }
    Ok(states)
}

fn fill_string(mut code: usize, alphabet_size: usize, out: &mut [Symbol]) {
    for slot in out.iter_mut().rev() {
        *slot = (code % alphabet_size) as Symbol;
        code /= alphabet_size;
    }
}

/// Stationary law of the embedding of `tree`.
pub fn stationary(tree: &ContextTree) -> Result<Vec<f64>> {
    MarkovEmbedding::new(tree)?.stationary()
}

/// Continuity rates of a finite-depth tree.
///
/// `beta_k[k]` holds the rate for pasts agreeing on their `k` most recent
/// symbols, for `k = 0..=h`; rates vanish from `k = depth` on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityProfile {
    pub beta_k: Vec<f64>,
    pub beta_sum: f64,
    pub beta_star: f64,
}

impl ContinuityProfile {
    /// The product `Π(1 - β_k)` is a meaningful positive constant only when
    /// every factor lies in `(0, 1]`.
    pub fn hypothesis_holds(&self) -> bool {
        self.beta_k.iter().all(|&b| b < 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub k: usize,
    /// Members of `C_k` with their max-over-symbols gap to their suffix.
    pub members: BTreeMap<Vec<Symbol>, f64>,
    /// `D_k`; `None` when `C_k` is empty.
    pub gap: Option<f64>,
}

impl DivergenceReport {
    pub fn contains(&self, s: &[Symbol]) -> bool {
        self.members.contains_key(s)
    }
}

/// Exact oracle for one tree: embedding plus stationary law, computed once.
#[derive(Debug, Clone)]
pub struct Oracle {
    tree: ContextTree,
    embedding: MarkovEmbedding,
    stationary: Vec<f64>,
}

impl Oracle {
    pub fn new(tree: &ContextTree) -> Result<Self> {
        let embedding = MarkovEmbedding::new(tree)?;
        let stationary = embedding.stationary()?;
        Ok(Self {
            tree: tree.clone(),
            embedding,
            stationary,
        })
    }

    pub fn tree(&self) -> &ContextTree {
        &self.tree
    }

    pub fn embedding(&self) -> &MarkovEmbedding {
        &self.embedding
    }

    /// Stationary law over the length-`h` states.
    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    fn order(&self) -> usize {
        self.embedding.order
    }

    fn n(&self) -> usize {
        self.tree.alphabet_size()
    }

    /// States (length-`h` pasts) whose last `s.len()` symbols equal `s`;
    /// requires `s.len() <= h`.
    fn states_ending_in(&self, s: &[Symbol]) -> impl Iterator<Item = usize> {
        let width = self.n().pow(s.len() as u32);
        let code = encode(s, self.n());
        let prefixes = self.embedding.n_states / width;
        (0..prefixes).map(move |p| p * width + code)
    }

    /// Stationary probability of the cylinder `w`.
    pub fn marginal_prob(&self, w: &[Symbol]) -> f64 {
        let h = self.order();
        if w.len() <= h {
            return self.states_ending_in(w).map(|s| self.stationary[s]).sum();
        }
        let mut mass = self.marginal_prob(&w[..h]);
        for i in h..w.len() {
            let row = self
                .tree
                .transition(&w[..i])
                .expect("past of length >= depth");
            mass *= row[w[i] as usize];
        }
        mass
    }

    /// `P(X_0 = a | most recent |s| symbols = s)` under the stationary law.
    pub fn conditional_on_string(&self, s: &[Symbol]) -> Result<Vec<f64>> {
        if s.len() >= self.order() {
            return Ok(self.tree.transition(s)?.to_vec());
        }
        let n = self.n();
        let mut num = vec![0.0; n];
        let mut den = 0.0;
        for st in self.states_ending_in(s) {
            let w = self.stationary[st];
            den += w;
            for (acc, &p) in num.iter_mut().zip(self.embedding.row(st)) {
                *acc += w * p;
            }
        }
        if den <= 0.0 {
            return Err(Error::ZeroMassString(s.to_vec()));
        }
        Ok(num.into_iter().map(|x| x / den).collect())
    }

    pub fn continuity_rates(&self) -> ContinuityProfile {
        let h = self.order();
        let n = self.n();
        let mut beta_k = Vec::with_capacity(h + 1);
        for k in 0..=h {
            // pasts agreeing on the k most recent symbols share `state mod n^k`
            let groups = n.pow(k as u32);
            let mut hi = vec![vec![0.0_f64; n]; groups];
            let mut lo = vec![vec![f64::INFINITY; n]; groups];
            for st in 0..self.embedding.n_states {
                let g = st % groups;
                for (a, &p) in self.embedding.row(st).iter().enumerate() {
                    hi[g][a] = hi[g][a].max(p);
                    lo[g][a] = lo[g][a].min(p);
                }
            }
            // sup |1 - p/q| over a group is max/min - 1
            let rate = hi
                .iter()
                .zip(&lo)
                .flat_map(|(h, l)| h.iter().zip(l).map(|(h, l)| h / l - 1.0))
                .fold(0.0, f64::max);
            beta_k.push(rate);
        }
        let beta_sum = beta_k.iter().sum();
        let beta_star = beta_k.iter().map(|b| 1.0 - b).product();
        ContinuityProfile {
            beta_k,
            beta_sum,
            beta_star,
        }
    }

    /// The divergence set `C_k` and its minimal gap `D_k`.
    pub fn divergence(&self, k: usize) -> Result<DivergenceReport> {
        if k == 0 {
            return Err(Error::Domain("divergence level k must be >= 1".into()));
        }
        let contexts: Vec<Vec<Symbol>> = self.tree.contexts().map(|(c, _)| c.to_vec()).collect();
        let mut members = BTreeMap::new();
        for u in truncate(&contexts, k) {
            if u.is_empty() {
                continue;
            }
            let own = self.conditional_on_string(&u)?;
            let parent = self.conditional_on_string(&u[1..])?;
            let gap = own
                .iter()
                .zip(&parent)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if gap > DIVERGENCE_TOLERANCE {
                members.insert(u, gap);
            }
        }
        let gap = members.values().copied().reduce(f64::min);
        Ok(DivergenceReport { k, members, gap })
    }

    /// Depth `d` needed to resolve the tree truncated at level `big_k`.
    ///
    /// The maximum runs over internal nodes `u` (strings that are proper
    /// suffixes of some context) with `|u| < big_k`; for each, the smallest
    /// `k` such that some member of `C_k` strictly extends `u`.
    pub fn depth_d(&self, big_k: usize) -> Result<usize> {
        if big_k == 0 {
            return Err(Error::Domain("truncation level K must be >= 1".into()));
        }
        let internal: StringSet = self
            .tree
            .contexts()
            .flat_map(|(c, _)| (1..=c.len()).map(move |cut| c[cut..].to_vec()))
            .filter(|u| u.len() < big_k)
            .collect();
        if internal.is_empty() {
            return Err(Error::NoWitness(Vec::new()));
        }
        let depth = self.tree.depth();
        let reports: Vec<DivergenceReport> = (1..=depth)
            .map(|k| self.divergence(k))
            .collect::<Result<_>>()?;
        let mut d = 0;
        for u in &internal {
            let first = reports
                .iter()
                .find(|r| {
                    r.members
                        .keys()
                        .any(|w| w.len() > u.len() && w.ends_with(u))
                })
                .map(|r| r.k)
                .ok_or_else(|| Error::NoWitness(u.clone()))?;
            d = d.max(first);
        }
        Ok(d)
    }

    /// Exact law of the contaminated process at time 0 given the observed
    /// window `omega` (oldest first).
    pub fn noisy_conditional(&self, noise: &NoiseSpec, omega: &[Symbol]) -> Result<Vec<f64>> {
        let hidden = HiddenChain::new(self, noise)?;
        let mut filter = hidden.initial();
        for &z in omega {
            filter = hidden
                .observe(&filter, z)
                .ok_or_else(|| Error::ZeroMassPast(omega.to_vec()))?;
        }
        Ok(hidden.predict(&filter))
    }

    /// Exhaustive sweep of `|p_Z(a|ω) - p_X(a|ω)|` over `1 <= |ω| <= kmax`.
    pub fn noisy_sweep(&self, noise: &NoiseSpec, kmax: usize) -> Result<NoisySweep> {
        let hidden = HiddenChain::new(self, noise)?;
        let mut sweep = NoisySweep {
            kmax,
            deviation_sup: 0.0,
            argmax: Vec::new(),
            min_conditional: f64::INFINITY,
            cells: 0,
            skipped: 0,
        };
        let mut omega = Vec::with_capacity(kmax);
        self.sweep_from(&hidden, &hidden.initial(), &mut omega, kmax, &mut sweep)?;
        Ok(sweep)
    }

    fn sweep_from(
        &self,
        hidden: &HiddenChain,
        filter: &[f64],
        omega: &mut Vec<Symbol>,
        kmax: usize,
        sweep: &mut NoisySweep,
    ) -> Result<()> {
        if omega.len() == kmax {
            return Ok(());
        }
        for z in 0..self.n() as Symbol {
            omega.push(z);
            match hidden.observe(filter, z) {
                None => sweep.skipped += 1,
                Some(next) => {
                    let noisy = hidden.predict(&next);
                    let clean = self.conditional_on_string(omega)?;
                    for (q, p) in noisy.iter().zip(&clean) {
                        let dev = (q - p).abs();
                        if dev > sweep.deviation_sup {
                            sweep.deviation_sup = dev;
                            sweep.argmax = omega.clone();
                        }
                        sweep.min_conditional = sweep.min_conditional.min(*q);
                    }
                    sweep.cells += 1;
                    self.sweep_from(hidden, &next, omega, kmax, sweep)?;
                }
            }
            omega.pop();
        }
        Ok(())
    }

    pub fn deviation_sup(&self, noise: &NoiseSpec, kmax: usize) -> Result<f64> {
        Ok(self.noisy_sweep(noise, kmax)?.deviation_sup)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoisySweep {
    pub kmax: usize,
    pub deviation_sup: f64,
    /// Observed window attaining the supremum.
    pub argmax: Vec<Symbol>,
    /// Smallest contaminated conditional probability seen in the sweep.
    pub min_conditional: f64,
    /// Windows with positive contaminated mass.
    pub cells: usize,
    /// Windows skipped for zero contaminated mass.
    pub skipped: usize,
}

/// Hidden chain driving the contaminated process: the last `h_X` symbols of
/// X, and for process contamination also the last `h_Y` symbols of Y.
struct HiddenChain<'a> {
    x: &'a Oracle,
    y: Option<Oracle>,
    regime: Regime,
    epsilon: f64,
}

impl<'a> HiddenChain<'a> {
    fn new(x: &'a Oracle, noise: &NoiseSpec) -> Result<Self> {
        noise.check_epsilon()?;
        let n = x.n();
        let y = match noise.regime {
            Regime::ZeroInflation | Regime::Flip => {
                if n != 2 {
                    return Err(Error::AlphabetMismatch(format!(
                        "{} contamination needs a binary alphabet, tree has {n} symbols",
                        noise.regime.name()
                    )));
                }
                None
            }
            Regime::Process => {
                let tree = noise
                    .contaminant
                    .as_ref()
                    .ok_or(Error::MissingContaminant)?;
                if tree.alphabet_size() != n {
                    return Err(Error::AlphabetMismatch(format!(
                        "contaminant has {} symbols, clean tree has {n}",
                        tree.alphabet_size()
                    )));
                }
                Some(Oracle::new(tree)?)
            }
        };
        let states = x.embedding.n_states * y.as_ref().map_or(1, |y| y.embedding.n_states);
        if states > MAX_STATES {
            return Err(Error::StateSpaceTooLarge {
                states,
                limit: MAX_STATES,
            });
        }
        Ok(Self {
            x,
            y,
            regime: noise.regime,
            epsilon: noise.epsilon,
        })
    }

    fn y_states(&self) -> usize {
        self.y.as_ref().map_or(1, |y| y.embedding.n_states)
    }

    /// Probability that the hidden symbols `(x, y)` are observed as `z`.
    #[inline]
    fn emission(&self, z: usize, x: usize, y: usize) -> f64 {
        let eps = self.epsilon;
        match self.regime {
            Regime::ZeroInflation => match (x, z) {
                (0, 0) => 1.0,
                (0, _) => 0.0,
                (_, 0) => eps,
                _ => 1.0 - eps,
            },
            Regime::Flip => {
                if x == z {
                    1.0 - eps
                } else {
                    eps
                }
            }
            Regime::Process => {
                let mut p = 0.0;
                if x == z {
                    p += 1.0 - eps;
                }
                if y == z {
                    p += eps;
                }
                p
            }
        }
    }

    /// Joint stationary law of the hidden state, index `x * |Y states| + y`.
    fn initial(&self) -> Vec<f64> {
        match &self.y {
            None => self.x.stationary.clone(),
            Some(y) => {
                let mut out = Vec::with_capacity(self.x.stationary.len() * y.stationary.len());
                for &px in &self.x.stationary {
                    out.extend(y.stationary.iter().map(|&py| px * py));
                }
                out
            }
        }
    }

    /// Visits every one-step hidden transition `(from, to, prob, x_new, y_new)`.
    fn for_each_transition(&self, mut visit: impl FnMut(usize, usize, f64, usize, usize)) {
        let ex = &self.x.embedding;
        let ny = self.y_states();
        for sx in 0..ex.n_states {
            for (ax, &px) in ex.row(sx).iter().enumerate() {
                let tx = ex.successor(sx, ax);
                match &self.y {
                    None => visit(sx, tx, px, ax, 0),
                    Some(y) => {
                        let ey = &y.embedding;
                        for sy in 0..ny {
                            for (ay, &py) in ey.row(sy).iter().enumerate() {
                                let ty = ey.successor(sy, ay);
                                visit(sx * ny + sy, tx * ny + ty, px * py, ax, ay);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Filter update after observing `z`; `None` if the observation has zero
    /// probability.
    fn observe(&self, filter: &[f64], z: Symbol) -> Option<Vec<f64>> {
        let mut next = vec![0.0; filter.len()];
        self.for_each_transition(|from, to, p, x, y| {
            let mass = filter[from];
            if mass != 0.0 {
                next[to] += mass * p * self.emission(z as usize, x, y);
            }
        });
        let total: f64 = next.iter().sum();
        if total <= 0.0 {
            return None;
        }
        next.iter_mut().for_each(|v| *v /= total);
        Some(next)
    }

    fn predict(&self, filter: &[f64]) -> Vec<f64> {
        let n = self.x.n();
        let mut out = vec![0.0; n];
        self.for_each_transition(|from, _, p, x, y| {
            let mass = filter[from] * p;
            if mass != 0.0 {
                for (z, slot) in out.iter_mut().enumerate() {
                    *slot += mass * self.emission(z, x, y);
                }
            }
        });
        let total: f64 = out.iter().sum();
        out.iter_mut().for_each(|v| *v /= total);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::SeedSpec;

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

    fn noise(regime: Regime, epsilon: f64, contaminant: Option<ContextTree>) -> NoiseSpec {
        NoiseSpec {
            regime,
            epsilon,
            contaminant,
            seed: SeedSpec::new(0),
        }
    }

    #[test]
    fn iid_stationary_is_the_row() {
        let tree = ContextTree::iid(vec![0.3, 0.7]).unwrap();
        let pi = stationary(&tree).unwrap();
        assert!((pi[0] - 0.3).abs() < 1e-12 && (pi[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn symmetric_tree_has_uniform_law() {
        let tree = ContextTree::new(
            2,
            vec![
                (vec![1], vec![0.5, 0.5]),
                (vec![1, 0], vec![0.5, 0.5]),
                (vec![0, 0], vec![0.5, 0.5]),
            ],
        )
        .unwrap();
        for p in stationary(&tree).unwrap() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_stationary_is_a_fixed_point() {
        let oracle = Oracle::new(&reference()).unwrap();
        let pi = oracle.stationary();
        let mut next = vec![0.0; pi.len()];
        oracle.embedding().step(pi, &mut next);
        let residual = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(residual < 1e-10);
        assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn marginals() {
        let coin = Oracle::new(&ContextTree::iid(vec![0.5, 0.5]).unwrap()).unwrap();
        assert_eq!(coin.marginal_prob(&[]), 1.0);
        assert!((coin.marginal_prob(&[0, 1]) - 0.25).abs() < 1e-15);
        let oracle = Oracle::new(&reference()).unwrap();
        assert!((oracle.marginal_prob(&[]) - 1.0).abs() < 1e-12);
        let w = [1, 0];
        let left: f64 = (0..2).map(|a| oracle.marginal_prob(&[a, 1, 0])).sum();
        assert!((oracle.marginal_prob(&w) - left).abs() < 1e-12);
    }

    #[test]
    fn conditionals_on_contexts_match_rows() {
        let oracle = Oracle::new(&reference()).unwrap();
        let row = oracle.conditional_on_string(&[1, 0]).unwrap();
        assert_eq!(row, vec![0.6, 0.4]);
        let row = oracle.conditional_on_string(&[1]).unwrap();
        assert!((row[1] - 0.7).abs() < 1e-12);
        let coin = Oracle::new(&ContextTree::iid(vec![0.4, 0.6]).unwrap()).unwrap();
        assert_eq!(
            coin.conditional_on_string(&[1, 1, 0]).unwrap(),
            vec![0.4, 0.6]
        );
    }

    #[test]
    fn memoryless_profile() {
        let coin = Oracle::new(&ContextTree::iid(vec![0.5, 0.5]).unwrap()).unwrap();
        let profile = coin.continuity_rates();
        assert!(profile.beta_k.iter().all(|&b| b == 0.0));
        assert_eq!(profile.beta_sum, 0.0);
        assert_eq!(profile.beta_star, 1.0);
        assert!(coin.divergence(1).unwrap().gap.is_none());
        assert!(matches!(coin.depth_d(2), Err(Error::NoWitness(_))));
    }

    #[test]
    fn reference_profile_vanishes_at_depth() {
        let profile = Oracle::new(&reference()).unwrap().continuity_rates();
        assert_eq!(profile.beta_k.len(), 3);
        assert_eq!(profile.beta_k[2], 0.0);
        assert!(!profile.hypothesis_holds());
    }

    #[test]
    fn reference_depth_d() {
        let oracle = Oracle::new(&reference()).unwrap();
        assert_eq!(oracle.depth_d(2).unwrap(), 2);
        assert_eq!(oracle.depth_d(1).unwrap(), 1);
        let c1 = oracle.divergence(1).unwrap();
        assert!(c1.contains(&[1]));
        let c2 = oracle.divergence(2).unwrap();
        assert!(c2.contains(&[1, 0]) && c2.contains(&[0, 0]));
    }

    #[test]
    fn noiseless_contamination_is_identity() {
        let oracle = Oracle::new(&reference()).unwrap();
        let coin = ContextTree::iid(vec![0.5, 0.5]).unwrap();
        for regime in [Regime::ZeroInflation, Regime::Flip, Regime::Process] {
            let spec = noise(regime, 0.0, Some(coin.clone()));
            for omega in [vec![1], vec![0, 0], vec![1, 0, 1, 1]] {
                let noisy = oracle.noisy_conditional(&spec, &omega).unwrap();
                let clean = oracle.conditional_on_string(&omega).unwrap();
                for (a, b) in noisy.iter().zip(&clean) {
                    assert!((a - b).abs() < 1e-12, "{regime:?} {omega:?}");
                }
            }
        }
    }

    #[test]
    fn iid_zero_inflation_thins_ones() {
        let q = 0.7;
        let eps = 0.1;
        let oracle = Oracle::new(&ContextTree::iid(vec![1.0 - q, q]).unwrap()).unwrap();
        let spec = noise(Regime::ZeroInflation, eps, None);
        for omega in [vec![], vec![0], vec![1, 1, 0]] {
            let p = oracle.noisy_conditional(&spec, &omega).unwrap();
            assert!((p[1] - q * (1.0 - eps)).abs() < 1e-12);
        }
        let coin = Oracle::new(&ContextTree::iid(vec![0.5, 0.5]).unwrap()).unwrap();
        let dev = coin.deviation_sup(&spec, 4).unwrap();
        assert!((dev - 0.5 * eps).abs() < 1e-12);
    }

    #[test]
    fn process_requires_contaminant() {
        let oracle = Oracle::new(&reference()).unwrap();
        let err = oracle
            .noisy_conditional(&noise(Regime::Process, 0.1, None), &[1])
            .unwrap_err();
        assert!(matches!(err, Error::MissingContaminant));
    }
}
