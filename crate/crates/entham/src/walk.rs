//! Random walks on the auxiliary chain, self-avoidance, well-behavedness and walk entropy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{AuxChain, ChainError};
use crate::entropy::FractionalMatching;
use crate::hypergraph::Hypergraph;
use crate::math::{binomial, factorial_u64};

pub const MAX_TRAJECTORIES: u128 = 10_000_000;
pub const DEFAULT_ALPHA: f64 = 0.1;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum WalkError {
    #[error("not a probability distribution (sum {sum}, min {min})")]
    NotADistribution { sum: f64, min: f64 },
    #[error("state {state:?} has zero matching support")]
    ZeroSupport { state: Vec<u32> },
    #[error("walk stuck at {state:?}: no outgoing transitions")]
    DeadEnd { state: Vec<u32> },
    #[error("state space too large: {states} states")]
    StateSpaceTooLarge { states: usize },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// New vertices visited by a walk of `m` steps with overlap ℓ.
pub fn new_vertex_count(m: usize, k: usize, ell: usize) -> usize {
    m * (k - ell)
}

/// Per-walk seed derived from a base seed.
pub fn walk_seed(base: u64, index: u64) -> u64 {
    base ^ index
}

/// A realized walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkRecord {
    pub seed: u64,
    pub start: Vec<u32>,
    pub vertices: Vec<u32>,
    pub self_avoiding: bool,
    pub ell: usize,
    pub length_steps: usize,
}

impl WalkRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// The first m(k−ℓ) vertices, i.e. the path the walk contributes.
    pub fn leading_vertices(&self, k: usize) -> &[u32] {
        let m = new_vertex_count(self.length_steps, k, self.ell).min(self.vertices.len());
        &self.vertices[..m]
    }

    /// Checks that every window of length k at stride k−ℓ is an edge.
    pub fn windows_are_edges(&self, g: &Hypergraph) -> bool {
        let k = g.k();
        let stride = k - self.ell;
        let mut i = 0;
        while i + k <= self.vertices.len() {
            if !g.contains_edge(&self.vertices[i..i + k]) {
                return false;
            }
            i += stride;
        }
        true
    }
}

pub fn all_distinct(seq: &[u32]) -> bool {
    let mut s = seq.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] != w[1])
}

/// Anything that can draw the next block of vertices from a current state.
pub trait WalkKernel {
    fn k(&self) -> usize;
    fn ell(&self) -> usize;
    /// Vertices per state.
    fn width(&self) -> usize;
    /// Appends the sampled successor's new vertices to `out`; `u` is uniform on [0, 1).
    fn sample_next(&self, state: &[u32], u: f64, out: &mut Vec<u32>) -> Result<(), WalkError>;
}

fn pick(weights: impl Iterator<Item = f64> + Clone, u: f64) -> Option<usize> {
    let total: f64 = weights.clone().sum();
    if total <= 0.0 {
        return None;
    }
    let target = u * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(i);
        if acc > target {
            return Some(i);
        }
    }
    last
}

impl WalkKernel for AuxChain {
    fn k(&self) -> usize {
        self.k
    }

    fn ell(&self) -> usize {
        self.ell
    }

    fn width(&self) -> usize {
        self.space.width()
    }

    fn sample_next(&self, state: &[u32], u: f64, out: &mut Vec<u32>) -> Result<(), WalkError> {
        let i = self.space.index_of(state).ok_or_else(|| ChainError::UnknownState(state.to_vec()))?;
        let (cols, probs) = self.row(i);
        let j = pick(probs.iter().copied(), u).ok_or_else(|| WalkError::DeadEnd { state: state.to_vec() })?;
        out.extend_from_slice(self.appended(cols[j] as usize));
        Ok(())
    }
}

/// Tight-case walk that reads transitions straight from the graph, for state
/// spaces too large to materialize. Draws the same walks as the tuple chain.
pub struct TupleKernel<'a> {
    pub g: &'a Hypergraph,
    pub x: &'a FractionalMatching,
}

impl WalkKernel for TupleKernel<'_> {
    fn k(&self) -> usize {
        self.g.k()
    }

    fn ell(&self) -> usize {
        self.g.k() - 1
    }

    fn width(&self) -> usize {
        self.g.k() - 1
    }

    fn sample_next(&self, state: &[u32], u: f64, out: &mut Vec<u32>) -> Result<(), WalkError> {
        let mut sorted = state.to_vec();
        sorted.sort_unstable();
        let nb = self.g.neighbors(&sorted);
        let ids = self.g.neighbor_edges(&sorted);
        let j = pick(ids.iter().map(|&e| self.x.weights[e as usize]), u)
            .ok_or_else(|| WalkError::ZeroSupport { state: state.to_vec() })?;
        out.push(nb[j]);
        Ok(())
    }
}

/// Samples m steps from `start` with a ChaCha8 stream seeded by `seed`.
pub fn sample_walk<K: WalkKernel + ?Sized>(kernel: &K, start: &[u32], m: usize, seed: u64) -> Result<WalkRecord, WalkError> {
    let width = kernel.width();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = start.to_vec();
    for _ in 0..m {
        let state = vertices[vertices.len() - width..].to_vec();
        kernel.sample_next(&state, rng.gen::<f64>(), &mut vertices)?;
    }
    let self_avoiding = all_distinct(&vertices);
    Ok(WalkRecord { seed, start: start.to_vec(), vertices, self_avoiding, ell: kernel.ell(), length_steps: m })
}

/// A uniformly random ordered (k−1)-tuple with at least one neighbor.
pub fn random_start_tuple(g: &Hypergraph, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut t: Vec<u32> = Vec::with_capacity(g.k() - 1);
        while t.len() < g.k() - 1 {
            let v = rng.gen_range(0..g.n() as u32);
            if !t.contains(&v) {
                t.push(v);
            }
        }
        let mut s = t.clone();
        s.sort_unstable();
        if g.codegree(&s) > 0 {
            return t;
        }
    }
}

/// h_x(S) for an ℓ-set S: Σ_X y log2((k−ℓ)!/y) with y = x_{S∪X}/x_S.
pub fn tuple_entropy(g: &Hypergraph, x: &FractionalMatching, s: &[u32]) -> Result<f64, WalkError> {
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    let k = g.k();
    let ell = sorted.len();
    let ids: Vec<u32> = if ell + 1 == k {
        g.neighbor_edges(&sorted).to_vec()
    } else if ell == 0 {
        (0..g.num_edges() as u32).collect()
    } else {
        g.incident_edges(sorted[0])
            .iter()
            .copied()
            .filter(|&e| sorted.iter().all(|v| g.edge(e as usize).contains(v)))
            .collect()
    };
    let xs: f64 = ids.iter().map(|&e| x.weights[e as usize]).sum();
    if xs <= 0.0 {
        return Err(WalkError::ZeroSupport { state: s.to_vec() });
    }
    let fact = factorial_u64(k - ell) as f64;
    Ok(ids
        .iter()
        .map(|&e| x.weights[e as usize] / xs)
        .filter(|&y| y > 0.0)
        .map(|y| y * (fact / y).log2())
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellBehavedReport {
    pub alpha: f64,
    pub set_size: usize,
    /// n^{1/3−α}
    pub count_threshold: f64,
    /// n^{−2/3−α}
    pub weight_threshold: f64,
    /// Largest left-hand side of each condition over all (k−1)-sets.
    pub worst: [f64; 3],
    /// Threshold minus worst left-hand side; all positive iff pass.
    pub slack: [f64; 3],
    pub pass: bool,
}

/// Evaluates the three well-behavedness conditions for M over every (k−1)-set.
pub fn well_behaved_check(g: &Hypergraph, x: &FractionalMatching, m_set: &[u32], alpha: f64) -> WellBehavedReport {
    let n = g.n() as f64;
    let mut in_m = vec![false; g.n()];
    for &v in m_set {
        in_m[v as usize] = true;
    }
    let msize = in_m.iter().filter(|&&b| b).count();
    let frac = msize as f64 / n;
    let t1 = n.powf(1.0 / 3.0 - alpha);
    let t2 = n.powf(-2.0 / 3.0 - alpha);
    let mut worst = [0.0f64; 3];
    for i in 0..g.num_slots() {
        let (_, nb, ids) = g.slot_entry(i);
        let xs: f64 = ids.iter().map(|&e| x.weights[e as usize]).sum();
        let y = |e: u32| if xs > 0.0 { x.weights[e as usize] / xs } else { 1.0 / nb.len() as f64 };
        let mut count = 0usize;
        let mut ysum = 0.0;
        let mut hpart = 0.0;
        let mut hs = 0.0;
        for (&v, &e) in nb.iter().zip(ids) {
            let yv = y(e);
            let term = if yv > 0.0 { -yv * yv.log2() } else { 0.0 };
            hs += term;
            if in_m[v as usize] {
                count += 1;
                ysum += yv;
                hpart += term;
            }
        }
        worst[0] = worst[0].max((count as f64 - frac * nb.len() as f64).abs());
        worst[1] = worst[1].max((ysum - frac).abs());
        worst[2] = worst[2].max((hpart - frac * hs).abs());
    }
    if (g.num_slots() as u128) < binomial(g.n(), g.k() - 1) {
        // a (k−1)-set with empty neighborhood
        worst[1] = worst[1].max(frac);
    }
    let slack = [t1 - worst[0], t2 - worst[1], t2 - worst[2]];
    WellBehavedReport {
        alpha,
        set_size: msize,
        count_threshold: t1,
        weight_threshold: t2,
        worst,
        slack,
        pass: slack.iter().all(|&s| s > 0.0),
    }
}

/// Self-avoiding and the leading m(k−ℓ) vertices form a well-behaved set.
pub fn is_well_behaved_walk(g: &Hypergraph, x: &FractionalMatching, w: &WalkRecord, alpha: f64) -> bool {
    w.self_avoiding && well_behaved_check(g, x, w.leading_vertices(g.k()), alpha).pass
}

/// Σ p log2(1/p) for a probability vector.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64, WalkError> {
    let sum: f64 = dist.iter().sum();
    let min = dist.iter().copied().fold(f64::INFINITY, f64::min);
    if (sum - 1.0).abs() > 1e-9 || min < 0.0 {
        return Err(WalkError::NotADistribution { sum, min });
    }
    Ok(dist.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkEntropy {
    /// Σ_i H(Z_i | Z_{i−1}) from exact marginals.
    pub chain_rule: f64,
    /// Direct trajectory enumeration, when the trajectory count is at most 10^7.
    pub enumerated: Option<f64>,
    pub trajectories: u128,
}

/// H(Z_1..Z_m | Z_0 = start), by the chain rule and by enumeration.
pub fn walk_entropy_exact(chain: &AuxChain, start: &[u32], m: usize) -> Result<WalkEntropy, WalkError> {
    let s = chain.space.index_of(start).ok_or_else(|| ChainError::UnknownState(start.to_vec()))?;
    let row_entropy: Vec<f64> = (0..chain.num_states())
        .map(|i| chain.row(i).1.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
        .collect();
    let mut p = vec![0.0; chain.num_states()];
    p[s] = 1.0;
    let mut chain_rule = 0.0;
    for _ in 0..m {
        chain_rule += p.iter().zip(&row_entropy).map(|(a, h)| a * h).sum::<f64>();
        p = chain.step(&p);
    }

    // trajectory count by dynamic programming
    let mut counts = vec![0u128; chain.num_states()];
    counts[s] = 1;
    for _ in 0..m {
        let mut next = vec![0u128; chain.num_states()];
        for (i, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &j in chain.row(i).0 {
                next[j as usize] = next[j as usize].saturating_add(c);
            }
        }
        counts = next;
    }
    let trajectories = counts.iter().fold(0u128, |a, &c| a.saturating_add(c));
    let enumerated = (trajectories <= MAX_TRAJECTORIES).then(|| {
        let mut h = 0.0;
        enumerate(chain, s, m, 1.0, &mut h);
        h
    });
    Ok(WalkEntropy { chain_rule, enumerated, trajectories })
}

fn enumerate(chain: &AuxChain, state: usize, left: usize, prob: f64, h: &mut f64) {
    if left == 0 {
        if prob > 0.0 {
            *h -= prob * prob.log2();
        }
        return;
    }
    let (cols, probs) = chain.row(state);
    for (&j, &q) in cols.iter().zip(probs) {
        enumerate(chain, j as usize, left - 1, prob * q, h);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAvoidStats {
    pub walks: usize,
    pub self_avoiding: usize,
    pub well_behaved: Option<usize>,
    pub rate: f64,
    pub std_error: f64,
}

/// Monte Carlo self-avoidance rate over `walks` seeded walks from random starts.
pub fn self_avoid_monte_carlo<K: WalkKernel + Sync>(
    g: &Hypergraph,
    kernel: &K,
    m: usize,
    walks: usize,
    base_seed: u64,
) -> Result<SelfAvoidStats, WalkError> {
    use rayon::prelude::*;
    let hits: Result<Vec<bool>, WalkError> = (0..walks as u64)
        .into_par_iter()
        .map(|i| {
            let seed = walk_seed(base_seed, i);
            let start = random_start_tuple(g, seed.rotate_left(17));
            sample_walk(kernel, &start, m, seed).map(|w| w.self_avoiding)
        })
        .collect();
    let ok = hits?.iter().filter(|&&b| b).count();
    let rate = ok as f64 / walks.max(1) as f64;
    let std_error = (rate * (1.0 - rate) / walks.max(1) as f64).sqrt();
    Ok(SelfAvoidStats { walks, self_avoiding: ok, well_behaved: None, rate, std_error })
}

/// As [`self_avoid_monte_carlo`] on the tight kernel, also counting walks whose
/// leading vertices form a well-behaved set.
pub fn well_behaved_monte_carlo(
    g: &Hypergraph,
    x: &FractionalMatching,
    m: usize,
    walks: usize,
    base_seed: u64,
    alpha: f64,
) -> Result<SelfAvoidStats, WalkError> {
    use rayon::prelude::*;
    let kernel = TupleKernel { g, x };
    let hits: Result<Vec<(bool, bool)>, WalkError> = (0..walks as u64)
        .into_par_iter()
        .map(|i| {
            let seed = walk_seed(base_seed, i);
            let start = random_start_tuple(g, seed.rotate_left(17));
            let w = sample_walk(&kernel, &start, m, seed)?;
            Ok((w.self_avoiding, is_well_behaved_walk(g, x, &w, alpha)))
        })
        .collect();
    let hits = hits?;
    let ok = hits.iter().filter(|h| h.0).count();
    let wb = hits.iter().filter(|h| h.1).count();
    let rate = ok as f64 / walks.max(1) as f64;
    let std_error = (rate * (1.0 - rate) / walks.max(1) as f64).sqrt();
    Ok(SelfAvoidStats { walks, self_avoiding: ok, well_behaved: Some(wb), rate, std_error })
}
