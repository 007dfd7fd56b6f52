//! The auxiliary walk chain: states are ordered (k−1)-tuples (tight case) or
//! ordered edges (general overlap ℓ), with transitions driven by a fractional matching.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::entropy::FractionalMatching;
use crate::hypergraph::{for_each_subset, Hypergraph};
use crate::math::{factorial_u64, for_each_permutation};

pub const MAX_STATES: usize = 5_000_000;
const MAX_TRANSITIONS: usize = 100_000_000;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum ChainError {
    #[error("state {state:?} has zero matching support")]
    ZeroSupport { state: Vec<u32> },
    #[error("stationarity violated: |sigma P - sigma|_inf = {deviation:.3e}")]
    StationarityViolated { deviation: f64 },
    #[error("state space too large: {states} states")]
    StateSpaceTooLarge { states: usize },
    #[error("{0:?} is not a state of the chain")]
    UnknownState(Vec<u32>),
    #[error("overlap {ell} must be below k = {k}")]
    BadOverlap { ell: usize, k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainMode {
    Tuple,
    OrderedEdge,
}

/// Enumerated states with index maps in both directions.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub mode: ChainMode,
    width: usize,
    n: usize,
    states: Vec<u32>,
    index: HashMap<u64, u32>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len() / self.width
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of vertices per state.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i * self.width..(i + 1) * self.width]
    }

    pub fn index_of(&self, state: &[u32]) -> Option<usize> {
        if state.len() != self.width || state.iter().any(|&v| v as usize >= self.n) {
            return None;
        }
        self.index.get(&pack(state, self.n)).map(|&i| i as usize)
    }

    fn from_sorted(mode: ChainMode, width: usize, n: usize, mut keys: Vec<(u64, Vec<u32>)>) -> Self {
        keys.sort_unstable_by_key(|(k, _)| *k);
        let mut states = Vec::with_capacity(keys.len() * width);
        let mut index = HashMap::with_capacity(keys.len());
        for (i, (key, s)) in keys.into_iter().enumerate() {
            states.extend_from_slice(&s);
            index.insert(key, i as u32);
        }
        StateSpace { mode, width, n, states, index }
    }
}

fn pack(state: &[u32], n: usize) -> u64 {
    state.iter().fold(0u64, |acc, &v| acc.wrapping_mul(n as u64).wrapping_add(v as u64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    /// Keep zero-support states with the uniform 1/deg fallback row.
    pub allow_zero_support: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { allow_zero_support: false }
    }
}

/// Sparse row-stochastic chain with its closed-form stationary vector.
#[derive(Debug, Clone)]
pub struct AuxChain {
    pub space: StateSpace,
    pub ell: usize,
    pub k: usize,
    pub n: usize,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    probs: Vec<f64>,
    sigma: Vec<f64>,
}

impl AuxChain {
    pub fn num_states(&self) -> usize {
        self.space.len()
    }

    /// Row of state `i`: target indices and probabilities.
    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.cols[r.clone()], &self.probs[r])
    }

    /// Vertices appended when moving into state `j`.
    pub fn appended<'a>(&'a self, j: usize) -> &'a [u32] {
        let s = self.space.state(j);
        &s[s.len() - (self.k - self.ell)..]
    }

    /// The closed-form σ, verified against one sparse multiply.
    pub fn stationary(&self) -> Result<Vec<f64>, ChainError> {
        let deviation = self.stationarity_deviation();
        if deviation > 1e-9 {
            return Err(ChainError::StationarityViolated { deviation });
        }
        Ok(self.sigma.clone())
    }

    /// ‖σP − σ‖∞ for the closed-form σ.
    pub fn stationarity_deviation(&self) -> f64 {
        let next = self.step(&self.sigma);
        next.iter().zip(&self.sigma).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// One left multiplication p ↦ pP.
    pub fn step(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; p.len()];
        for (i, &mass) in p.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (cols, probs) = self.row(i);
            for (&j, &q) in cols.iter().zip(probs) {
                out[j as usize] += mass * q;
            }
        }
        out
    }

    pub fn max_row_error(&self) -> f64 {
        (0..self.num_states())
            .map(|i| (self.row(i).1.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn start_index(&self, start: &[u32]) -> Result<usize, ChainError> {
        self.space.index_of(start).ok_or_else(|| ChainError::UnknownState(start.to_vec()))
    }

    /// e_start · P^t.
    pub fn exact_distribution(&self, start: &[u32], t: usize) -> Result<Vec<f64>, ChainError> {
        let s = self.start_index(start)?;
        let mut p = vec![0.0; self.num_states()];
        p[s] = 1.0;
        for _ in 0..t {
            p = self.step(&p);
        }
        Ok(p)
    }

    /// Max relative error from σ for t = 0..=t_max, plus a geometric fit of the tail.
    pub fn mixing_profile(&self, start: &[u32], t_max: usize) -> Result<MixingProfile, ChainError> {
        let s = self.start_index(start)?;
        let mut p = vec![0.0; self.num_states()];
        p[s] = 1.0;
        let mut errors = Vec::with_capacity(t_max + 1);
        for t in 0..=t_max {
            if t > 0 {
                p = self.step(&p);
            }
            let err = p
                .iter()
                .zip(&self.sigma)
                .filter(|(_, &sg)| sg > 0.0)
                .map(|(a, sg)| (a - sg).abs() / sg)
                .fold(0.0, f64::max);
            errors.push(err);
        }
        let (rho, rate) = fit_tail(&errors);
        Ok(MixingProfile { errors, rho, rate })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingProfile {
    pub errors: Vec<f64>,
    /// Fitted geometric ratio per step, when the tail has enough usable points.
    pub rho: Option<f64>,
    /// Fitted decay rate α̂ = −ln ρ.
    pub rate: Option<f64>,
}

/// Errors at or below this are treated as round-off and left out of the fit.
pub const FIT_FLOOR: f64 = 1e-12;

fn fit_tail(errors: &[f64]) -> (Option<f64>, Option<f64>) {
    let half = errors.len() / 2;
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .enumerate()
        .skip(half)
        .filter(|(_, &e)| e > FIT_FLOOR)
        .map(|(t, &e)| (t as f64, e.ln()))
        .collect();
    if pts.len() < 2 {
        return (None, None);
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (Some(slope.exp()), Some(-slope))
}

/// Builds the chain for overlap `ell`; ℓ = k−1 uses tuple states.
pub fn build_chain(g: &Hypergraph, x: &FractionalMatching, ell: usize, opts: ChainOptions) -> Result<AuxChain, ChainError> {
    if ell + 1 == g.k() {
        build_tuple_chain(g, x, opts)
    } else {
        build_ordered_edge_chain(g, x, ell, opts)
    }
}

/// Tight-case chain on ordered (k−1)-tuples: (s1..s_{k−1}) → (s2..s_{k−1}, v).
pub fn build_tuple_chain(g: &Hypergraph, x: &FractionalMatching, opts: ChainOptions) -> Result<AuxChain, ChainError> {
    let n = g.n();
    let k = g.k();
    let w = k - 1;
    let mut support = HashMap::new();
    let mut keys = Vec::new();
    let mut zero = None;
    for i in 0..g.num_slots() {
        let (set, _, ids) = g.slot_entry(i);
        let xs: f64 = ids.iter().map(|&e| x.weights[e as usize]).sum();
        if xs <= 0.0 && !opts.allow_zero_support {
            zero.get_or_insert_with(|| set.to_vec());
            continue;
        }
        support.insert(pack(set, n), xs);
        for_each_permutation(set, |p| keys.push((pack(p, n), p.to_vec())));
        if keys.len() > MAX_STATES {
            return Err(ChainError::StateSpaceTooLarge { states: keys.len() });
        }
    }
    let space = StateSpace::from_sorted(ChainMode::Tuple, w, n, keys);
    let fact = factorial_u64(w) as f64;
    let mut offsets = vec![0usize];
    let mut cols = Vec::new();
    let mut probs = Vec::new();
    let mut sigma = Vec::with_capacity(space.len());
    let mut sorted = vec![0u32; w];
    let mut target = vec![0u32; w];
    for i in 0..space.len() {
        let s = space.state(i);
        sorted.copy_from_slice(s);
        sorted.sort_unstable();
        let nb = g.neighbors(&sorted);
        let ids = g.neighbor_edges(&sorted);
        let xs = support[&pack(&sorted, n)];
        sigma.push(xs / (fact * n as f64));
        target[..w - 1].copy_from_slice(&s[1..]);
        for (&v, &e) in nb.iter().zip(ids) {
            target[w - 1] = v;
            let j = match space.index_of(&target) {
                Some(j) => j,
                None => return Err(ChainError::ZeroSupport { state: zero.unwrap_or_else(|| target.clone()) }),
            };
            let y = if xs > 0.0 { x.weights[e as usize] / xs } else { 1.0 / nb.len() as f64 };
            if y > 0.0 {
                cols.push(j as u32);
                probs.push(y);
            }
        }
        offsets.push(cols.len());
        if cols.len() > MAX_TRANSITIONS {
            return Err(ChainError::StateSpaceTooLarge { states: space.len() });
        }
    }
    Ok(AuxChain { space, ell: k - 1, k, n, offsets, cols, probs, sigma })
}

/// Chain on ordered edges: e⃗ → f⃗ whenever the last ℓ entries of e⃗ open f⃗.
pub fn build_ordered_edge_chain(
    g: &Hypergraph,
    x: &FractionalMatching,
    ell: usize,
    opts: ChainOptions,
) -> Result<AuxChain, ChainError> {
    let n = g.n();
    let k = g.k();
    if ell >= k {
        return Err(ChainError::BadOverlap { ell, k });
    }
    let total = factorial_u64(k) as usize * g.num_edges();
    if total > MAX_STATES {
        return Err(ChainError::StateSpaceTooLarge { states: total });
    }
    let mut keys = Vec::with_capacity(total);
    let mut zero = None;
    for (id, e) in g.edges().enumerate() {
        if x.weights[id] <= 0.0 && !opts.allow_zero_support {
            zero.get_or_insert_with(|| e.to_vec());
            continue;
        }
        for_each_permutation(e, |p| keys.push((pack(p, n), p.to_vec())));
    }
    let space = StateSpace::from_sorted(ChainMode::OrderedEdge, k, n, keys);

    // ℓ-set -> (x_S, containing edges)
    let mut by_set: BTreeMap<Vec<u32>, (f64, Vec<u32>)> = BTreeMap::new();
    for (id, e) in g.edges().enumerate() {
        for_each_subset(e, ell, |s| {
            let entry = by_set.entry(s.to_vec()).or_insert((0.0, Vec::new()));
            entry.0 += x.weights[id];
            entry.1.push(id as u32);
        });
    }
    let fk1 = factorial_u64(k - 1) as f64;
    let fkl = factorial_u64(k - ell) as f64;
    let mut offsets = vec![0usize];
    let mut cols = Vec::new();
    let mut probs = Vec::new();
    let mut sigma = Vec::with_capacity(space.len());
    let mut target = vec![0u32; k];
    for i in 0..space.len() {
        let s = space.state(i).to_vec();
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sigma.push(x.weights[g.edge_id(&sorted).expect("state is an edge")] / (fk1 * n as f64));
        let suffix = &s[k - ell..];
        let mut key = suffix.to_vec();
        key.sort_unstable();
        let (xs, ids) = &by_set[&key];
        let deg = ids.len() as f64;
        target[..ell].copy_from_slice(suffix);
        for &f in ids {
            let fe = g.edge(f as usize);
            let rest: Vec<u32> = fe.iter().copied().filter(|v| !key.contains(v)).collect();
            let y = if *xs > 0.0 { x.weights[f as usize] / (fkl * xs) } else { 1.0 / (fkl * deg) };
            let mut err = None;
            for_each_permutation(&rest, |p| {
                target[ell..].copy_from_slice(p);
                match space.index_of(&target) {
                    Some(j) => {
                        if y > 0.0 {
                            cols.push(j as u32);
                            probs.push(y);
                        }
                    }
                    None => err = Some(target.clone()),
                }
            });
            if let Some(t) = err {
                return Err(ChainError::ZeroSupport { state: zero.clone().unwrap_or(t) });
            }
        }
        offsets.push(cols.len());
        if cols.len() > MAX_TRANSITIONS {
            return Err(ChainError::StateSpaceTooLarge { states: space.len() });
        }
    }
    Ok(AuxChain { space, ell, k, n, offsets, cols, probs, sigma })
}
