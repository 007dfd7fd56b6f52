//! Exact brute-force counters: tight Hamilton cycles, Hamilton ℓ-cycles (ordered and
//! unordered), perfect matchings, tuple-walk counts and Hamilton paths between tuples.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::hypergraph::Hypergraph;
use crate::math::{factorial, for_each_permutation};

pub const MAX_WALK_STATES: usize = 5_000_000;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum CountError {
    #[error("DivisibilityViolated: k - ell = {step} does not divide n = {n}")]
    DivisibilityViolated { n: usize, step: usize },
    #[error("ell = {ell} is outside [0, {k})")]
    InvalidEll { k: usize, ell: usize },
    #[error("ordered count {ordered} != C = {c} times unordered count {unordered}")]
    CrossCheckFailed { ordered: String, unordered: String, c: String },
    #[error("ordered traversal count {raw} is not divisible by {divisor}")]
    Indivisible { raw: String, divisor: u64 },
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("walk state space exceeds {0} states")]
    StateSpaceTooLarge(usize),
}

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum PathError {
    #[error("start and end tuples overlap")]
    Overlapping,
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("no Hamilton path exists ({nodes} nodes explored)")]
    NotFound { nodes: u64 },
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub value: BigUint,
    pub elapsed: f64,
    pub nodes_explored: u64,
}

impl CountResult {
    pub fn log2(&self) -> f64 {
        crate::math::log2_big(&self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleConstants {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub c: BigUint,
    pub pi1: usize,
    pub pi2: usize,
}

pub fn cycle_constants(n: usize, k: usize, ell: usize) -> Result<CycleConstants, CountError> {
    if ell >= k {
        return Err(CountError::InvalidEll { k, ell });
    }
    let step = k - ell;
    if n % step != 0 {
        return Err(CountError::DivisibilityViolated { n, step });
    }
    let (pi1, pi2, c) = if ell == 0 {
        let blocks = n / k;
        (0, k, factorial(blocks) * factorial(k).pow(blocks as u32))
    } else {
        let pi1 = k % step;
        let pi2 = step - pi1;
        (pi1, pi2, (factorial(pi1) * factorial(pi2)).pow((n / step) as u32))
    };
    Ok(CycleConstants { n, k, ell, c, pi1, pi2 })
}

type Accept<'a> = &'a (dyn Fn(&[u32]) -> bool + Sync);

/// Left-to-right sequence search: edges are the k-windows starting at multiples
/// of `step`, read cyclically. Vertex `forced.1` may only sit at `forced.0`.
struct SeqSearch<'a> {
    g: &'a Hypergraph,
    n: usize,
    k: usize,
    step: usize,
    /// Some(π1): each period is an A-segment of π1 slots then a B-segment, both increasing.
    segments: Option<usize>,
    forced: (usize, u32),
    accept: Accept<'a>,
}

impl SeqSearch<'_> {
    fn window_is_edge(&self, w: &[u32]) -> bool {
        let mut s = w.to_vec();
        s.sort_unstable();
        self.g.contains_edge(&s)
    }

    fn segment_start(&self, p: usize) -> bool {
        match self.segments {
            Some(pi1) => {
                let o = p % self.step;
                o == 0 || o == pi1
            }
            None => true,
        }
    }

    fn candidates(&self, seq: &[u32], used: &[bool], out: &mut Vec<u32>) {
        out.clear();
        let p = seq.len();
        let due = p + 1 >= self.k && (p + 1 - self.k) % self.step == 0;
        let floor = if self.segment_start(p) { None } else { Some(seq[p - 1]) };
        let ok = |v: u32| floor.is_none_or(|f| v > f);
        if p == self.forced.0 {
            let v = self.forced.1;
            if !used[v as usize] && ok(v) {
                if due {
                    let mut w = seq[p + 1 - self.k..].to_vec();
                    w.push(v);
                    if !self.window_is_edge(&w) {
                        return;
                    }
                }
                out.push(v);
            }
            return;
        }
        if due {
            let mut s = seq[p + 1 - self.k..].to_vec();
            s.sort_unstable();
            out.extend(self.g.neighbors(&s).iter().copied().filter(|&v| !used[v as usize] && v != self.forced.1 && ok(v)));
        } else {
            out.extend((0..self.n as u32).filter(|&v| !used[v as usize] && v != self.forced.1 && ok(v)));
        }
    }

    fn closes(&self, seq: &[u32]) -> bool {
        let mut w = Vec::with_capacity(self.k);
        for s in (0..self.n).step_by(self.step).filter(|&s| s + self.k > self.n) {
            w.clear();
            w.extend_from_slice(&seq[s..]);
            w.extend_from_slice(&seq[..s + self.k - self.n]);
            if !self.window_is_edge(&w) {
                return false;
            }
        }
        (self.accept)(seq)
    }

    fn dfs(&self, seq: &mut Vec<u32>, used: &mut [bool], nodes: &mut u64) -> u128 {
        *nodes += 1;
        if seq.len() == self.n {
            return self.closes(seq) as u128;
        }
        let mut cands = Vec::new();
        self.candidates(seq, used, &mut cands);
        let mut total = 0;
        for v in cands {
            seq.push(v);
            used[v as usize] = true;
            total += self.dfs(seq, used, nodes);
            used[v as usize] = false;
            seq.pop();
        }
        total
    }

    /// Runs the search, splitting the first branching level across rayon workers.
    fn run(&self) -> (u128, u64) {
        let mut seq = Vec::with_capacity(self.n);
        let mut used = vec![false; self.n];
        let mut nodes = 0u64;
        let mut cands = Vec::new();
        loop {
            if seq.len() == self.n {
                return (self.closes(&seq) as u128, nodes + 1);
            }
            self.candidates(&seq, &used, &mut cands);
            nodes += 1;
            match cands.len() {
                0 => return (0, nodes),
                1 => {
                    used[cands[0] as usize] = true;
                    seq.push(cands[0]);
                }
                _ => break,
            }
        }
        let (count, sub) = cands
            .par_iter()
            .map(|&v| {
                let mut seq = seq.clone();
                let mut used = used.clone();
                seq.push(v);
                used[v as usize] = true;
                let mut nodes = 0u64;
                let c = self.dfs(&mut seq, &mut used, &mut nodes);
                (c, nodes)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        (count, nodes + sub)
    }
}

fn result(value: BigUint, start: Instant, nodes: u64) -> CountResult {
    CountResult { value, elapsed: start.elapsed().as_secs_f64(), nodes_explored: nodes }
}

/// Ψ(G): cyclic orderings with every k consecutive vertices an edge, up to rotation
/// and reflection. Vertex 0 is pinned first and seq[1] < seq[n−1].
pub fn count_tight_hamilton_cycles(g: &Hypergraph) -> CountResult {
    let start = Instant::now();
    let n = g.n();
    if n < g.k() + 1 {
        return result(BigUint::zero(), start, 0);
    }
    let accept = |s: &[u32]| s[1] < s[n - 1];
    let search = SeqSearch { g, n, k: g.k(), step: 1, segments: None, forced: (0, 0), accept: &accept };
    let (c, nodes) = search.run();
    result(BigUint::from(c), start, nodes)
}

/// Φ(G), by always covering the lowest uncovered vertex.
pub fn count_perfect_matchings(g: &Hypergraph) -> CountResult {
    let start = Instant::now();
    fn rec(g: &Hypergraph, covered: &mut [bool], nodes: &mut u64) -> u128 {
        *nodes += 1;
        let Some(u) = covered.iter().position(|&c| !c) else {
            return 1;
        };
        let mut total = 0;
        for &e in g.incident_edges(u as u32) {
            let edge = g.edge(e as usize);
            if edge.iter().any(|&v| v as usize != u && covered[v as usize]) {
                continue;
            }
            for &v in edge {
                covered[v as usize] = true;
            }
            total += rec(g, covered, nodes);
            for &v in edge {
                covered[v as usize] = false;
            }
        }
        total
    }
    let mut nodes = 0;
    let value = if g.n() % g.k() == 0 { rec(g, &mut vec![false; g.n()], &mut nodes) } else { 0 };
    result(BigUint::from(value), start, nodes)
}

fn unordered_ell_count(g: &Hypergraph, step: usize, pi1: usize) -> (u128, u64) {
    let n = g.n();
    // nonempty segments in cyclic order, as start positions
    let mut starts = Vec::new();
    for j in 0..n / step {
        if pi1 > 0 {
            starts.push(j * step);
        }
        starts.push(j * step + pi1);
    }
    let accept = move |seq: &[u32]| {
        let pos0 = if seq[0] == 0 { 0 } else { pi1 };
        let i = starts.iter().position(|&s| s == pos0).expect("segment of vertex 0");
        let m = starts.len();
        let prev = starts[(i + m - 1) % m];
        let next = starts[(i + 1) % m];
        seq[next] < seq[prev]
    };
    let mut forced_positions = vec![0];
    if pi1 > 0 {
        forced_positions.push(pi1);
    }
    let mut total = (0, 0);
    for f in forced_positions {
        let search = SeqSearch { g, n, k: g.k(), step, segments: Some(pi1), forced: (f, 0), accept: &accept };
        let (c, nodes) = search.run();
        total = (total.0 + c, total.1 + nodes);
    }
    total
}

/// Every valid ordered traversal with vertex 0 somewhere in the first period.
fn raw_traversals_first_period(g: &Hypergraph, step: usize) -> (u128, u64) {
    let accept = |_: &[u32]| true;
    let mut total = (0, 0);
    for f in 0..step {
        let search = SeqSearch { g, n: g.n(), k: g.k(), step, segments: None, forced: (f, 0), accept: &accept };
        let (c, nodes) = search.run();
        total = (total.0 + c, total.1 + nodes);
    }
    total
}

/// (Ψ_ℓ(G), Ψ′_ℓ(G)), computed independently and cross-checked through C_{n,k,ℓ}.
/// ℓ = 0 counts perfect matchings and all block orderings.
pub fn count_hamilton_ell_cycles(g: &Hypergraph, ell: usize) -> Result<(CountResult, CountResult), CountError> {
    let n = g.n();
    let k = g.k();
    let cc = cycle_constants(n, k, ell)?;
    let step = k - ell;
    let t0 = Instant::now();
    let unordered = if ell == 0 {
        count_perfect_matchings(g)
    } else if n < k + 1 {
        result(BigUint::zero(), t0, 0)
    } else {
        let (c, nodes) = unordered_ell_count(g, step, cc.pi1);
        result(BigUint::from(c), t0, nodes)
    };
    let t1 = Instant::now();
    let ordered = if ell > 0 && n < k + 1 {
        result(BigUint::zero(), t1, 0)
    } else {
        let (fixed, nodes) = raw_traversals_first_period(g, step);
        // raw = fixed·n/step; ordered = raw for ℓ = 0, raw/(2n/step) otherwise
        let value = if ell == 0 {
            BigUint::from(fixed) * BigUint::from(n / step)
        } else {
            if fixed % 2 != 0 {
                return Err(CountError::Indivisible { raw: (fixed * (n / step) as u128).to_string(), divisor: (2 * n / step) as u64 });
            }
            BigUint::from(fixed / 2)
        };
        result(value, t1, nodes)
    };
    if ordered.value != &cc.c * &unordered.value {
        return Err(CountError::CrossCheckFailed {
            ordered: ordered.value.to_string(),
            unordered: unordered.value.to_string(),
            c: cc.c.to_string(),
        });
    }
    Ok((unordered, ordered))
}

/// Number of ℓ-walks of `len` steps from the ordered tuple `s` to `t`, with ℓ = |s|.
/// Each step appends k−ℓ new vertices that, with the current tuple, form an edge.
pub fn count_walks_between(g: &Hypergraph, s: &[u32], t: &[u32], len: usize) -> Result<CountResult, CountError> {
    let start = Instant::now();
    let ell = s.len();
    let k = g.k();
    if ell == 0 || ell >= k || t.len() != ell {
        return Err(CountError::InvalidTuple(format!("tuples must have equal length in [1, {k})")));
    }
    for tup in [s, t] {
        if tup.iter().any(|&v| v as usize >= g.n()) || !crate::walk::all_distinct(tup) {
            return Err(CountError::InvalidTuple(format!("{tup:?}")));
        }
    }
    let mut layer: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
    layer.insert(s.to_vec(), BigUint::one());
    let mut nodes = 0u64;
    let mut buf = Vec::with_capacity(k);
    for _ in 0..len {
        let mut next: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for (a, c) in &layer {
            nodes += 1;
            for_each_extension(g, a, |w| {
                buf.clear();
                buf.extend_from_slice(a);
                buf.extend_from_slice(w);
                let key = buf[buf.len() - ell..].to_vec();
                *next.entry(key).or_insert_with(BigUint::zero) += c;
            });
            if next.len() > MAX_WALK_STATES {
                return Err(CountError::StateSpaceTooLarge(MAX_WALK_STATES));
            }
        }
        layer = next;
    }
    let value = layer.get(t).cloned().unwrap_or_else(BigUint::zero);
    Ok(result(value, start, nodes))
}

/// Calls `f` with each ordered (k−ℓ)-sequence completing the tuple `a` to an edge.
fn for_each_extension(g: &Hypergraph, a: &[u32], mut f: impl FnMut(&[u32])) {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    if a.len() + 1 == g.k() {
        for &v in g.neighbors(&sorted) {
            f(&[v]);
        }
        return;
    }
    let mut rest = Vec::with_capacity(g.k() - a.len());
    for &e in g.incident_edges(sorted[0]) {
        let edge = g.edge(e as usize);
        if !sorted.iter().all(|v| edge.binary_search(v).is_ok()) {
            continue;
        }
        rest.clear();
        rest.extend(edge.iter().copied().filter(|v| sorted.binary_search(v).is_err()));
        for_each_permutation(&rest, &mut f);
    }
}

/// Total number of ℓ-walks of `len` steps from `s`, over all end tuples.
pub fn count_walks_from(g: &Hypergraph, s: &[u32], len: usize) -> Result<BigUint, CountError> {
    let ell = s.len();
    let mut layer: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
    layer.insert(s.to_vec(), BigUint::one());
    for _ in 0..len {
        let mut next: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for (a, c) in &layer {
            for_each_extension(g, a, |w| {
                let mut full = a.clone();
                full.extend_from_slice(w);
                *next.entry(full[full.len() - ell..].to_vec()).or_insert_with(BigUint::zero) += c;
            });
        }
        layer = next;
    }
    Ok(layer.values().sum())
}

/// Tight Hamilton path starting with the (k−1)-tuple `s` and ending with `t`.
/// Backtracking with codegree pruning and fewest-continuations-first ordering.
pub fn find_hamilton_path_between(g: &Hypergraph, s: &[u32], t: &[u32], budget: Option<u64>) -> Result<Vec<u32>, PathError> {
    hamilton_path_search(g, s, t, budget).map(|(p, _)| p)
}

/// As [`find_hamilton_path_between`], also returning the number of search nodes.
pub fn hamilton_path_search(g: &Hypergraph, s: &[u32], t: &[u32], budget: Option<u64>) -> Result<(Vec<u32>, u64), PathError> {
    let n = g.n();
    let k = g.k();
    if s.len() != k - 1 || t.len() != k - 1 {
        return Err(PathError::InvalidTuple(format!("tuples must have length {}", k - 1)));
    }
    let mut used = vec![false; n];
    for &v in s.iter().chain(t) {
        if v as usize >= n {
            return Err(PathError::InvalidTuple(format!("vertex {v} out of range")));
        }
        if used[v as usize] {
            return Err(if s.contains(&v) && t.contains(&v) {
                PathError::Overlapping
            } else {
                PathError::InvalidTuple(format!("repeated vertex {v}"))
            });
        }
        used[v as usize] = true;
    }
    struct Search<'a> {
        g: &'a Hypergraph,
        t: &'a [u32],
        target: usize,
        nodes: u64,
        budget: u64,
    }
    impl Search<'_> {
        fn finish(&self, seq: &[u32]) -> bool {
            let k = self.g.k();
            let mut full = seq.to_vec();
            full.extend_from_slice(self.t);
            (seq.len() + 1 - k..=full.len() - k).all(|i| {
                let mut w = full[i..i + k].to_vec();
                w.sort_unstable();
                self.g.contains_edge(&w)
            })
        }
        fn options(&self, seq: &[u32], used: &[bool]) -> Vec<u32> {
            let k = self.g.k();
            let mut w = seq[seq.len() + 1 - k..].to_vec();
            w.sort_unstable();
            self.g.neighbors(&w).iter().copied().filter(|&v| !used[v as usize]).collect()
        }
        fn dfs(&mut self, seq: &mut Vec<u32>, used: &mut [bool]) -> Result<bool, PathError> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(PathError::BudgetExhausted { nodes: self.nodes });
            }
            if seq.len() == self.target {
                return Ok(self.finish(seq));
            }
            let last = seq.len() + 1 == self.target;
            let mut ranked: Vec<(usize, u32)> = Vec::new();
            for v in self.options(seq, used) {
                if last {
                    ranked.push((0, v));
                    continue;
                }
                seq.push(v);
                used[v as usize] = true;
                let onward = self.options(seq, used).len();
                used[v as usize] = false;
                seq.pop();
                if onward > 0 {
                    ranked.push((onward, v));
                }
            }
            ranked.sort_unstable();
            for (_, v) in ranked {
                seq.push(v);
                used[v as usize] = true;
                if self.dfs(seq, used)? {
                    return Ok(true);
                }
                used[v as usize] = false;
                seq.pop();
            }
            Ok(false)
        }
    }
    let mut search = Search { g, t, target: n - (k - 1), nodes: 0, budget: budget.unwrap_or(u64::MAX) };
    let mut seq = s.to_vec();
    if search.dfs(&mut seq, &mut used)? {
        seq.extend_from_slice(t);
        Ok((seq, search.nodes))
    } else {
        Err(PathError::NotFound { nodes: search.nodes })
    }
}

/// Checks that `seq` is a tight path (or cycle) covering every vertex exactly once.
pub fn is_tight_hamilton(g: &Hypergraph, seq: &[u32], cyclic: bool) -> bool {
    let n = g.n();
    let k = g.k();
    if seq.len() != n || n < k {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in seq {
        if v as usize >= n || std::mem::replace(&mut seen[v as usize], true) {
            return false;
        }
    }
    let windows = if cyclic { n } else { n - k + 1 };
    (0..windows).all(|i| {
        let mut w: Vec<u32> = (0..k).map(|j| seq[(i + j) % n]).collect();
        w.sort_unstable();
        g.contains_edge(&w)
    })
}
