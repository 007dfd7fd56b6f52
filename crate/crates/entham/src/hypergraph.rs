//! k-uniform hypergraphs with a codegree index, Dirac checks, generators and edge files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{binomial, for_each_combination};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum HypergraphError {
    #[error("edge {index} has {len} vertices, expected {k}")]
    EdgeArityMismatch { index: usize, len: usize, k: usize },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u64, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no Dirac instance after {tries} tries")]
    GenerationExhausted { tries: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Dirac threshold δ together with δ̂ = δ − 1/2.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DiracParams {
    pub delta: f64,
    pub delta_hat: f64,
}

impl DiracParams {
    pub fn new(delta: f64) -> Self {
        DiracParams { delta, delta_hat: delta - 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    Complete,
    Binomial { p: f64, seed: u64 },
    DiracRejection { delta: f64, p: f64, seed: u64, max_tries: usize },
}

#[derive(Debug, Default)]
struct Incidence {
    offsets: Vec<usize>,
    edges: Vec<u32>,
}

/// Immutable k-uniform hypergraph on vertices `0..n`.
///
/// Edges are stored sorted and in lexicographic order. Every (k−1)-set with at
/// least one neighbor owns a slot holding its neighbors in increasing order
/// together with the id of the matching edge.
#[derive(Debug)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<u32>,
    slot_of: HashMap<u64, u32>,
    slot_sets: Vec<u32>,
    slot_offsets: Vec<usize>,
    slot_neighbors: Vec<u32>,
    slot_edges: Vec<u32>,
    incidence: OnceLock<Incidence>,
}

impl Clone for Hypergraph {
    fn clone(&self) -> Self {
        Hypergraph {
            n: self.n,
            k: self.k,
            edges: self.edges.clone(),
            slot_of: self.slot_of.clone(),
            slot_sets: self.slot_sets.clone(),
            slot_offsets: self.slot_offsets.clone(),
            slot_neighbors: self.slot_neighbors.clone(),
            slot_edges: self.slot_edges.clone(),
            incidence: OnceLock::new(),
        }
    }
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.edges == other.edges
    }
}

/// Induced subgraph together with the vertex relabeling.
#[derive(Debug, Clone)]
pub struct Induced {
    pub graph: Hypergraph,
    pub old_to_new: Vec<Option<u32>>,
    pub new_to_old: Vec<u32>,
}

fn pack(set: &[u32], n: usize) -> u64 {
    set.iter().fold(0u64, |acc, &v| acc * n as u64 + v as u64)
}

fn fits(n: usize, k: usize) -> bool {
    (n as u128).checked_pow(k as u32).is_some_and(|p| p <= u64::MAX as u128)
}

impl Hypergraph {
    /// Builds the canonical hypergraph; duplicate edges are collapsed.
    pub fn build(n: usize, k: usize, edge_list: &[Vec<u32>]) -> Result<Self, HypergraphError> {
        Self::build_counting_duplicates(n, k, edge_list).map(|(g, _)| g)
    }

    /// As [`Hypergraph::build`], also returning how many duplicate edges were dropped.
    pub fn build_counting_duplicates(
        n: usize,
        k: usize,
        edge_list: &[Vec<u32>],
    ) -> Result<(Self, usize), HypergraphError> {
        check_shape(n, k)?;
        let mut keys = Vec::with_capacity(edge_list.len());
        let mut buf = Vec::with_capacity(k);
        for (index, e) in edge_list.iter().enumerate() {
            if e.len() != k {
                return Err(HypergraphError::EdgeArityMismatch { index, len: e.len(), k });
            }
            buf.clear();
            buf.extend_from_slice(e);
            buf.sort_unstable();
            if let Some(&v) = buf.iter().find(|&&v| v as usize >= n) {
                return Err(HypergraphError::VertexOutOfRange { vertex: v as u64, n });
            }
            if buf.windows(2).any(|w| w[0] == w[1]) {
                return Err(HypergraphError::EdgeArityMismatch { index, len: distinct(&buf), k });
            }
            keys.push(pack(&buf, n));
        }
        let before = keys.len();
        keys.sort_unstable();
        keys.dedup();
        let dups = before - keys.len();
        Ok((Self::from_sorted_keys(n, k, &keys), dups))
    }

    fn from_sorted_keys(n: usize, k: usize, keys: &[u64]) -> Self {
        let mut edges = vec![0u32; keys.len() * k];
        for (i, &key) in keys.iter().enumerate() {
            let mut rest = key;
            for j in (0..k).rev() {
                edges[i * k + j] = (rest % n as u64) as u32;
                rest /= n as u64;
            }
        }
        Self::from_flat_sorted(n, k, edges)
    }

    /// `edges` must already be canonical: sorted within, lexicographic across, no duplicates.
    fn from_flat_sorted(n: usize, k: usize, edges: Vec<u32>) -> Self {
        let m = edges.len() / k;
        let mut slot_of: HashMap<u64, u32> = HashMap::new();
        let mut slot_sets = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        let mut sub = vec![0u32; k - 1];
        for e in edges.chunks_exact(k) {
            for skip in 0..k {
                fill_without(e, skip, &mut sub);
                let key = pack(&sub, n);
                let next = slot_of.len() as u32;
                let slot = *slot_of.entry(key).or_insert_with(|| {
                    slot_sets.extend_from_slice(&sub);
                    counts.push(0);
                    next
                });
                counts[slot as usize] += 1;
            }
        }
        let mut slot_offsets = Vec::with_capacity(counts.len() + 1);
        slot_offsets.push(0usize);
        for c in &counts {
            slot_offsets.push(slot_offsets.last().unwrap() + c);
        }
        let total = *slot_offsets.last().unwrap();
        let mut slot_neighbors = vec![0u32; total];
        let mut slot_edges = vec![0u32; total];
        let mut cursor = slot_offsets.clone();
        for (id, e) in edges.chunks_exact(k).enumerate() {
            for skip in 0..k {
                fill_without(e, skip, &mut sub);
                let slot = slot_of[&pack(&sub, n)] as usize;
                let at = cursor[slot];
                slot_neighbors[at] = e[skip];
                slot_edges[at] = id as u32;
                cursor[slot] += 1;
            }
        }
        debug_assert_eq!(m * k, total);
        Hypergraph {
            n,
            k,
            edges,
            slot_of,
            slot_sets,
            slot_offsets,
            slot_neighbors,
            slot_edges,
            incidence: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len() / self.k
    }

    pub fn edge(&self, id: usize) -> &[u32] {
        &self.edges[id * self.k..(id + 1) * self.k]
    }

    pub fn edges(&self) -> impl Iterator<Item = &[u32]> {
        self.edges.chunks_exact(self.k)
    }

    pub fn edge_list(&self) -> Vec<Vec<u32>> {
        self.edges().map(|e| e.to_vec()).collect()
    }

    fn slot(&self, sorted: &[u32]) -> Option<usize> {
        if sorted.len() + 1 != self.k || sorted.iter().any(|&v| v as usize >= self.n) {
            return None;
        }
        self.slot_of.get(&pack(sorted, self.n)).map(|&s| s as usize)
    }

    /// N(S) for a sorted (k−1)-set, increasing.
    pub fn neighbors(&self, sorted: &[u32]) -> &[u32] {
        match self.slot(sorted) {
            Some(s) => &self.slot_neighbors[self.slot_offsets[s]..self.slot_offsets[s + 1]],
            None => &[],
        }
    }

    /// Edge ids of S ∪ {v} for v in [`Hypergraph::neighbors`], aligned.
    pub fn neighbor_edges(&self, sorted: &[u32]) -> &[u32] {
        match self.slot(sorted) {
            Some(s) => &self.slot_edges[self.slot_offsets[s]..self.slot_offsets[s + 1]],
            None => &[],
        }
    }

    pub fn codegree(&self, sorted: &[u32]) -> usize {
        self.neighbors(sorted).len()
    }

    /// Number of (k−1)-sets with at least one neighbor.
    pub fn num_slots(&self) -> usize {
        self.slot_offsets.len() - 1
    }

    /// The i-th indexed (k−1)-set with its neighbors and edge ids.
    pub fn slot_entry(&self, i: usize) -> (&[u32], &[u32], &[u32]) {
        let km = self.k - 1;
        let r = self.slot_offsets[i]..self.slot_offsets[i + 1];
        (
            &self.slot_sets[i * km..(i + 1) * km],
            &self.slot_neighbors[r.clone()],
            &self.slot_edges[r],
        )
    }

    pub fn edge_id(&self, e: &[u32]) -> Option<usize> {
        if e.len() != self.k {
            return None;
        }
        let mut s = e.to_vec();
        s.sort_unstable();
        let last = s.pop()?;
        let nb = self.neighbors(&s);
        nb.binary_search(&last).ok().map(|i| self.neighbor_edges(&s)[i] as usize)
    }

    pub fn contains_edge(&self, e: &[u32]) -> bool {
        self.edge_id(e).is_some()
    }

    /// Ids of the edges containing `v`.
    pub fn incident_edges(&self, v: u32) -> &[u32] {
        let inc = self.incidence.get_or_init(|| {
            let mut counts = vec![0usize; self.n + 1];
            for &v in &self.edges {
                counts[v as usize + 1] += 1;
            }
            for i in 1..=self.n {
                counts[i] += counts[i - 1];
            }
            let mut cursor = counts.clone();
            let mut edges = vec![0u32; self.edges.len()];
            for (id, e) in self.edges().enumerate() {
                for &v in e {
                    edges[cursor[v as usize]] = id as u32;
                    cursor[v as usize] += 1;
                }
            }
            Incidence { offsets: counts, edges }
        });
        &inc.edges[inc.offsets[v as usize]..inc.offsets[v as usize + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incident_edges(v).len()
    }

    /// δ_d(G): minimum over d-sets S of the number of edges containing S.
    pub fn min_d_degree(&self, d: usize) -> usize {
        assert!(d < self.k, "d must be below k");
        if d == 0 {
            return self.num_edges();
        }
        if d + 1 == self.k {
            if (self.num_slots() as u128) < binomial(self.n, d) {
                return 0;
            }
            return (0..self.num_slots())
                .map(|s| self.slot_offsets[s + 1] - self.slot_offsets[s])
                .min()
                .unwrap_or(0);
        }
        let mut counts: HashMap<u64, usize> = HashMap::new();
        for e in self.edges() {
            for_each_subset(e, d, |s| *counts.entry(pack(s, self.n)).or_default() += 1);
        }
        if (counts.len() as u128) < binomial(self.n, d) {
            return 0;
        }
        counts.values().copied().min().unwrap_or(0)
    }

    pub fn min_codegree(&self) -> usize {
        self.min_d_degree(self.k - 1)
    }

    /// δ_{k−1}(G)/n as a real.
    pub fn codegree_ratio(&self) -> f64 {
        self.min_codegree() as f64 / self.n as f64
    }

    pub fn is_dirac(&self, p: DiracParams) -> bool {
        self.min_codegree() as f64 >= p.delta * self.n as f64
    }

    /// Codegree strictly above n/2, i.e. Dirac for some δ > 1/2.
    pub fn is_dirac_above_half(&self) -> bool {
        2 * self.min_codegree() > self.n
    }

    /// δ_d(G)/C(n−d, k−d) for d = 0..k−1.
    pub fn degree_monotonicity_profile(&self) -> Vec<f64> {
        (0..self.k)
            .map(|d| self.min_d_degree(d) as f64 / binomial(self.n - d, self.k - d) as f64)
            .collect()
    }

    pub fn generate(kind: GeneratorKind, n: usize, k: usize) -> Result<Self, HypergraphError> {
        check_shape(n, k)?;
        match kind {
            GeneratorKind::Complete => Ok(Self::complete(n, k)),
            GeneratorKind::Binomial { p, seed } => {
                check_p(p)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok(Self::binomial_with(n, k, p, &mut rng))
            }
            GeneratorKind::DiracRejection { delta, p, seed, max_tries } => {
                check_p(p)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let params = DiracParams::new(delta);
                for _ in 0..max_tries {
                    let g = Self::binomial_with(n, k, p, &mut rng);
                    if g.is_dirac(params) {
                        return Ok(g);
                    }
                }
                Err(HypergraphError::GenerationExhausted { tries: max_tries })
            }
        }
    }

    pub fn complete(n: usize, k: usize) -> Self {
        let mut edges = Vec::with_capacity(binomial(n, k) as usize * k);
        for_each_combination(n, k, |c| edges.extend_from_slice(c));
        Self::from_flat_sorted(n, k, edges)
    }

    fn binomial_with(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut edges = Vec::new();
        for_each_combination(n, k, |c| {
            if rng.gen::<f64>() < p {
                edges.extend_from_slice(c);
            }
        });
        Self::from_flat_sorted(n, k, edges)
    }

    /// Induced subgraph on V ∖ M, relabeled in increasing order.
    pub fn remove_vertices(&self, m: &[u32]) -> Induced {
        let mut removed = vec![false; self.n];
        for &v in m {
            removed[v as usize] = true;
        }
        let mut old_to_new = vec![None; self.n];
        let mut new_to_old = Vec::new();
        for v in 0..self.n {
            if !removed[v] {
                old_to_new[v] = Some(new_to_old.len() as u32);
                new_to_old.push(v as u32);
            }
        }
        let mut edges = Vec::new();
        for e in self.edges() {
            if e.iter().all(|&v| !removed[v as usize]) {
                edges.extend(e.iter().map(|&v| old_to_new[v as usize].unwrap()));
            }
        }
        let graph = Self::from_flat_sorted(new_to_old.len(), self.k, edges);
        Induced { graph, old_to_new, new_to_old }
    }

    /// Induced subgraph on the given vertices, relabeled in increasing order of old id.
    pub fn induced_on(&self, keep: &[u32]) -> Induced {
        let mut keep_mask = vec![false; self.n];
        for &v in keep {
            keep_mask[v as usize] = true;
        }
        let m: Vec<u32> = (0..self.n as u32).filter(|&v| !keep_mask[v as usize]).collect();
        self.remove_vertices(&m)
    }

    pub fn to_edge_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.k).unwrap();
        for e in self.edges() {
            let line: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    /// Parses the edge-file format, returning the graph and the number of duplicate lines.
    pub fn parse_edge_list(text: &str) -> Result<(Self, usize), HypergraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = i + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: Result<Vec<u64>, _> = line.split_whitespace().map(str::parse::<u64>).collect();
            let nums = nums.map_err(|e| HypergraphError::Parse { line: lineno, message: e.to_string() })?;
            match header {
                None => {
                    if nums.len() != 2 {
                        return Err(HypergraphError::Parse {
                            line: lineno,
                            message: "header must be \"n k\"".into(),
                        });
                    }
                    let (n, k) = (nums[0] as usize, nums[1] as usize);
                    check_shape(n, k).map_err(|e| HypergraphError::Parse { line: lineno, message: e.to_string() })?;
                    header = Some((n, k));
                }
                Some((n, k)) => {
                    if nums.len() != k {
                        return Err(HypergraphError::Parse {
                            line: lineno,
                            message: format!("expected {k} vertices, found {}", nums.len()),
                        });
                    }
                    if let Some(&v) = nums.iter().find(|&&v| v >= n as u64) {
                        return Err(HypergraphError::Parse {
                            line: lineno,
                            message: format!("vertex {v} out of range for n = {n}"),
                        });
                    }
                    let mut e: Vec<u32> = nums.iter().map(|&v| v as u32).collect();
                    e.sort_unstable();
                    if e.windows(2).any(|w| w[0] == w[1]) {
                        return Err(HypergraphError::Parse { line: lineno, message: "repeated vertex".into() });
                    }
                    edges.push(e);
                }
            }
        }
        let (n, k) = header.ok_or(HypergraphError::Parse { line: 0, message: "missing header".into() })?;
        Self::build_counting_duplicates(n, k, &edges)
    }

    pub fn read_edge_file(path: &Path) -> Result<(Self, usize), HypergraphError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse_edge_list(&text)
    }

    pub fn write_edge_file(&self, path: &Path) -> Result<(), HypergraphError> {
        std::fs::write(path, self.to_edge_string()).map_err(|e| io_err(path, e))
    }
}

fn io_err(path: &Path, e: std::io::Error) -> HypergraphError {
    HypergraphError::Io { path: path.display().to_string(), message: e.to_string() }
}

fn check_shape(n: usize, k: usize) -> Result<(), HypergraphError> {
    if k < 2 || n < k {
        return Err(HypergraphError::InvalidParameters(format!("need n >= k >= 2, got n={n}, k={k}")));
    }
    if !fits(n, k) {
        return Err(HypergraphError::InvalidParameters(format!("n={n}, k={k} exceeds the packed key range")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<(), HypergraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(HypergraphError::InvalidParameters(format!("p={p} outside [0, 1]")));
    }
    Ok(())
}

fn distinct(sorted: &[u32]) -> usize {
    let mut v = sorted.to_vec();
    v.dedup();
    v.len()
}

fn fill_without(e: &[u32], skip: usize, out: &mut [u32]) {
    let mut j = 0;
    for (i, &v) in e.iter().enumerate() {
        if i != skip {
            out[j] = v;
            j += 1;
        }
    }
}

/// Calls `f` on every d-subset of the sorted slice `e`, each sorted.
pub fn for_each_subset(e: &[u32], d: usize, mut f: impl FnMut(&[u32])) {
    let mut buf = vec![0u32; d];
    for_each_combination(e.len(), d, |idx| {
        for (b, &i) in buf.iter_mut().zip(idx) {
            *b = e[i as usize];
        }
        f(&buf);
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k6() -> Hypergraph {
        Hypergraph::complete(6, 3)
    }

    fn k6_minus_012() -> Hypergraph {
        let edges: Vec<Vec<u32>> = k6().edges().filter(|e| *e != [0, 1, 2]).map(|e| e.to_vec()).collect();
        Hypergraph::build(6, 3, &edges).unwrap()
    }

    #[test]
    fn build_k4_graph() {
        let g = Hypergraph::build(4, 2, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3], vec![0, 2], vec![1, 3]]).unwrap();
        assert_eq!(g.num_edges(), 6);
        assert_eq!(g, Hypergraph::complete(4, 2));
    }

    #[test]
    fn build_rejects_wrong_arity() {
        let err = Hypergraph::build(6, 3, &[vec![0, 1, 2, 3]]).unwrap_err();
        assert!(matches!(err, HypergraphError::EdgeArityMismatch { len: 4, .. }));
        let err = Hypergraph::build(6, 3, &[vec![0, 1, 6]]).unwrap_err();
        assert_eq!(err, HypergraphError::VertexOutOfRange { vertex: 6, n: 6 });
    }

    #[test]
    fn duplicates_collapse() {
        let (g, dups) = Hypergraph::build_counting_duplicates(4, 2, &[vec![0, 1], vec![1, 0], vec![2, 3]]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(dups, 1);
    }

    #[test]
    fn degrees_of_k6() {
        let g = k6();
        assert_eq!(g.min_d_degree(2), 4);
        assert_eq!(g.min_d_degree(1), 10);
        assert_eq!(g.min_d_degree(0), 20);
        assert_eq!(k6_minus_012().min_d_degree(2), 3);
        assert_eq!(g.degree_monotonicity_profile(), vec![1.0, 1.0, 1.0]);
        let prof = k6_minus_012().degree_monotonicity_profile();
        assert_eq!(prof.len(), 3);
        assert!((prof[0] - 19.0 / 20.0).abs() < 1e-15);
        assert!(prof.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn dirac_checks() {
        assert!(k6().is_dirac(DiracParams::new(0.6)));
        assert!(!k6().is_dirac(DiracParams::new(0.7)));
        assert!(!k6_minus_012().is_dirac(DiracParams::new(0.51)));
    }

    #[test]
    fn neighbors_and_lookup() {
        let g = k6();
        assert_eq!(g.neighbors(&[1, 3]), &[0, 2, 4, 5]);
        let ids = g.neighbor_edges(&[1, 3]);
        for (&v, &id) in g.neighbors(&[1, 3]).iter().zip(ids) {
            let mut e = vec![1, 3, v];
            e.sort_unstable();
            assert_eq!(g.edge(id as usize), e.as_slice());
        }
        assert_eq!(g.edge_id(&[5, 0, 2]), g.edges().position(|e| e == [0, 2, 5]));
        assert_eq!(g.incident_edges(0).len(), 10);
        assert_eq!(k6_minus_012().codegree(&[0, 1]), 3);
    }

    #[test]
    fn generators() {
        assert_eq!(Hypergraph::generate(GeneratorKind::Complete, 6, 3).unwrap().num_edges(), 20);
        let g = Hypergraph::generate(GeneratorKind::Binomial { p: 1.0, seed: 3 }, 7, 3).unwrap();
        assert_eq!(g, Hypergraph::complete(7, 3));
        let err = Hypergraph::generate(
            GeneratorKind::DiracRejection { delta: 0.6, p: 0.0, seed: 1, max_tries: 5 },
            8,
            3,
        )
        .unwrap_err();
        assert_eq!(err, HypergraphError::GenerationExhausted { tries: 5 });
        let a = Hypergraph::generate(GeneratorKind::Binomial { p: 0.5, seed: 42 }, 12, 3).unwrap();
        let b = Hypergraph::generate(GeneratorKind::Binomial { p: 0.5, seed: 42 }, 12, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn removal() {
        let g = k6();
        let r = g.remove_vertices(&[5]);
        assert_eq!(r.graph, Hypergraph::complete(5, 3));
        assert_eq!(g.remove_vertices(&[]).graph, g);
        let r = g.remove_vertices(&[4, 5]);
        assert_eq!(r.graph.num_edges(), 4);
        let r = g.remove_vertices(&[2]);
        assert_eq!(r.old_to_new[3], Some(2));
        assert_eq!(r.new_to_old, vec![0, 1, 3, 4, 5]);
    }

    #[test]
    fn edge_file_round_trip() {
        let g = Hypergraph::complete(4, 2);
        let (back, dups) = Hypergraph::parse_edge_list(&g.to_edge_string()).unwrap();
        assert_eq!(back, g);
        assert_eq!(dups, 0);
        let text = format!("# comment\n{}", k6().to_edge_string());
        assert_eq!(Hypergraph::parse_edge_list(&text).unwrap().0, k6());
        let err = Hypergraph::parse_edge_list("6 3\n0 1 2\n3 4\n").unwrap_err();
        assert!(matches!(err, HypergraphError::Parse { line: 3, .. }));
    }

    proptest! {
        #[test]
        fn fact_monotone_and_removal(seed in any::<u64>(), n in 5usize..10, p in 0.3f64..1.0) {
            let g = Hypergraph::generate(GeneratorKind::Binomial { p, seed }, n, 3).unwrap();
            let prof = g.degree_monotonicity_profile();
            for w in prof.windows(2) {
                prop_assert!(w[0] + 1e-12 >= w[1]);
            }
            let m = [0u32, (n - 1) as u32];
            let r = g.remove_vertices(&m);
            let expect = g.edges().filter(|e| !e.contains(&0) && !e.contains(&((n - 1) as u32))).count();
            prop_assert_eq!(r.graph.num_edges(), expect);
            for e in r.graph.edges() {
                let old: Vec<u32> = e.iter().map(|&v| r.new_to_old[v as usize]).collect();
                prop_assert!(g.contains_edge(&old));
            }
        }

        #[test]
        fn codegree_index_exact(seed in any::<u64>(), n in 4usize..9, k in 2usize..4) {
            let g = Hypergraph::generate(GeneratorKind::Binomial { p: 0.6, seed }, n, k).unwrap();
            for_each_combination(n, k - 1, |s| {
                let expect: Vec<u32> = (0..n as u32)
                    .filter(|v| !s.contains(v))
                    .filter(|&v| {
                        let mut e = s.to_vec();
                        e.push(v);
                        e.sort_unstable();
                        g.edges().any(|x| x == e.as_slice())
                    })
                    .collect();
                assert_eq!(g.neighbors(s), expect.as_slice());
            });
        }
    }

    #[test]
    fn appendix_degree_bound_on_dirac_instances() {
        for seed in 0..5 {
            let g = Hypergraph::generate(
                GeneratorKind::DiracRejection { delta: 0.55, p: 0.9, seed, max_tries: 1000 },
                14,
                3,
            )
            .unwrap();
            let delta = g.codegree_ratio();
            for d in 0..3 {
                let bound = delta * 14.0 * binomial(14 - d, 3 - d) as f64 / (14 - 3 + 1) as f64;
                assert!(g.min_d_degree(d) as f64 >= bound - 1e-9);
            }
        }
    }
}
