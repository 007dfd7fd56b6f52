//! Hamilton-cycle sampler: reserve an absorption set U, grow a long tight path in
//! G − U stage by stage from random walks, then close it through U by exact search.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::hamilton_path_search;
use crate::entropy::{max_entropy_pfm, FractionalMatching, SolverError, SolverOptions};
use crate::hypergraph::Hypergraph;
use crate::math::for_each_combination;
use crate::surgery::{remove_and_repair, SurgeryError, SurgeryReport};
use crate::walk::{all_distinct, sample_walk, well_behaved_check, TupleKernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkGate {
    /// Accept any self-avoiding walk; well-behavedness is measured and logged.
    SelfAvoiding,
    /// Accept only walks whose vertex set is well-behaved.
    WellBehaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchingMode {
    /// Solve the max-entropy matching afresh on every G_i.
    Resolve,
    /// Carry the matching forward through remove-and-repair.
    Repair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub alpha: f64,
    pub beta: f64,
    /// |U| = ⌈n^e⌉; defaults to 1 − β/2.
    pub absorb_exponent: Option<f64>,
    /// δ̂ in the absorption condition; defaults to the measured δ_{k−1}(G)/n − 1/2.
    pub absorb_delta_hat: Option<f64>,
    pub absorb_max_tries: usize,
    pub max_resamples: usize,
    pub seed: u64,
    pub tol: f64,
    pub gate: WalkGate,
    pub matching: MatchingMode,
    pub closure_budget: u64,
    pub max_n: usize,
    pub allow_large: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            alpha: 0.1,
            beta: 0.3,
            absorb_exponent: None,
            absorb_delta_hat: None,
            absorb_max_tries: 100,
            max_resamples: 50,
            seed: 0,
            tol: 1e-10,
            gate: WalkGate::SelfAvoiding,
            matching: MatchingMode::Resolve,
            closure_budget: 20_000_000,
            max_n: 120,
            allow_large: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(PipelineError::InvalidConfig(format!("beta = {} outside (0, 1)", self.beta)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0 / 3.0) {
            return Err(PipelineError::InvalidConfig(format!("alpha = {} outside (0, 1/3)", self.alpha)));
        }
        if let Some(e) = self.absorb_exponent {
            if !(e > 0.0 && e < 1.0) {
                return Err(PipelineError::InvalidConfig(format!("absorb_exponent = {e} outside (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn absorb_size(&self, n: usize) -> usize {
        let e = self.absorb_exponent.unwrap_or(1.0 - self.beta / 2.0);
        ((n as f64).powf(e).ceil() as usize).min(n)
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("not Dirac: min codegree {codegree} is not above n/2 = {half}")]
    NotDirac { codegree: usize, half: f64 },
    #[error("n = {n} exceeds the desk-scale guard {max}")]
    DeskScaleExceeded { n: usize, max: usize },
    #[error("no absorption set passed after {tries} tries (best worst-case ratio {best_ratio:.3}, needed {needed:.3})")]
    AbsorptionExhausted { tries: usize, best_ratio: f64, needed: f64 },
    #[error("stage {stage}: no acceptable walk in {attempts} attempts")]
    StageExhausted { stage: usize, attempts: usize },
    #[error("stage {stage}: {source}")]
    Solver { stage: usize, source: SolverError },
    #[error("stage {stage}: {source}")]
    Surgery { stage: usize, source: SurgeryError },
    #[error("closure failed on G'' (n = {n}, min codegree {min_codegree}): {reason}")]
    ClosureFailed { n: usize, min_codegree: usize, reason: String },
}

impl PipelineError {
    /// Short class name for tallies.
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::InvalidConfig(_) => "InvalidConfig",
            PipelineError::NotDirac { .. } => "NotDirac",
            PipelineError::DeskScaleExceeded { .. } => "DeskScaleExceeded",
            PipelineError::AbsorptionExhausted { .. } => "AbsorptionExhausted",
            PipelineError::StageExhausted { .. } => "StageExhausted",
            PipelineError::Solver { .. } => "Solver",
            PipelineError::Surgery { .. } => "Surgery",
            PipelineError::ClosureFailed { .. } => "ClosureFailed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub n_i: usize,
    pub m_i: usize,
    pub resamples: usize,
    /// P_i in original vertex ids.
    pub path: Vec<u32>,
    pub entropy: f64,
    pub well_behaved: bool,
    pub well_behaved_slack: [f64; 3],
    /// δ_{k−1}(G_{i+1}) after removing P_i.
    pub min_codegree_after: usize,
    pub dirac_half_after: bool,
    pub surgery: Option<SurgeryReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongPath {
    /// Q in original vertex ids, starting with S⃗ and ending with T⃗.
    pub path: Vec<u32>,
    pub stages: Vec<StageRecord>,
    /// Vertices of G′ that Q does not cover, original ids.
    pub leftover: Vec<u32>,
    /// κ ≤ n′/⌊n_κ^{1/3}⌋.
    pub stage_count_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonCertificate {
    pub cycle: Vec<u32>,
    pub seed: u64,
    pub absorption_set: Vec<u32>,
    pub stage_log: Vec<StageRecord>,
    pub closure_nodes: u64,
    pub closure_size: usize,
    pub validity: bool,
}

impl HamiltonCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Independent audit: a permutation of V(G) whose cyclic k-windows are all edges.
pub fn validate_cycle(g: &Hypergraph, cycle: &[u32]) -> bool {
    let n = g.n();
    let k = g.k();
    if cycle.len() != n || n <= k {
        return false;
    }
    let distinct: BTreeSet<u32> = cycle.iter().copied().collect();
    if distinct.len() != n || distinct.iter().any(|&v| v as usize >= n) {
        return false;
    }
    let edges: BTreeSet<Vec<u32>> = g.edge_list().into_iter().collect();
    (0..n).all(|i| {
        let mut w: Vec<u32> = (0..k).map(|j| cycle[(i + j) % n]).collect();
        w.sort_unstable();
        edges.contains(&w)
    })
}

/// (k−1)-subset scan of min |N(S) ∩ U| / |U|.
fn absorption_ratio(g: &Hypergraph, in_u: &[bool], size: usize) -> f64 {
    let mut worst = f64::INFINITY;
    for_each_combination(g.n(), g.k() - 1, |s| {
        let hits = g.neighbors(s).iter().filter(|&&v| in_u[v as usize]).count();
        worst = worst.min(hits as f64 / size as f64);
    });
    worst
}

/// Rejection-samples a uniform U of `size` vertices with
/// |N(S) ∩ U| ≥ (1/2 + 3δ̂/4)|U| for every (k−1)-set S.
pub fn select_absorption_set(
    g: &Hypergraph,
    delta_hat: f64,
    size: usize,
    seed: u64,
    max_tries: usize,
) -> Result<Vec<u32>, PipelineError> {
    if size > g.n() {
        return Err(PipelineError::InvalidConfig(format!("absorption size {size} > n = {}", g.n())));
    }
    let needed = 0.5 + 0.75 * delta_hat;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut all: Vec<u32> = (0..g.n() as u32).collect();
    for _ in 0..max_tries {
        // partial Fisher-Yates
        for i in 0..size {
            let j = rng.gen_range(i..all.len());
            all.swap(i, j);
        }
        let mut u = all[..size].to_vec();
        u.sort_unstable();
        let mut in_u = vec![false; g.n()];
        for &v in &u {
            in_u[v as usize] = true;
        }
        let r = if size == 0 { f64::INFINITY } else { absorption_ratio(g, &in_u, size) };
        if r >= needed - 1e-12 {
            return Ok(u);
        }
        best = best.max(r);
    }
    Err(PipelineError::AbsorptionExhausted { tries: max_tries, best_ratio: best, needed })
}

fn solve(g: &Hypergraph, stage: usize, tol: f64) -> Result<FractionalMatching, PipelineError> {
    max_entropy_pfm(g, SolverOptions { tol, ..SolverOptions::default() })
        .map(|(x, _)| x)
        .map_err(|source| PipelineError::Solver { stage, source })
}

/// Builds Q in `g` restricted to `alive` (original ids): at stage i walk m_i = ⌊n_i^{1/3}⌋
/// steps, keep the first m_i vertices as P_i, continue from the last k−1.
pub fn build_long_path(g: &Hypergraph, alive: &[u32], cfg: &PipelineConfig, rng: &mut ChaCha8Rng) -> Result<LongPath, PipelineError> {
    let k = g.k();
    let n0 = alive.len();
    let stop = (n0 as f64).powf(1.0 - cfg.beta);
    let mut current = g.induced_on(alive);
    let mut x = solve(&current.graph, 0, cfg.tol)?;
    // start tuple, in current ids
    let mut start = crate::walk::random_start_tuple(&current.graph, rng.gen());
    let mut path: Vec<u32> = Vec::new();
    let mut stages = Vec::new();
    let mut stage = 0;
    while (current.graph.n() as f64) > stop && current.graph.n() > 2 * k {
        let gi = &current.graph;
        let n_i = gi.n();
        let m_i = ((n_i as f64).cbrt().floor() as usize).max(1);
        let kernel = TupleKernel { g: gi, x: &x };
        let mut chosen = None;
        let mut resamples = 0;
        for attempt in 0..=cfg.max_resamples {
            let seed: u64 = rng.gen();
            resamples = attempt;
            let Ok(w) = sample_walk(&kernel, &start, m_i, seed) else {
                continue;
            };
            if !w.self_avoiding {
                continue;
            }
            let lead = &w.vertices[..m_i];
            let wb = well_behaved_check(gi, &x, lead, cfg.alpha);
            if cfg.gate == WalkGate::WellBehaved && !wb.pass {
                continue;
            }
            chosen = Some((w, wb));
            break;
        }
        let Some((w, wb)) = chosen else {
            return Err(PipelineError::StageExhausted { stage, attempts: cfg.max_resamples + 1 });
        };
        let lead: Vec<u32> = w.vertices[..m_i].to_vec();
        let tail: Vec<u32> = w.vertices[m_i..].to_vec();
        let entropy = x.entropy();
        let surgery = match cfg.matching {
            MatchingMode::Repair => {
                let r = remove_and_repair(gi, &x, &lead, cfg.alpha, cfg.tol)
                    .map_err(|source| PipelineError::Surgery { stage, source })?;
                x = r.z;
                Some(r.report)
            }
            MatchingMode::Resolve => None,
        };
        let next = gi.remove_vertices(&lead);
        if cfg.matching == MatchingMode::Resolve {
            x = solve(&next.graph, stage + 1, cfg.tol)?;
        }
        path.extend(lead.iter().map(|&v| current.new_to_old[v as usize]));
        let codeg = next.graph.min_codegree();
        stages.push(StageRecord {
            stage,
            n_i,
            m_i,
            resamples,
            path: lead.iter().map(|&v| current.new_to_old[v as usize]).collect(),
            entropy,
            well_behaved: wb.pass,
            well_behaved_slack: wb.slack,
            min_codegree_after: codeg,
            dirac_half_after: 2 * codeg > next.graph.n(),
            surgery,
        });
        start = tail.iter().map(|&v| next.old_to_new[v as usize].expect("tail survives")).collect();
        // compose id maps so that new_to_old points at g
        let new_to_old: Vec<u32> = next.new_to_old.iter().map(|&v| current.new_to_old[v as usize]).collect();
        current = crate::hypergraph::Induced {
            old_to_new: {
                let mut m = vec![None; g.n()];
                for (i, &v) in new_to_old.iter().enumerate() {
                    m[v as usize] = Some(i as u32);
                }
                m
            },
            new_to_old,
            graph: next.graph,
        };
        stage += 1;
    }
    path.extend(start.iter().map(|&v| current.new_to_old[v as usize]));
    let in_path: BTreeSet<u32> = path.iter().copied().collect();
    let leftover = alive.iter().copied().filter(|v| !in_path.contains(v)).collect();
    let m_last = ((current.graph.n() as f64).cbrt().floor() as usize).max(1);
    let stage_count_ok = stages.len() <= n0 / m_last;
    Ok(LongPath { path, stages, leftover, stage_count_ok })
}

/// Closes Q into a Hamilton cycle of G with a tight path from T⃗ to S⃗ through
/// G″ = G[leftover ∪ U ∪ S ∪ T].
pub fn close_cycle(g: &Hypergraph, q: &LongPath, u: &[u32], budget: u64) -> Result<(Vec<u32>, u64, usize), PipelineError> {
    let k = g.k();
    if q.path.len() < 2 * (k - 1) {
        return Err(PipelineError::ClosureFailed {
            n: g.n(),
            min_codegree: g.min_codegree(),
            reason: format!("long path has {} < 2(k-1) vertices", q.path.len()),
        });
    }
    let s = &q.path[..k - 1];
    let t = &q.path[q.path.len() - (k - 1)..];
    let keep: BTreeSet<u32> = q.leftover.iter().chain(u).chain(s).chain(t).copied().collect();
    let keep: Vec<u32> = keep.into_iter().collect();
    let sub = g.induced_on(&keep);
    let map = |tup: &[u32]| -> Vec<u32> { tup.iter().map(|&v| sub.old_to_new[v as usize].expect("kept")).collect() };
    let closure_fail = |reason: String| PipelineError::ClosureFailed {
        n: sub.graph.n(),
        min_codegree: sub.graph.min_codegree(),
        reason,
    };
    let (p, nodes) = hamilton_path_search(&sub.graph, &map(t), &map(s), Some(budget)).map_err(|e| closure_fail(e.to_string()))?;
    let mut cycle = q.path.clone();
    cycle.extend(p[k - 1..p.len() - (k - 1)].iter().map(|&v| sub.new_to_old[v as usize]));
    Ok((cycle, nodes, sub.graph.n()))
}

/// Full sampler: U, then Q in G − U, then closure.
pub fn sample_hamilton_cycle(g: &Hypergraph, cfg: &PipelineConfig) -> Result<HamiltonCertificate, PipelineError> {
    cfg.validate()?;
    let n = g.n();
    if n > cfg.max_n && !cfg.allow_large {
        return Err(PipelineError::DeskScaleExceeded { n, max: cfg.max_n });
    }
    if !g.is_dirac_above_half() {
        return Err(PipelineError::NotDirac { codegree: g.min_codegree(), half: n as f64 / 2.0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let delta_hat = cfg.absorb_delta_hat.unwrap_or(g.codegree_ratio() - 0.5);
    let u = select_absorption_set(g, delta_hat, cfg.absorb_size(n), rng.gen(), cfg.absorb_max_tries)?;
    let in_u: BTreeSet<u32> = u.iter().copied().collect();
    let alive: Vec<u32> = (0..n as u32).filter(|v| !in_u.contains(v)).collect();
    let q = build_long_path(g, &alive, cfg, &mut rng)?;
    let (cycle, closure_nodes, closure_size) = close_cycle(g, &q, &u, cfg.closure_budget)?;
    let validity = validate_cycle(g, &cycle);
    Ok(HamiltonCertificate {
        cycle,
        seed: cfg.seed,
        absorption_set: u,
        stage_log: q.stages,
        closure_nodes,
        closure_size,
        validity,
    })
}

/// Rotation/reflection-invariant form of a cycle, for dedup.
pub fn canonical_cycle(cycle: &[u32]) -> Vec<u32> {
    let n = cycle.len();
    let Some(i0) = cycle.iter().position(|&v| v == 0) else {
        return cycle.to_vec();
    };
    let fwd: Vec<u32> = (0..n).map(|j| cycle[(i0 + j) % n]).collect();
    let bwd: Vec<u32> = (0..n).map(|j| cycle[(i0 + n - j) % n]).collect();
    fwd.min(bwd)
}

pub fn is_tight_path(g: &Hypergraph, p: &[u32]) -> bool {
    all_distinct(p)
        && p.windows(g.k()).all(|w| {
            let mut s = w.to_vec();
            s.sort_unstable();
            g.contains_edge(&s)
        })
}
