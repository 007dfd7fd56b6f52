//! Matching repair after vertex removal: rescale onto G − M, then shift weight
//! between edges until every vertex sum is back to 1.

use serde::{Deserialize, Serialize};

use crate::entropy::{certify_normality, FractionalMatching, SolverError};
use crate::hypergraph::{Hypergraph, Induced};
use crate::walk::well_behaved_check;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum SurgeryError {
    #[error("no edge survives the removal")]
    NoSurvivingEdges,
    #[error("vertices {v} and {u} share no (k-1)-set co-neighbor")]
    NoCommonNeighbors { v: u32, u: u32 },
    #[error("edge {edge:?} has no weight left to shift")]
    NegativeWeight { edge: Vec<u32> },
    #[error("total weight {total} does not match n'/k = {expected}")]
    Unbalanced { total: f64, expected: f64 },
    #[error("normalization stalled after {rounds} rounds at total deviation {deviation:.3e}")]
    Stalled { rounds: usize, deviation: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypotheses {
    WellBehaved,
    SmallSet,
    Unverified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryReport {
    pub lambda: f64,
    pub shift_count: usize,
    /// max |x′_v − 1| before shifting.
    pub max_deviation: f64,
    pub b_star_out: f64,
    pub entropy_in: f64,
    pub entropy_out: f64,
    pub entropy_floor: Option<f64>,
    pub floor_met: Option<bool>,
    pub predicted_b: Option<f64>,
    pub hypotheses: Option<Hypotheses>,
    /// Largest change of total weight caused by a single round.
    pub max_conservation_error: f64,
    /// Rounds whose entropy loss exceeded 4·d·log2 max(b′, 4).
    pub entropy_loss_violations: usize,
    /// Rounds where d had to be cut to keep weights nonnegative.
    pub negative_weight_events: Vec<Vec<u32>>,
    pub warnings: Vec<String>,
}

/// x′ = Λ·x restricted to G − M.
#[derive(Debug, Clone)]
pub struct Scaled {
    pub induced: Induced,
    pub weights: FractionalMatching,
    pub lambda: f64,
}

pub fn scale_restrict(g: &Hypergraph, x: &FractionalMatching, m: &[u32]) -> Result<Scaled, SurgeryError> {
    let induced = g.remove_vertices(m);
    let gp = &induced.graph;
    if gp.num_edges() == 0 {
        return Err(SurgeryError::NoSurvivingEdges);
    }
    let mut old = vec![0u32; g.k()];
    let surviving: Vec<f64> = gp
        .edges()
        .map(|e| {
            for (o, &v) in old.iter_mut().zip(e) {
                *o = induced.new_to_old[v as usize];
            }
            x.weights[g.edge_id(&old).expect("induced edge exists in G")]
        })
        .collect();
    let total: f64 = surviving.iter().sum();
    let lambda = (gp.n() as f64 / g.k() as f64) / total;
    let weights = FractionalMatching::new(gp, surviving.iter().map(|w| w * lambda).collect())?;
    Ok(Scaled { induced, weights, lambda })
}

fn b_star_of(w: &[f64], scale: f64) -> f64 {
    w.iter()
        .map(|&v| {
            let r = v * scale;
            if r > 0.0 { r.max(1.0 / r) } else { f64::INFINITY }
        })
        .fold(1.0, f64::max)
}

fn h(w: f64) -> f64 {
    if w > 0.0 {
        -w * w.log2()
    } else {
        0.0
    }
}

/// Moves weight from the edges S∪{v} to S∪{u} over all common co-neighbors S
/// until every vertex sum is within `tol` of 1.
pub fn normalization_procedure(
    g: &Hypergraph,
    x: &FractionalMatching,
    tol: f64,
) -> Result<(FractionalMatching, SurgeryReport), SurgeryError> {
    let n = g.n();
    let k = g.k();
    let expected = n as f64 / k as f64;
    let total = x.total();
    if (total - expected).abs() > tol.max(1e-12 * expected) * n as f64 {
        return Err(SurgeryError::Unbalanced { total, expected });
    }
    let mut w = x.weights.clone();
    let mut sums = x.vertex_sums.clone();
    let max_deviation = x.max_residual();
    let entropy_in = x.entropy();
    let mut report = SurgeryReport {
        lambda: 1.0,
        shift_count: 0,
        max_deviation,
        b_star_out: 0.0,
        entropy_in,
        entropy_out: entropy_in,
        entropy_floor: None,
        floor_met: None,
        predicted_b: None,
        hypotheses: None,
        max_conservation_error: 0.0,
        entropy_loss_violations: 0,
        negative_weight_events: Vec::new(),
        warnings: Vec::new(),
    };
    let total_dev = |s: &[f64]| s.iter().map(|v| (v - 1.0).abs()).sum::<f64>();
    let mut best = total_dev(&sums);
    let mut last_progress = 0usize;
    let scale = (n as f64).powi(k as i32 - 1);
    let mut sub = vec![0u32; k];

    loop {
        let mut v = None;
        let mut u = None;
        for (i, &s) in sums.iter().enumerate() {
            let d = s - 1.0;
            if d > tol && v.is_none_or(|j: usize| d > sums[j] - 1.0) {
                v = Some(i);
            }
            if d < -tol && u.is_none_or(|j: usize| d < sums[j] - 1.0) {
                u = Some(i);
            }
        }
        let (v, u) = match (v, u) {
            (None, None) => break,
            (Some(v), Some(u)) => (v as u32, u as u32),
            _ => {
                return Err(SurgeryError::Unbalanced { total: w.iter().sum(), expected });
            }
        };
        let mut gamma = Vec::new();
        for &e in g.incident_edges(v) {
            let edge = g.edge(e as usize);
            if edge.contains(&u) {
                continue;
            }
            for (s, &a) in sub.iter_mut().zip(edge) {
                *s = if a == v { u } else { a };
            }
            if let Some(f) = g.edge_id(&sub) {
                gamma.push((e as usize, f));
            }
        }
        if gamma.is_empty() {
            return Err(SurgeryError::NoCommonNeighbors { v, u });
        }
        let mut d = (sums[v as usize] - 1.0).min(1.0 - sums[u as usize]);
        let nn = gamma.len() as f64;
        let (min_e, min_w) = gamma.iter().map(|&(e, _)| (e, w[e])).fold((usize::MAX, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if d / nn > min_w {
            report.negative_weight_events.push(g.edge(min_e).to_vec());
            if min_w <= 0.0 {
                return Err(SurgeryError::NegativeWeight { edge: g.edge(min_e).to_vec() });
            }
            d = min_w * nn;
        }
        let per = d / nn;
        let before_total: f64 = w.iter().sum();
        let b_now = b_star_of(&w, scale);
        let mut loss = 0.0;
        for &(e, f) in &gamma {
            loss += h(w[e]) + h(w[f]);
            w[e] = (w[e] - per).max(0.0);
            w[f] += per;
            loss -= h(w[e]) + h(w[f]);
            for &a in g.edge(e) {
                sums[a as usize] -= per;
            }
            for &a in g.edge(f) {
                sums[a as usize] += per;
            }
        }
        let after_total: f64 = w.iter().sum();
        report.max_conservation_error = report.max_conservation_error.max((after_total - before_total).abs());
        if loss > 4.0 * d * b_now.max(4.0).log2() + 1e-12 {
            report.entropy_loss_violations += 1;
        }
        report.shift_count += 1;
        let dev = total_dev(&sums);
        if dev <= 0.5 * best {
            best = dev;
            last_progress = report.shift_count;
        } else if report.shift_count - last_progress > 10 * n {
            return Err(SurgeryError::Stalled { rounds: report.shift_count, deviation: dev });
        }
    }
    let z = FractionalMatching::new(g, w)?;
    report.entropy_out = z.entropy();
    report.b_star_out = certify_normality(&z, 1.0).b_star;
    Ok((z, report))
}

/// Result of removing M and repairing the matching on G − M.
#[derive(Debug, Clone)]
pub struct Repaired {
    pub induced: Induced,
    pub z: FractionalMatching,
    pub report: SurgeryReport,
}

/// (n′/n)h(x) − ((k−1)/k)n′ log2(n/n′) − n^{1/3−α/2}.
pub fn entropy_floor(n: usize, n_prime: usize, k: usize, h: f64, alpha: f64) -> f64 {
    let (nf, np) = (n as f64, n_prime as f64);
    np / nf * h - (k - 1) as f64 / k as f64 * np * (nf / np).log2() - nf.powf(1.0 / 3.0 - alpha / 2.0)
}

pub fn remove_and_repair(
    g: &Hypergraph,
    x: &FractionalMatching,
    m: &[u32],
    alpha: f64,
    tol: f64,
) -> Result<Repaired, SurgeryError> {
    let n = g.n();
    let nf = n as f64;
    let hyp = if well_behaved_check(g, x, m, alpha).pass {
        Hypotheses::WellBehaved
    } else if (m.len() as f64) <= nf / nf.log2().powi(2) {
        Hypotheses::SmallSet
    } else {
        Hypotheses::Unverified
    };
    let scaled = scale_restrict(g, x, m)?;
    let (z, mut report) = normalization_procedure(&scaled.induced.graph, &scaled.weights, tol)?;
    let h_in = x.entropy();
    let floor = entropy_floor(n, scaled.induced.graph.n(), g.k(), h_in, alpha);
    report.lambda = scaled.lambda;
    report.entropy_in = h_in;
    report.entropy_floor = Some(floor);
    report.floor_met = Some(report.entropy_out >= floor);
    report.predicted_b = Some((1.0 + nf.powf(-2.0 / 3.0 - alpha / 2.0)) * certify_normality(x, 1.0).b_star);
    report.hypotheses = Some(hyp);
    if hyp == Hypotheses::Unverified {
        report.warnings.push("HypothesesUnverified: removal set is neither well-behaved nor small".into());
    }
    Ok(Repaired { induced: scaled.induced, z, report })
}
