//! Maximum-entropy perfect fractional matchings and the identities they satisfy.
//!
//! The optimum has the exponential-family form x_e = exp(Σ_{v∈e} λ_v − 1), so the
//! solver works on the convex dual g(λ) = Σ_e exp(Σ_{v∈e} λ_v − 1) − Σ_v λ_v.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::hypergraph::{for_each_subset, Hypergraph};
use crate::math::{factorial_u64, log2_binomial};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum SolverError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("no perfect fractional matching: {reason} (|lambda|_inf = {lambda_norm:.3e}, bound {bound:.3e}, residual {residual:.3e}; heuristic divergence guard)")]
    Infeasible { reason: String, lambda_norm: f64, bound: f64, residual: f64 },
    #[error("not converged after {iterations} iterations, residual {residual:.3e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("weight vector has {got} entries, graph has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("matching file: {0}")]
    File(String),
}

/// Edge weighting aligned with the edge ids of a [`Hypergraph`], with cached vertex sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalMatching {
    pub n: usize,
    pub k: usize,
    pub weights: Vec<f64>,
    pub vertex_sums: Vec<f64>,
}

impl FractionalMatching {
    pub fn new(g: &Hypergraph, weights: Vec<f64>) -> Result<Self, SolverError> {
        if weights.len() != g.num_edges() {
            return Err(SolverError::LengthMismatch { expected: g.num_edges(), got: weights.len() });
        }
        let mut vertex_sums = vec![0.0; g.n()];
        for (e, &w) in g.edges().zip(&weights) {
            for &v in e {
                vertex_sums[v as usize] += w;
            }
        }
        Ok(FractionalMatching { n: g.n(), k: g.k(), weights, vertex_sums })
    }

    pub fn uniform(g: &Hypergraph, w: f64) -> Self {
        Self::new(g, vec![w; g.num_edges()]).expect("length matches")
    }

    pub fn max_residual(&self) -> f64 {
        self.vertex_sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn is_perfect(&self, tol: f64) -> bool {
        self.weights.iter().all(|&w| w >= 0.0) && self.max_residual() <= tol
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// h(x) in bits.
    pub fn entropy(&self) -> f64 {
        entropy(&self.weights)
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Lower bound (n/k)·log2(n/(L²k|E|)) with L the largest weight.
    pub fn max_weight_entropy_bound(&self) -> f64 {
        let l = self.max_weight();
        let m = self.weights.len() as f64;
        (self.n as f64 / self.k as f64) * (self.n as f64 / (l * l * self.k as f64 * m)).log2()
    }

    pub fn to_text(&self, g: &Hypergraph) -> String {
        let mut out = String::new();
        for (e, w) in g.edges().zip(&self.weights) {
            for v in e {
                write!(out, "{v} ").unwrap();
            }
            writeln!(out, "{w:.16e}").unwrap();
        }
        out
    }

    pub fn from_text(g: &Hypergraph, text: &str) -> Result<Self, SolverError> {
        let mut weights = vec![0.0; g.num_edges()];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = |m: &str| SolverError::File(format!("line {}: {m}", i + 1));
            if parts.len() != g.k() + 1 {
                return Err(bad("expected k vertices and a weight"));
            }
            let verts: Result<Vec<u32>, _> = parts[..g.k()].iter().map(|p| p.parse::<u32>()).collect();
            let verts = verts.map_err(|e| bad(&e.to_string()))?;
            let w: f64 = parts[g.k()].parse().map_err(|e: std::num::ParseFloatError| bad(&e.to_string()))?;
            let id = g.edge_id(&verts).ok_or_else(|| bad("not an edge of the graph"))?;
            weights[id] = w;
        }
        Self::new(g, weights)
    }

    pub fn write_file(&self, g: &Hypergraph, path: &Path) -> Result<(), SolverError> {
        std::fs::write(path, self.to_text(g)).map_err(|e| SolverError::File(format!("{}: {e}", path.display())))
    }

    pub fn read_file(g: &Hypergraph, path: &Path) -> Result<Self, SolverError> {
        let text = std::fs::read_to_string(path).map_err(|e| SolverError::File(format!("{}: {e}", path.display())))?;
        Self::from_text(g, &text)
    }
}

/// Σ w log2(1/w) with 0·log 0 = 0.
pub fn entropy(weights: &[f64]) -> f64 {
    weights.iter().filter(|&&w| w > 0.0).map(|&w| -w * w.log2()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualPotentials {
    pub lambda: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub newton_steps: usize,
    pub sinkhorn_sweeps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iters: 10_000 }
    }
}

struct Dual<'a> {
    g: &'a Hypergraph,
    k: usize,
}

impl Dual<'_> {
    fn sums(&self, lambda: &[f64]) -> Vec<f64> {
        self.g.edges().map(|e| e.iter().map(|&v| lambda[v as usize]).sum::<f64>() - 1.0).collect()
    }

    /// g(λ) given the edge exponents.
    fn value(&self, lambda: &[f64], s: &[f64]) -> f64 {
        s.iter().map(|&t| t.exp()).sum::<f64>() - lambda.iter().sum::<f64>()
    }

    fn residual(&self, x: &[f64], n: usize) -> Vec<f64> {
        let mut r = vec![-1.0; n];
        for (e, &w) in self.g.edges().zip(x) {
            for &v in e {
                r[v as usize] += w;
            }
        }
        r
    }

    fn newton_direction(&self, x: &[f64], r: &[f64]) -> Option<Vec<f64>> {
        let n = r.len();
        let mut h = DMatrix::<f64>::zeros(n, n);
        for (e, &w) in self.g.edges().zip(x) {
            for a in 0..self.k {
                for b in 0..self.k {
                    h[(e[a] as usize, e[b] as usize)] += w;
                }
            }
        }
        let scale = (0..n).map(|i| h[(i, i)]).fold(0.0, f64::max);
        for i in 0..n {
            h[(i, i)] += 1e-12 * (1.0 + scale);
        }
        let chol = h.cholesky()?;
        let rhs = DVector::from_iterator(n, r.iter().map(|v| -v));
        let d = chol.solve(&rhs);
        d.iter().all(|v| v.is_finite()).then(|| d.iter().copied().collect())
    }
}

/// Maximum-entropy perfect fractional matching by damped Newton on the dual, with
/// per-vertex coordinate (Sinkhorn) sweeps whenever a Newton step fails.
pub fn max_entropy_pfm(
    g: &Hypergraph,
    opts: SolverOptions,
) -> Result<(FractionalMatching, DualPotentials), SolverError> {
    let n = g.n();
    let k = g.k();
    let m = g.num_edges();
    if m == 0 {
        return Err(SolverError::EmptyGraph);
    }
    let bound = 50.0 * k as f64 * (n as f64).ln();
    if let Some(v) = (0..n as u32).find(|&v| g.degree(v) == 0) {
        return Err(SolverError::Infeasible {
            reason: format!("vertex {v} lies in no edge"),
            lambda_norm: f64::INFINITY,
            bound,
            residual: 1.0,
        });
    }
    let dual = Dual { g, k };
    let start = (1.0 + ((n as f64 / k as f64) / m as f64).ln()) / k as f64;
    let mut lambda = vec![start; n];
    let mut newton_steps = 0;
    let mut sinkhorn_sweeps = 0;
    let mut best_residual = f64::INFINITY;
    let mut stall = 0usize;

    for iter in 0..opts.max_iters {
        let s = dual.sums(&lambda);
        let x: Vec<f64> = s.iter().map(|t| t.exp()).collect();
        let r = dual.residual(&x, n);
        let res = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if res <= opts.tol {
            let fm = FractionalMatching::new(g, x)?;
            let pot = DualPotentials { lambda, residual_norm: res, iterations: iter, newton_steps, sinkhorn_sweeps };
            return Ok((fm, pot));
        }
        if res < 0.5 * best_residual {
            best_residual = res;
            stall = 0;
        } else {
            stall += 1;
        }
        let lambda_norm = lambda.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !res.is_finite() || (lambda_norm > bound && stall > 5) {
            return Err(SolverError::Infeasible {
                reason: "dual potentials diverge".into(),
                lambda_norm,
                bound,
                residual: res,
            });
        }

        let mut stepped = false;
        if let Some(d) = dual.newton_direction(&x, &r) {
            let g0 = dual.value(&lambda, &s);
            let slope: f64 = r.iter().zip(&d).map(|(a, b)| a * b).sum();
            if slope < 0.0 {
                let mut t = 1.0;
                for _ in 0..40 {
                    let trial: Vec<f64> = lambda.iter().zip(&d).map(|(l, dd)| l + t * dd).collect();
                    let st = dual.sums(&trial);
                    if st.iter().all(|&v| v < 700.0) {
                        let gt = dual.value(&trial, &st);
                        if gt <= g0 + 1e-4 * t * slope + 1e-13 * g0.abs().max(1.0) {
                            lambda = trial;
                            stepped = true;
                            break;
                        }
                    }
                    t *= 0.5;
                }
            }
        }
        if stepped {
            newton_steps += 1;
        } else {
            sinkhorn_sweep(g, &mut lambda);
            sinkhorn_sweeps += 1;
        }
    }
    let s = dual.sums(&lambda);
    let x: Vec<f64> = s.iter().map(|t| t.exp()).collect();
    let res = dual.residual(&x, n).iter().map(|v| v.abs()).fold(0.0, f64::max);
    Err(SolverError::NotConverged { iterations: opts.max_iters, residual: res })
}

/// One pass of exact coordinate minimization of the dual over each λ_v.
fn sinkhorn_sweep(g: &Hypergraph, lambda: &mut [f64]) {
    let mut s: Vec<f64> = g.edges().map(|e| e.iter().map(|&v| lambda[v as usize]).sum::<f64>() - 1.0).collect();
    for v in 0..g.n() {
        let inc = g.incident_edges(v as u32);
        let total: f64 = inc.iter().map(|&e| s[e as usize].exp()).sum();
        let shift = -total.ln();
        if !shift.is_finite() {
            continue;
        }
        lambda[v] += shift;
        for &e in inc {
            s[e as usize] += shift;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityCert {
    pub b: f64,
    pub holds: bool,
    pub witness_edge: Option<usize>,
    pub b_star: f64,
}

/// Checks 1/(b n^{k−1}) ≤ x_e ≤ b/n^{k−1} and finds the minimal such b.
pub fn certify_normality(x: &FractionalMatching, b: f64) -> NormalityCert {
    let scale = (x.n as f64).powi(x.k as i32 - 1);
    let mut worst = 0.0;
    let mut witness = None;
    for (i, &w) in x.weights.iter().enumerate() {
        let r = w * scale;
        let ratio = if r > 0.0 { r.max(1.0 / r) } else { f64::INFINITY };
        if witness.is_none() || ratio > worst {
            worst = ratio;
            witness = Some(i);
        }
    }
    let b_star = worst.max(1.0);
    NormalityCert { b, holds: witness.is_some() && b_star <= b, witness_edge: witness, b_star }
}

/// x_S: total weight of the edges containing S.
pub fn subset_weight(g: &Hypergraph, x: &FractionalMatching, s: &[u32]) -> f64 {
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    match sorted.len() {
        0 => x.total(),
        l if l == g.k() => g.edge_id(&sorted).map_or(0.0, |id| x.weights[id]),
        l if l + 1 == g.k() => g.neighbor_edges(&sorted).iter().map(|&e| x.weights[e as usize]).sum(),
        l if l > g.k() => 0.0,
        _ => g
            .incident_edges(sorted[0])
            .iter()
            .filter(|&&e| sorted.iter().all(|v| g.edge(e as usize).contains(v)))
            .map(|&e| x.weights[e as usize])
            .sum(),
    }
}

/// Entropy in bits of the outgoing law y[S→v] = x_{S∪v}/x_S for a (k−1)-set S.
pub fn pair_entropy(g: &Hypergraph, x: &FractionalMatching, sorted: &[u32]) -> Option<f64> {
    let ids = g.neighbor_edges(sorted);
    let xs: f64 = ids.iter().map(|&e| x.weights[e as usize]).sum();
    if xs <= 0.0 {
        return None;
    }
    Some(ids.iter().map(|&e| x.weights[e as usize] / xs).filter(|&y| y > 0.0).map(|y| -y * y.log2()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllIdentities {
    pub ell: usize,
    /// |Σ_{|S|=ℓ} x_S − C(k,ℓ)·n/k|
    pub total: f64,
    /// max_v |Σ_{S∋v} x_S − C(k−1,ℓ−1)|
    pub vertex: f64,
    /// ℓ-entropy identity residual.
    pub entropy_identity: f64,
    /// Largest violation of δ/(k^k b n^{ℓ−1}) ≤ x_S ≤ b/n^{ℓ−1}.
    pub subset_bound_violation: f64,
    /// Largest violation of the ordered-edge transition bounds.
    pub transition_bound_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub b_star: f64,
    pub delta: f64,
    /// |Σ x_e − n/k|
    pub total_weight: f64,
    /// |Σ_S x_S − n| over (k−1)-sets
    pub pair_total: f64,
    /// max_v |Σ_{S∋v} x_S − (k−1)|
    pub vertex_pair_total: f64,
    /// |Σ x_S h_x(S) − k h(x) − Σ x_S log x_S|
    pub entropy_identity: f64,
    /// Σ x_S h_x(S) − (k h − n log C(n,k−1) + n log n), nonnegative when the inequality holds.
    pub entropy_inequality_slack: f64,
    /// Largest violation of δ/(b n^{k−2}) ≤ x_S ≤ b/n^{k−2}.
    pub pair_bound_violation: f64,
    /// Largest violation of 1/(b²n) ≤ y ≤ b²/(δn).
    pub transition_bound_violation: f64,
    pub ell: Vec<EllIdentities>,
}

impl IdentityReport {
    pub fn max_equality_residual(&self) -> f64 {
        let mut r = self.total_weight.max(self.pair_total).max(self.vertex_pair_total).max(self.entropy_identity);
        for e in &self.ell {
            r = r.max(e.total).max(e.vertex).max(e.entropy_identity);
        }
        r
    }

    pub fn inequalities_hold(&self) -> bool {
        self.pair_bound_violation == 0.0 && self.transition_bound_violation == 0.0
    }
}

fn violation(value: f64, lo: f64, hi: f64) -> f64 {
    let rel = 1e-12 * value.abs().max(1e-300);
    if value < lo - rel {
        lo - value
    } else if value > hi + rel {
        value - hi
    } else {
        0.0
    }
}

/// Evaluates the matching identities and the normality-derived inequalities.
pub fn verify_identities(g: &Hypergraph, x: &FractionalMatching) -> IdentityReport {
    let n = g.n();
    let k = g.k();
    let nf = n as f64;
    let h = x.entropy();
    let b = certify_normality(x, 1.0).b_star;
    let delta = g.codegree_ratio();

    let mut pair_sum = 0.0;
    let mut per_vertex = vec![0.0; n];
    let mut lhs = 0.0;
    let mut xs_log = 0.0;
    let mut pair_viol: f64 = 0.0;
    let mut y_viol: f64 = 0.0;
    let lo_s = delta / (b * nf.powi(k as i32 - 2));
    let hi_s = b / nf.powi(k as i32 - 2);
    let lo_y = 1.0 / (b * b * nf);
    let hi_y = b * b / (delta * nf);
    for i in 0..g.num_slots() {
        let (set, _, ids) = g.slot_entry(i);
        let xs: f64 = ids.iter().map(|&e| x.weights[e as usize]).sum();
        pair_sum += xs;
        for &v in set {
            per_vertex[v as usize] += xs;
        }
        pair_viol = pair_viol.max(violation(xs, lo_s, hi_s));
        if xs > 0.0 {
            xs_log += xs * xs.log2();
            let mut hs = 0.0;
            for &e in ids {
                let y = x.weights[e as usize] / xs;
                if y > 0.0 {
                    hs -= y * y.log2();
                }
                y_viol = y_viol.max(violation(y, lo_y, hi_y));
            }
            lhs += xs * hs;
        }
    }
    if (g.num_slots() as u128) < crate::math::binomial(n, k - 1) {
        pair_viol = pair_viol.max(lo_s);
    }
    let ineq = k as f64 * h - nf * log2_binomial(n, k - 1) + nf * nf.log2();

    let ell = (0..k).map(|l| ell_identities(g, x, l, h, b, delta)).collect();
    IdentityReport {
        b_star: b,
        delta,
        total_weight: (x.total() - nf / k as f64).abs(),
        pair_total: (pair_sum - nf).abs(),
        vertex_pair_total: per_vertex.iter().map(|s| (s - (k - 1) as f64).abs()).fold(0.0, f64::max),
        entropy_identity: (lhs - (k as f64 * h + xs_log)).abs(),
        entropy_inequality_slack: lhs - ineq,
        pair_bound_violation: pair_viol,
        transition_bound_violation: y_viol,
        ell,
    }
}

fn ell_identities(g: &Hypergraph, x: &FractionalMatching, ell: usize, h: f64, b: f64, delta: f64) -> EllIdentities {
    let n = g.n();
    let k = g.k();
    let nf = n as f64;
    // ℓ-set -> (x_S, edges containing it)
    let mut sets: BTreeMap<Vec<u32>, (f64, Vec<u32>)> = BTreeMap::new();
    for (id, e) in g.edges().enumerate() {
        for_each_subset(e, ell, |s| {
            let entry = sets.entry(s.to_vec()).or_insert((0.0, Vec::new()));
            entry.0 += x.weights[id];
            entry.1.push(id as u32);
        });
    }
    let ckl = crate::math::binomial(k, ell) as f64;
    let fact = factorial_u64(k - ell) as f64;
    let kk = (k as f64).powi(k as i32);
    let lo_s = delta / (kk * b * nf.powi(ell as i32 - 1));
    let hi_s = b / nf.powi(ell as i32 - 1);
    let lo_y = 1.0 / (fact * b * b * nf.powi((k - ell) as i32));
    let hi_y = kk * b * b / (fact * delta * nf.powi((k - ell) as i32));

    let mut total = 0.0;
    let mut per_vertex = vec![0.0; n];
    let mut lhs = 0.0;
    let mut fact_term = 0.0;
    let mut xs_log = 0.0;
    let mut s_viol: f64 = 0.0;
    let mut y_viol: f64 = 0.0;
    for (s, (xs, ids)) in &sets {
        total += xs;
        for &v in s {
            per_vertex[v as usize] += xs;
        }
        s_viol = s_viol.max(violation(*xs, lo_s, hi_s));
        if *xs > 0.0 {
            xs_log += xs * xs.log2();
            fact_term += xs * fact.log2();
            let mut hs = 0.0;
            for &e in ids {
                let y = x.weights[e as usize] / xs;
                if y > 0.0 {
                    hs += y * (fact / y).log2();
                }
                y_viol = y_viol.max(violation(y / fact, lo_y, hi_y));
            }
            lhs += xs * hs;
        }
    }
    let expected_vertex = if ell == 0 { 0.0 } else { crate::math::binomial(k - 1, ell - 1) as f64 };
    EllIdentities {
        ell,
        total: (total - ckl * nf / k as f64).abs(),
        vertex: per_vertex.iter().map(|s| (s - expected_vertex).abs()).fold(0.0, f64::max),
        entropy_identity: (lhs - (ckl * h + fact_term + xs_log)).abs(),
        subset_bound_violation: s_viol,
        transition_bound_violation: y_viol,
    }
}

/// Entropy sandwich for a δ-Dirac graph, in bits.
pub fn entropy_sandwich(n: usize, k: usize, delta: f64) -> (f64, f64) {
    let nk = n as f64 / k as f64;
    let lower = nk * log2_binomial(n, k - 1) + nk * delta.log2();
    let upper = (k - 1) as f64 / k as f64 * n as f64 * (n as f64).log2();
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::GeneratorKind;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn solve(g: &Hypergraph) -> FractionalMatching {
        max_entropy_pfm(g, SolverOptions::default()).unwrap().0
    }

    #[test]
    fn complete_graphs_are_uniform() {
        let x = solve(&Hypergraph::complete(6, 3));
        for &w in &x.weights {
            assert_abs_diff_eq!(w, 0.1, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(x.entropy(), 2.0 * 10f64.log2(), epsilon = 1e-9);
        let x = solve(&Hypergraph::complete(4, 2));
        assert_abs_diff_eq!(x.weights[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x.entropy(), 2.0 * 3f64.log2(), epsilon = 1e-9);
    }

    #[test]
    fn isolated_vertex_is_infeasible() {
        let g = Hypergraph::build(5, 2, &[vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]]).unwrap();
        assert!(matches!(max_entropy_pfm(&g, SolverOptions::default()), Err(SolverError::Infeasible { .. })));
    }

    #[test]
    fn star_is_infeasible() {
        let g = Hypergraph::build(4, 2, &[vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        assert!(matches!(max_entropy_pfm(&g, SolverOptions::default()), Err(SolverError::Infeasible { .. })));
    }

    #[test]
    fn entropy_conventions() {
        assert_abs_diff_eq!(entropy(&[0.1; 20]), 6.643856189774724, epsilon = 1e-12);
        assert_eq!(entropy(&[1.0]), 0.0);
        assert_eq!(entropy(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn normality_examples() {
        let g = Hypergraph::complete(6, 3);
        let x = FractionalMatching::uniform(&g, 0.1);
        assert!(certify_normality(&x, 4.0).holds);
        let c = certify_normality(&x, 1.0);
        assert!(!c.holds);
        assert_abs_diff_eq!(c.b_star, 3.6, epsilon = 1e-12);
        let mut w = x.weights.clone();
        w[3] = 0.0;
        let z = FractionalMatching::new(&g, w).unwrap();
        let c = certify_normality(&z, 1e300);
        assert!(!c.holds);
        assert_eq!(c.witness_edge, Some(3));
    }

    #[test]
    fn subset_weights() {
        let g = Hypergraph::complete(6, 3);
        let x = FractionalMatching::uniform(&g, 0.1);
        assert_abs_diff_eq!(subset_weight(&g, &x, &[2, 4]), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(subset_weight(&g, &x, &[]), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(subset_weight(&g, &x, &[0, 1, 2]), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(subset_weight(&g, &x, &[3]), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn identities_on_k6() {
        let g = Hypergraph::complete(6, 3);
        let x = FractionalMatching::uniform(&g, 0.1);
        let r = verify_identities(&g, &x);
        assert!(r.max_equality_residual() <= 1e-12, "{r:?}");
        assert!(r.inequalities_hold());
        let mut w = x.weights.clone();
        w[0] = 0.3;
        let r = verify_identities(&g, &FractionalMatching::new(&g, w).unwrap());
        assert!(r.total_weight > 0.1);
    }

    #[test]
    fn sandwich_examples() {
        let (lo, hi) = entropy_sandwich(6, 3, 2.0 / 3.0);
        assert_abs_diff_eq!(lo, 2.0 * 15f64.log2() + 2.0 * (2.0f64 / 3.0).log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 4.0 * 6f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_sandwich(4, 2, 1.0).1, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(entropy_sandwich(7, 3, 1.0).0, 7.0 / 3.0 * log2_binomial(7, 2), epsilon = 1e-12);
    }

    #[test]
    fn matching_file_round_trip() {
        let g = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.55, p: 0.9, seed: 4, max_tries: 100 }, 10, 3).unwrap();
        let x = solve(&g);
        let back = FractionalMatching::from_text(&g, &x.to_text(&g)).unwrap();
        assert_eq!(back.weights, x.weights);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn solver_invariants(seed in any::<u64>(), n in 9usize..16) {
            let g = Hypergraph::generate(
                GeneratorKind::DiracRejection { delta: 0.52, p: 0.9, seed, max_tries: 1000 }, n, 3,
            ).unwrap();
            let (x, pot) = max_entropy_pfm(&g, SolverOptions::default()).unwrap();
            prop_assert!(pot.residual_norm <= 1e-10);
            for (e, &w) in g.edges().zip(&x.weights) {
                let s: f64 = e.iter().map(|&v| pot.lambda[v as usize]).sum();
                prop_assert!((w - (s - 1.0).exp()).abs() <= 1e-15 * w.max(1e-300) * 10.0);
            }
            let (lo, hi) = entropy_sandwich(n, 3, g.codegree_ratio());
            let h = x.entropy();
            prop_assert!(h >= lo - 1e-9 && h <= hi + 1e-9);
            prop_assert!(h >= x.max_weight_entropy_bound() - 1e-9);

            // relabel by reversing vertex ids
            let rev: Vec<Vec<u32>> = g.edges().map(|e| e.iter().map(|&v| (n as u32 - 1) - v).collect()).collect();
            let g2 = Hypergraph::build(n, 3, &rev).unwrap();
            let (x2, _) = max_entropy_pfm(&g2, SolverOptions::default()).unwrap();
            prop_assert!((x2.entropy() - h).abs() < 1e-8);

            let r = verify_identities(&g, &x);
            prop_assert!(r.max_equality_residual() <= 1e-9);
            prop_assert!(r.inequalities_hold());
            prop_assert!(r.entropy_inequality_slack >= -1e-9);
        }

        #[test]
        fn entropy_identity_holds_for_non_optimal_perfect(seed in any::<u64>()) {
            // mix the optimum with a second perfect matching: still perfect, not optimal
            let g = Hypergraph::complete(7, 3);
            let x = solve(&g);
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let mut w = x.weights.clone();
            // shift along a 4-cycle of edges sharing a pair keeps vertex sums fixed
            let a = rand::Rng::gen_range(&mut rng, 0.0..0.05);
            let e1 = g.edge_id(&[0, 1, 2]).unwrap();
            let e2 = g.edge_id(&[0, 1, 3]).unwrap();
            let e3 = g.edge_id(&[2, 4, 5]).unwrap();
            let e4 = g.edge_id(&[3, 4, 5]).unwrap();
            w[e1] += a; w[e2] -= a; w[e3] -= a; w[e4] += a;
            let y = FractionalMatching::new(&g, w).unwrap();
            prop_assert!(y.is_perfect(1e-12));
            let r = verify_identities(&g, &y);
            prop_assert!(r.entropy_identity <= 1e-9);
            for e in &r.ell { prop_assert!(e.entropy_identity <= 1e-9); }
        }
    }
}
