//! Lower-bound calculators for Hamilton cycle counts and the sweep that compares
//! them with exact counts.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{count_hamilton_ell_cycles, count_tight_hamilton_cycles, CountError};
use crate::entropy::{max_entropy_pfm, SolverError, SolverOptions};
use crate::hypergraph::Hypergraph;
use crate::math::{log2_binomial, log2_factorial, LOG2_E};

pub const DEFAULT_EXACT_GUARD: usize = 12;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum BoundError {
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub instance: String,
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub delta: f64,
    pub h_bits: f64,
    pub hbar: f64,
    pub hbar_ell: f64,
    pub bound_t16: f64,
    pub bound_t17: f64,
    pub bound_t18: f64,
    /// Bits per vertex subtracted by [`BoundReport::with_slack`]; not applied above.
    pub slack: f64,
    pub exact_log2: Option<f64>,
    /// exact_log2 − bound_t18 (which equals bound_t16 when ℓ = k−1).
    pub gap: Option<f64>,
    pub runtime_s: f64,
}

impl BoundReport {
    /// (t16, t17, t18) each minus slack·n.
    pub fn with_slack(&self) -> (f64, f64, f64) {
        let s = self.slack * self.n as f64;
        (self.bound_t16 - s, self.bound_t17 - s, self.bound_t18 - s)
    }
}

/// log2 C_{n,k,ℓ} without big integers.
pub fn log2_cycle_constant(n: usize, k: usize, ell: usize) -> Result<f64, CountError> {
    let cc = crate::counting::cycle_constants(n, k, ell)?;
    Ok(if ell == 0 {
        let b = n / k;
        log2_factorial(b) + b as f64 * log2_factorial(k)
    } else {
        (n / (k - ell)) as f64 * (log2_factorial(cc.pi1) + log2_factorial(cc.pi2))
    })
}

/// log2[C(n,k−1)·(n−k+1)!/((n−ℓ)!·n)]
fn ell_log_term(n: usize, k: usize, ell: usize) -> f64 {
    log2_binomial(n, k - 1) + log2_factorial(n - k + 1) - log2_factorial(n - ell) - (n as f64).log2()
}

pub fn hbar(n: usize, k: usize, h: f64) -> f64 {
    let nk = n as f64 / k as f64;
    h - nk * log2_binomial(n, k - 1) + nk * (n as f64).log2()
}

pub fn hbar_ell(n: usize, k: usize, ell: usize, h: f64) -> f64 {
    h - n as f64 / k as f64 * ell_log_term(n, k, ell)
}

/// k·h − n log2 C(n,k−1) + n log2 n − n log2 e
pub fn bound_t16(n: usize, k: usize, h: f64) -> f64 {
    let nf = n as f64;
    k as f64 * h - nf * log2_binomial(n, k - 1) + nf * nf.log2() - nf * LOG2_E
}

/// n log2 δ + log2 n!
pub fn bound_t17(n: usize, delta: f64) -> f64 {
    n as f64 * delta.log2() + log2_factorial(n)
}

/// (k/(k−ℓ))h − (n/(k−ℓ)) log2[C(n,k−1)(n−k+1)!/((n−ℓ)!n)] − n log2 e − log2 C_{n,k,ℓ}
pub fn bound_t18(n: usize, k: usize, ell: usize, h: f64) -> Result<f64, CountError> {
    let c = log2_cycle_constant(n, k, ell)?;
    let s = (k - ell) as f64;
    let nf = n as f64;
    Ok(k as f64 / s * h - nf / s * ell_log_term(n, k, ell) - nf * LOG2_E - c)
}

/// All bound values for given (n, k, ℓ, δ, h); no exact count.
pub fn theorem_bounds(n: usize, k: usize, ell: usize, delta: f64, h: f64) -> Result<BoundReport, BoundError> {
    Ok(BoundReport {
        instance: String::new(),
        n,
        k,
        ell,
        delta,
        h_bits: h,
        hbar: hbar(n, k, h),
        hbar_ell: hbar_ell(n, k, ell, h),
        bound_t16: bound_t16(n, k, h),
        bound_t17: bound_t17(n, delta),
        bound_t18: bound_t18(n, k, ell, h)?,
        slack: 0.0,
        exact_log2: None,
        gap: None,
        runtime_s: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub exact_guard: usize,
    pub slack: f64,
    pub tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { exact_guard: DEFAULT_EXACT_GUARD, slack: 0.0, tol: 1e-10 }
    }
}

/// Solves h, reads δ = δ_{k−1}(G)/n, and adds the exact count when n is within the guard.
pub fn bound_report(name: &str, g: &Hypergraph, ell: usize, cfg: &SweepConfig) -> Result<BoundReport, BoundError> {
    let t = Instant::now();
    let (n, k) = (g.n(), g.k());
    crate::counting::cycle_constants(n, k, ell)?;
    let (x, _) = max_entropy_pfm(g, SolverOptions { tol: cfg.tol, ..SolverOptions::default() })?;
    let mut r = theorem_bounds(n, k, ell, g.codegree_ratio(), x.entropy())?;
    r.instance = name.to_string();
    r.slack = cfg.slack;
    if n <= cfg.exact_guard {
        let count = if ell + 1 == k { count_tight_hamilton_cycles(g) } else { count_hamilton_ell_cycles(g, ell)?.0 };
        let e = count.log2();
        r.exact_log2 = Some(e);
        r.gap = Some(e - r.bound_t18);
    }
    r.runtime_s = t.elapsed().as_secs_f64();
    Ok(r)
}

/// One row per instance, in order; failures are kept per row.
pub fn sweep(instances: &[(String, Hypergraph)], ell: usize, cfg: &SweepConfig) -> Vec<Result<BoundReport, (String, BoundError)>> {
    instances
        .par_iter()
        .map(|(name, g)| bound_report(name, g, ell, cfg).map_err(|e| (name.clone(), e)))
        .collect()
}
