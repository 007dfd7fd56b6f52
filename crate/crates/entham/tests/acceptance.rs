//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entham::bounds::{bound_t16, bound_t17};
use entham::chain::{build_chain, ChainOptions};
use entham::counting::{
    count_hamilton_ell_cycles, count_perfect_matchings, count_tight_hamilton_cycles, cycle_constants, find_hamilton_path_between,
    is_tight_hamilton,
};
use entham::entropy::{certify_normality, entropy_sandwich, max_entropy_pfm, verify_identities, FractionalMatching, SolverOptions};
use entham::hypergraph::{GeneratorKind, Hypergraph};
use entham::math::log2_binomial;
use entham::pipeline::{sample_hamilton_cycle, validate_cycle, PipelineConfig};
use entham::surgery::{normalization_procedure, remove_and_repair};
use entham::walk::{self_avoid_monte_carlo, walk_entropy_exact, TupleKernel};

type Outcome = Result<String, String>;

fn fact(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::from(1u32), |a, b| a * b)
}

fn binom(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64)
}

fn dirac(n: usize, delta: f64, p: f64, seed: u64) -> Hypergraph {
    Hypergraph::generate(GeneratorKind::DiracRejection { delta, p, seed, max_tries: 100_000 }, n, 3).expect("dirac instance")
}

fn solve(g: &Hypergraph) -> FractionalMatching {
    max_entropy_pfm(g, SolverOptions::default()).expect("solver").0
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_closed_forms() -> Outcome {
    let t = Instant::now();
    let mut cases = 0;
    for (k, ns) in [(2, 4..=9), (3, 5..=9), (4, 6..=9)] {
        for n in ns {
            let got = count_tight_hamilton_cycles(&Hypergraph::complete(n, k)).value;
            let want = fact(n) / BigUint::from(2 * n);
            check(got == want, || format!("tight K_{n}^({k}): {got} != {want}"))?;
            cases += 1;
        }
    }
    for k in 2..=4 {
        for n in (k..=9).filter(|n| n % k == 0) {
            let g = Hypergraph::complete(n, k);
            let c = fact(n / k) * fact(k).pow((n / k) as u32);
            let want = fact(n) / c;
            let phi = count_hamilton_ell_cycles(&g, 0).map_err(|e| e.to_string())?.0.value;
            let pm = count_perfect_matchings(&g).value;
            check(phi == want && pm == want, || format!("Phi K_{n}^({k}): {phi}/{pm} != {want}"))?;
            cases += 1;
        }
    }
    // K_6^(3): ℓ=0 → 6!/(2!·3!²), ℓ=1 → 6!/(2·6/2), ℓ=2 → 6!/12
    let g = Hypergraph::complete(6, 3);
    for (ell, want) in [(0, 10u32), (1, 120), (2, 60)] {
        let got = count_hamilton_ell_cycles(&g, ell).map_err(|e| e.to_string())?.0.value;
        check(got == BigUint::from(want), || format!("Psi_{ell}(K_6^(3)) = {got}, want {want}"))?;
        cases += 1;
    }
    let secs = t.elapsed().as_secs_f64();
    check(secs <= 60.0, || format!("runtime {secs:.1}s > 60s"))?;
    Ok(format!("{cases} exact counts in {secs:.2}s"))
}

fn c2_ordered_unordered() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checks = 0;
    for i in 0..30 {
        let n = rng.gen_range(7..=10);
        let g = dirac(n, 0.55, 0.85, 1000 + i);
        for ell in 0..3 {
            let Ok(cc) = cycle_constants(n, 3, ell) else { continue };
            let (u, o) = count_hamilton_ell_cycles(&g, ell).map_err(|e| format!("n={n} ell={ell}: {e}"))?;
            check(o.value == &cc.c * &u.value, || format!("n={n} ell={ell}: ordered {} != {} x {}", o.value, cc.c, u.value))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} (instance, ell) pairs agree"))
}

/// Complete instances plus 50 Dirac instances, shared by criteria 3 and 4.
fn solved_instances() -> Vec<(String, Hypergraph, FractionalMatching)> {
    let mut out = Vec::new();
    for k in 2..=3 {
        for n in k + 1..=12 {
            let g = Hypergraph::complete(n, k);
            let x = solve(&g);
            out.push((format!("K_{n}^({k})"), g, x));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..50 {
        let n = rng.gen_range(8..=30);
        let g = dirac(n, 0.55, 0.85, 3000 + i);
        let x = solve(&g);
        out.push((format!("dirac n={n} #{i}"), g, x));
    }
    out
}

fn c3_solver(inst: &[(String, Hypergraph, FractionalMatching)]) -> Outcome {
    let mut worst_w: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for (name, g, x) in inst {
        let (n, k) = (g.n(), g.k());
        if name.starts_with("K_") {
            let w = 1.0 / binom(n - 1, k - 1);
            let dev = x.weights.iter().map(|&v| (v - w).abs()).fold(0.0, f64::max);
            worst_w = worst_w.max(dev);
            check(dev <= 1e-8, || format!("{name}: weight deviation {dev:e}"))?;
            let h = n as f64 / k as f64 * log2_binomial(n - 1, k - 1);
            check((x.entropy() - h).abs() <= 1e-6, || format!("{name}: h {} vs {h}", x.entropy()))?;
        } else {
            let r = x.max_residual();
            worst_res = worst_res.max(r);
            check(r <= 1e-10, || format!("{name}: residual {r:e}"))?;
            let (lo, hi) = entropy_sandwich(n, k, g.codegree_ratio());
            let h = x.entropy();
            check(lo - 1e-9 <= h && h <= hi + 1e-9, || format!("{name}: h={h} outside [{lo}, {hi}]"))?;
        }
    }
    Ok(format!("max weight deviation {worst_w:.1e}, max Dirac residual {worst_res:.1e}"))
}

fn c4_identities(inst: &[(String, Hypergraph, FractionalMatching)]) -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, g, x) in inst {
        let r = verify_identities(g, x);
        let e = r.max_equality_residual();
        worst = worst.max(e);
        check(e <= 1e-9, || format!("{name}: identity residual {e:e}"))?;
        check(r.inequalities_hold(), || {
            format!("{name}: inequality violated (pair {:e}, transition {:e})", r.pair_bound_violation, r.transition_bound_violation)
        })?;
    }
    Ok(format!("{} instances, max residual {worst:.1e}", inst.len()))
}

fn c5_mixing() -> Outcome {
    let mut graphs = vec![Hypergraph::complete(6, 3), Hypergraph::complete(7, 3), Hypergraph::complete(8, 4)];
    for s in 0..5 {
        graphs.push(dirac(9 + s as usize % 3, 0.55, 0.85, 500 + s));
    }
    let mut worst: f64 = 0.0;
    for g in &graphs {
        let x = solve(g);
        for ell in 1..g.k() {
            let chain = build_chain(g, &x, ell, ChainOptions::default()).map_err(|e| e.to_string())?;
            let d = chain.stationarity_deviation();
            worst = worst.max(d);
            check(d <= 1e-10, || format!("n={} k={} ell={ell}: stationarity {d:e}", g.n(), g.k()))?;
        }
    }
    let g = Hypergraph::complete(6, 3);
    let x = solve(&g);
    let chain = build_chain(&g, &x, 2, ChainOptions::default()).map_err(|e| e.to_string())?;
    let prof = chain.mixing_profile(&[0, 1], 60).map_err(|e| e.to_string())?;
    let e60 = prof.errors[60];
    check(e60 <= 1e-6, || format!("K_6^(3) error at t=60 is {e60:e}"))?;
    // tail: from the first t with error below 1 down to the round-off floor
    let t0 = prof.errors.iter().position(|&e| e < 1.0).unwrap_or(prof.errors.len());
    let tail: Vec<f64> = prof.errors[t0..].iter().copied().take_while(|&e| e > 1e-12).collect();
    check(tail.len() >= 20 && tail.windows(2).all(|w| w[1] < w[0]), || format!("log-error tail not decreasing: {tail:?}"))?;
    Ok(format!(
        "max stationarity deviation {worst:.1e}; K_6^(3) error(60) = {e60:.1e}, strictly decreasing over t={t0}..{}",
        t0 + tail.len() - 1
    ))
}

fn c6_walk_entropy() -> Outcome {
    let mut graphs = vec![Hypergraph::complete(6, 3)];
    for s in 0..10 {
        graphs.push(dirac(8 + s as usize % 3, 0.55, 0.85, 600 + s));
    }
    let mut worst: f64 = 0.0;
    for g in &graphs {
        let x = solve(g);
        let chain = build_chain(g, &x, 2, ChainOptions::default()).map_err(|e| e.to_string())?;
        for start in [chain.space.state(0).to_vec(), chain.space.state(chain.num_states() / 2).to_vec()] {
            for m in 1..=4 {
                let w = walk_entropy_exact(&chain, &start, m).map_err(|e| e.to_string())?;
                let en = w.enumerated.ok_or("enumeration skipped")?;
                let d = (w.chain_rule - en).abs();
                worst = worst.max(d);
                check(d <= 1e-9, || format!("n={} m={m}: chain rule {} vs enumerated {en}", g.n(), w.chain_rule))?;
            }
        }
    }
    let g = Hypergraph::complete(6, 3);
    let chain = build_chain(&g, &solve(&g), 2, ChainOptions::default()).map_err(|e| e.to_string())?;
    let h2 = walk_entropy_exact(&chain, &[0, 1], 2).map_err(|e| e.to_string())?;
    check((h2.chain_rule - 4.0).abs() <= 1e-12, || format!("K_6^(3) m=2 gives {}", h2.chain_rule))?;
    Ok(format!("max |chain rule - enumeration| {worst:.1e}; K_6^(3) m=2 = {:.12}", h2.chain_rule))
}

fn c7_surgery() -> Outcome {
    for (n, k) in [(6, 3), (7, 3), (9, 3), (8, 4), (7, 2)] {
        let g = Hypergraph::complete(n, k);
        let x = solve(&g);
        let r = remove_and_repair(&g, &x, &[(n - 1) as u32], 0.1, 1e-10).map_err(|e| e.to_string())?;
        let lambda = (n - 1) as f64 / (n - k) as f64;
        let xp = lambda / binom(n - 1, k - 1);
        check((r.report.lambda - lambda).abs() <= 1e-12, || format!("K_{n}^({k}): lambda {}", r.report.lambda))?;
        check(r.report.shift_count == 0, || format!("K_{n}^({k}): {} shifts", r.report.shift_count))?;
        check(r.z.is_perfect(1e-12), || format!("K_{n}^({k}): not perfect"))?;
        check(r.z.weights.iter().all(|&w| (w - xp).abs() <= 1e-12), || format!("K_{n}^({k}): weights differ from {xp}"))?;
    }
    let mut max_rounds = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(8..=14);
        let g = dirac(n, 0.55, 0.9, 7000 + seed);
        let x = solve(&g);
        let mut w: Vec<f64> = x.weights.iter().map(|&v| v * rng.gen_range(0.8..1.2)).collect();
        let total: f64 = w.iter().sum();
        let target = n as f64 / 3.0;
        for v in &mut w {
            *v *= target / total;
        }
        let xp = FractionalMatching::new(&g, w).map_err(|e| e.to_string())?;
        let (z, rep) = normalization_procedure(&g, &xp, 1e-10).map_err(|e| format!("seed {seed}: {e}"))?;
        check(z.is_perfect(1e-9), || format!("seed {seed}: residual {:e}", z.max_residual()))?;
        check(rep.shift_count <= n, || format!("seed {seed}: {} rounds > n={n}", rep.shift_count))?;
        check(rep.max_conservation_error <= 1e-12, || format!("seed {seed}: conservation error {:e}", rep.max_conservation_error))?;
        max_rounds = max_rounds.max(rep.shift_count);
    }
    Ok(format!("K_6^(3) lambda=5/3 exact; 100 perturbations repaired, max {max_rounds} rounds"))
}

fn c8_bounds() -> Outcome {
    let mut rows = Vec::new();
    for k in 2..=3 {
        for n in k + 2..=9 {
            let g = Hypergraph::complete(n, k);
            let h = solve(&g).entropy();
            let exact = count_tight_hamilton_cycles(&g).log2();
            let t16 = bound_t16(n, k, h);
            check(exact >= t16, || format!("K_{n}^({k}): exact {exact} < t16 {t16}"))?;
            let t17 = bound_t17(n, g.codegree_ratio());
            rows.push(format!("K_{n}^({k}) gap16={:+.3} gap17={:+.3}", exact - t16, exact - t17));
        }
    }
    for r in &rows {
        println!("    {r}");
    }
    Ok(format!("{} instances, exact >= t16 on all", rows.len()))
}

fn c9_pipeline() -> Outcome {
    let mut valid = 0;
    let mut errors = Vec::new();
    for seed in 0..20u64 {
        let g = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.51, p: 0.75, seed, max_tries: 1000 }, 60, 3)
            .map_err(|e| e.to_string())?;
        let cfg = PipelineConfig { seed, absorb_delta_hat: Some(0.0), absorb_max_tries: 1000, ..PipelineConfig::default() };
        match sample_hamilton_cycle(&g, &cfg) {
            Ok(cert) => {
                check(cert.validity && validate_cycle(&g, &cert.cycle), || format!("seed {seed}: invalid certificate"))?;
                check(is_tight_hamilton(&g, &cert.cycle, true), || format!("seed {seed}: window check failed"))?;
                let again = sample_hamilton_cycle(&g, &cfg).map_err(|e| format!("seed {seed}: replay failed: {e}"))?;
                check(again.to_json() == cert.to_json(), || format!("seed {seed}: replay differs"))?;
                valid += 1;
            }
            Err(e) => errors.push(e.kind()),
        }
    }
    check(valid >= 15, || format!("only {valid}/20 valid; errors {errors:?}"))?;
    Ok(format!("{valid}/20 valid, replay identical, errors {errors:?}"))
}

fn c10_connectivity() -> Outcome {
    let t = Instant::now();
    let mut pairs = 0;
    for seed in 0..10 {
        let g = dirac(8, 0.6, 0.8, 10_000 + seed);
        let n = g.n() as u32;
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                for c in (0..n).filter(|&c| c != a && c != b) {
                    for d in (0..n).filter(|&d| d != a && d != b && d != c) {
                        let p = find_hamilton_path_between(&g, &[a, b], &[c, d], None)
                            .map_err(|e| format!("seed {seed} ({a},{b})->({c},{d}): {e}"))?;
                        check(is_tight_hamilton(&g, &p, false), || format!("seed {seed}: invalid path"))?;
                        pairs += 1;
                    }
                }
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    check(secs <= 600.0, || format!("runtime {secs:.0}s"))?;
    Ok(format!("{pairs} tuple pairs connected in {secs:.2}s"))
}

fn c11_self_avoidance() -> Outcome {
    let (n, k) = (400usize, 3usize);
    let g = Hypergraph::generate(GeneratorKind::Binomial { p: 0.75, seed: 11 }, n, k).map_err(|e| e.to_string())?;
    let x = solve(&g);
    let b = certify_normality(&x, 1.0).b_star;
    let m = (n as f64).cbrt().floor() as usize;
    let stats = self_avoid_monte_carlo(&g, &TupleKernel { g: &g, x: &x }, m, 10_000, 11).map_err(|e| e.to_string())?;
    let bound = 1.0 - 2.0 * (m * m) as f64 * b * b * (k as f64).powi(4) / n as f64;
    let threshold = bound - 5.0 * stats.std_error;
    check(stats.rate >= threshold, || format!("rate {} < {threshold}", stats.rate))?;
    Ok(format!("rate {:.4} ± {:.4} (m={m}, b*={b:.3}), lower bound {bound:.3}", stats.rate, stats.std_error))
}

fn main() {
    let inst = solved_instances();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("closed-form counts", Box::new(c1_closed_forms)),
        ("ordered/unordered oracle", Box::new(c2_ordered_unordered)),
        ("solver correctness", Box::new(|| c3_solver(&inst))),
        ("identity suite", Box::new(|| c4_identities(&inst))),
        ("stationarity and mixing", Box::new(c5_mixing)),
        ("walk entropy oracle", Box::new(c6_walk_entropy)),
        ("surgery", Box::new(c7_surgery)),
        ("bound consistency", Box::new(c8_bounds)),
        ("pipeline end-to-end", Box::new(c9_pipeline)),
        ("Hamilton-connectivity", Box::new(c10_connectivity)),
        ("self-avoidance", Box::new(c11_self_avoidance)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS {:2} {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:2} {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
