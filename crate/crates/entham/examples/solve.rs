//! Maximum-entropy perfect fractional matching, its normality constant and the
//! matching identities.

use entham::entropy::{certify_normality, entropy_sandwich, max_entropy_pfm, verify_identities, SolverOptions};
use entham::hypergraph::{GeneratorKind, Hypergraph};

fn main() {
    let g = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.55, p: 0.85, seed: 1, max_tries: 10_000 }, 30, 3).unwrap();
    let (x, pots) = max_entropy_pfm(&g, SolverOptions::default()).expect("solver");
    let cert = certify_normality(&x, 2.0);
    let ids = verify_identities(&g, &x);
    let (lo, hi) = entropy_sandwich(g.n(), g.k(), g.codegree_ratio());

    println!("n={} k={} edges={}", g.n(), g.k(), g.num_edges());
    println!("h(x) = {:.6} bits  (sandwich [{lo:.3}, {hi:.3}])", x.entropy());
    println!("residual {:.2e} after {} iterations ({} newton)", x.max_residual(), pots.iterations, pots.newton_steps);
    println!("b* = {:.4}, 2-normal: {}", cert.b_star, cert.holds);
    println!("identity residual {:.2e}, inequalities hold: {}", ids.max_equality_residual(), ids.inequalities_hold());
    for e in &ids.ell {
        println!("  ell={} total={:.1e} vertex={:.1e} entropy={:.1e}", e.ell, e.total, e.vertex, e.entropy_identity);
    }
}
