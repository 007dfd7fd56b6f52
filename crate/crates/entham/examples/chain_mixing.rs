//! Exact mixing profile of the tuple walk chain on K_7^(3) and a small Dirac graph.

use entham::chain::{build_chain, ChainOptions};
use entham::entropy::{max_entropy_pfm, SolverOptions};
use entham::hypergraph::{GeneratorKind, Hypergraph};

fn main() {
    let graphs = [
        ("K7", Hypergraph::complete(7, 3)),
        ("dirac10", Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.6, p: 0.8, seed: 3, max_tries: 10_000 }, 10, 3).unwrap()),
    ];
    for (name, g) in graphs {
        let (x, _) = max_entropy_pfm(&g, SolverOptions::default()).unwrap();
        let chain = build_chain(&g, &x, g.k() - 1, ChainOptions::default()).unwrap();
        let start = chain.space.state(0).to_vec();
        let prof = chain.mixing_profile(&start, 40).unwrap();
        println!("{name}: {} states, stationarity deviation {:.1e}", chain.num_states(), chain.stationarity_deviation());
        for t in [0, 1, 2, 5, 10, 20, 40] {
            println!("  t={t:2}  err={:.3e}", prof.errors[t]);
        }
        if let (Some(rho), Some(rate)) = (prof.rho, prof.rate) {
            println!("  fitted rho={rho:.4} rate={rate:.4}");
        }
    }
}
