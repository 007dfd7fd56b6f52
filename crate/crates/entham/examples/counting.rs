//! Exact tight and ℓ-cycle counts, perfect matchings and walk counts on small graphs.

use entham::counting::{count_hamilton_ell_cycles, count_perfect_matchings, count_tight_hamilton_cycles, count_walks_between};
use entham::hypergraph::{GeneratorKind, Hypergraph};

fn main() {
    for n in 5..=9 {
        let g = Hypergraph::complete(n, 3);
        let c = count_tight_hamilton_cycles(&g);
        println!("K_{n}^(3): {} tight Hamilton cycles ({} nodes)", c.value, c.nodes_explored);
    }

    let g = Hypergraph::complete(8, 4);
    for ell in [0, 2] {
        let (u, o) = count_hamilton_ell_cycles(&g, ell).unwrap();
        println!("K_8^(4) ell={ell}: unordered {} ordered {}", u.value, o.value);
    }
    println!("K_9^(3) perfect matchings: {}", count_perfect_matchings(&Hypergraph::complete(9, 3)).value);

    let d = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.6, p: 0.8, seed: 4, max_tries: 10_000 }, 9, 3).unwrap();
    println!("dirac n=9: {} tight Hamilton cycles", count_tight_hamilton_cycles(&d).value);
    println!("walks (0,1) -> (2,3) of length 4: {}", count_walks_between(&d, &[0, 1], &[2, 3], 4).unwrap().value);

    if let Err(e) = count_hamilton_ell_cycles(&Hypergraph::complete(5, 3), 1) {
        println!("K_5^(3) ell=1: {e}");
    }
}
