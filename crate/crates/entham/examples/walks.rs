//! Sample tight walks on a Dirac graph, compare walk entropy with the chain
//! bound, and estimate self-avoidance.

use entham::chain::{build_chain, ChainOptions};
use entham::entropy::{max_entropy_pfm, SolverOptions};
use entham::hypergraph::{GeneratorKind, Hypergraph};
use entham::walk::{random_start_tuple, sample_walk, walk_entropy_exact, well_behaved_monte_carlo, TupleKernel};

fn main() {
    let g = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.55, p: 0.75, seed: 5, max_tries: 10_000 }, 40, 3).unwrap();
    let (x, _) = max_entropy_pfm(&g, SolverOptions::default()).unwrap();
    let kernel = TupleKernel { g: &g, x: &x };

    let start = random_start_tuple(&g, 11);
    let w = sample_walk(&kernel, &start, 6, 11).unwrap();
    println!("one walk: {:?} self-avoiding={}", w.vertices, w.self_avoiding);

    let small = Hypergraph::complete(7, 3);
    let (xs, _) = max_entropy_pfm(&small, SolverOptions::default()).unwrap();
    let chain = build_chain(&small, &xs, 2, ChainOptions::default()).unwrap();
    for m in 1..=4 {
        let e = walk_entropy_exact(&chain, &[0, 1], m).unwrap();
        println!("K7 m={m}: {e:?}");
    }

    let m = (g.n() as f64).cbrt().floor() as usize;
    let stats = well_behaved_monte_carlo(&g, &x, m, 2000, 0, 0.1).unwrap();
    println!(
        "m={m}: self-avoiding {}/{} ({:.4} ± {:.4}), well-behaved {:?}",
        stats.self_avoiding, stats.walks, stats.rate, stats.std_error, stats.well_behaved
    );
}
