//! Tight Hamilton paths between every pair of disjoint start/end pairs of a small Dirac graph.

use entham::counting::{find_hamilton_path_between, is_tight_hamilton};
use entham::hypergraph::{GeneratorKind, Hypergraph};

fn main() {
    let g = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.6, p: 0.8, seed: 0, max_tries: 10_000 }, 8, 3).unwrap();
    println!("n=8, min codegree {}", g.min_codegree());
    let n = g.n() as u32;
    let (mut found, mut total) = (0, 0);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let (s, t) = ([a, b], [c, d]);
                    let all = [a, b, c, d];
                    if (0..4).any(|i| (i + 1..4).any(|j| all[i] == all[j])) {
                        continue;
                    }
                    total += 1;
                    if let Ok(p) = find_hamilton_path_between(&g, &s, &t, None) {
                        assert!(is_tight_hamilton(&g, &p, false));
                        found += 1;
                    }
                }
            }
        }
    }
    println!("{found}/{total} ordered disjoint pairs joined by a tight Hamilton path");
    println!("example: {:?}", find_hamilton_path_between(&g, &[0, 1], &[2, 3], None));
}
