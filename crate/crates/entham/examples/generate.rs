//! Generate complete, binomial and Dirac 3-graphs and round-trip one through the edge-list format.

use entham::hypergraph::{GeneratorKind, Hypergraph};

fn main() {
    let n = 12;
    let k = 3;
    for (name, kind) in [
        ("complete", GeneratorKind::Complete),
        ("binomial", GeneratorKind::Binomial { p: 0.6, seed: 7 }),
        ("dirac", GeneratorKind::DiracRejection { delta: 0.55, p: 0.8, seed: 7, max_tries: 10_000 }),
    ] {
        let g = Hypergraph::generate(kind, n, k).expect("generator");
        println!(
            "{name:9} edges={:4} min codegree={} ratio={:.3} dirac>1/2={}",
            g.num_edges(),
            g.min_codegree(),
            g.codegree_ratio(),
            g.is_dirac_above_half()
        );
    }

    let g = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.55, p: 0.8, seed: 7, max_tries: 10_000 }, n, k).unwrap();
    let text = g.to_edge_string();
    let (back, _) = Hypergraph::parse_edge_list(&text).unwrap();
    assert_eq!(back.edge_list(), g.edge_list());
    println!("round trip ok ({} lines)", text.lines().count());
}
