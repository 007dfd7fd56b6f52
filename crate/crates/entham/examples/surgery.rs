//! Delete a vertex set, rescale the restricted matching and repair it back to a
//! perfect fractional matching.

use entham::entropy::{max_entropy_pfm, SolverOptions};
use entham::hypergraph::{GeneratorKind, Hypergraph};
use entham::surgery::remove_and_repair;

fn main() {
    let g = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.55, p: 0.8, seed: 2, max_tries: 10_000 }, 24, 3).unwrap();
    let (x, _) = max_entropy_pfm(&g, SolverOptions::default()).unwrap();
    for m in [vec![0u32], vec![0, 5, 9], vec![1, 2, 3, 4, 5, 6]] {
        match remove_and_repair(&g, &x, &m, 0.1, 1e-10) {
            Ok(r) => {
                let rep = &r.report;
                println!(
                    "remove {:?}: lambda={:.4} shifts={} h {:.3} -> {:.3} floor {:?} met {:?} b*={:.3}",
                    m, rep.lambda, rep.shift_count, rep.entropy_in, rep.entropy_out, rep.entropy_floor, rep.floor_met, rep.b_star_out
                );
                println!("  residual after repair {:.2e}", r.z.max_residual());
            }
            Err(e) => println!("remove {m:?}: {e}"),
        }
    }
}
