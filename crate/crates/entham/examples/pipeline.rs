//! Sample tight Hamilton cycles on Dirac 3-graphs with n = 60 and print the
//! certificate of the first one.

use entham::hypergraph::{GeneratorKind, Hypergraph};
use entham::pipeline::{sample_hamilton_cycle, validate_cycle, PipelineConfig};

fn main() {
    let mut valid = 0;
    for seed in 0..5u64 {
        let g = Hypergraph::generate(GeneratorKind::DiracRejection { delta: 0.51, p: 0.75, seed, max_tries: 1000 }, 60, 3).unwrap();
        let cfg = PipelineConfig { seed, absorb_delta_hat: Some(0.0), absorb_max_tries: 1000, ..PipelineConfig::default() };
        match sample_hamilton_cycle(&g, &cfg) {
            Ok(cert) => {
                let ok = validate_cycle(&g, &cert.cycle);
                valid += ok as usize;
                println!(
                    "seed {seed}: valid={ok} |U|={} stages={} closure on {} vertices ({} nodes)",
                    cert.absorption_set.len(),
                    cert.stage_log.len(),
                    cert.closure_size,
                    cert.closure_nodes
                );
                if seed == 0 {
                    println!("{}", cert.to_json());
                }
            }
            Err(e) => println!("seed {seed}: {} {e}", e.kind()),
        }
    }
    println!("{valid}/5 valid");
}
