//! Command-line front end. `run` parses argv and returns the process exit code:
//! 0 success, 1 usage error, 2 computation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{bound_report, sweep, BoundReport, SweepConfig, DEFAULT_EXACT_GUARD};
use crate::chain::{build_chain, ChainOptions};
use crate::counting::{count_hamilton_ell_cycles, count_tight_hamilton_cycles, find_hamilton_path_between};
use crate::entropy::{certify_normality, max_entropy_pfm, verify_identities, FractionalMatching, SolverOptions};
use crate::hypergraph::{GeneratorKind, Hypergraph};
use crate::pipeline::{sample_hamilton_cycle, MatchingMode, PipelineConfig, WalkGate};
use crate::report::{emit_report, Format, RunManifest};
use crate::surgery::remove_and_repair;
use crate::walk::{random_start_tuple, sample_walk, walk_seed, well_behaved_monte_carlo, TupleKernel};

#[derive(Parser, Debug)]
#[command(name = "entham", version, about = "Max-entropy matchings, walk chains and Hamilton cycles in Dirac hypergraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Edge-list file (first line "n k", then one edge per line)
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true, env = "EH_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "EH_THREADS")]
    pub threads: Option<usize>,
    /// Well-behavedness exponent
    #[arg(long, global = true, default_value_t = 0.1)]
    pub alpha: f64,
    /// Pipeline stopping exponent
    #[arg(long, global = true, default_value_t = 0.3)]
    pub beta: f64,
    /// Minimum codegree ratio for `gen --kind dirac`
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Overlap ℓ (default k-1)
    #[arg(long, global = true)]
    pub ell: Option<usize>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    pub format: OutFormat,
    /// Write the main artifact here (plus <out>.manifest.json)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Complete,
    Binomial,
    Dirac,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountMode {
    Tight,
    Ell,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GateArg {
    SelfAvoiding,
    WellBehaved,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatchingArg {
    Resolve,
    Repair,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate an instance
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, value_enum, default_value_t = GenKind::Dirac)]
        kind: GenKind,
        #[arg(long, default_value_t = 0.75)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        max_tries: usize,
    },
    /// Maximum-entropy perfect fractional matching and identity checks
    Solve,
    /// Build the walk chain and its exact mixing profile
    Chain {
        #[arg(long, default_value_t = 60)]
        t_max: usize,
        /// Start state, comma separated (default: first state)
        #[arg(long)]
        start: Option<String>,
    },
    /// Sample walks; self-avoidance and well-behavedness rates
    Walk {
        /// Steps per walk (default ⌊n^(1/3)⌋)
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        walks: usize,
    },
    /// Remove vertices and repair the matching
    Surgery {
        /// Vertices to remove, comma separated
        #[arg(long)]
        remove: String,
    },
    /// Exact cycle counts
    Count {
        #[arg(long, value_enum, default_value_t = CountMode::Tight)]
        mode: CountMode,
    },
    /// Tight Hamilton path between two (k-1)-tuples
    Path {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Search node budget
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Sample Hamilton cycles
    Pipeline {
        #[arg(long, default_value_t = 1)]
        runs: u64,
        #[arg(long, value_enum, default_value_t = GateArg::SelfAvoiding)]
        gate: GateArg,
        #[arg(long, value_enum, default_value_t = MatchingArg::Resolve)]
        matching: MatchingArg,
        /// δ̂ for the absorption condition (default: measured)
        #[arg(long)]
        absorb_delta_hat: Option<f64>,
        #[arg(long, default_value_t = 100)]
        absorb_tries: usize,
        #[arg(long, default_value_t = 50)]
        max_resamples: usize,
        /// Lift the n ≤ 120 guard
        #[arg(long)]
        allow_large: bool,
    },
    /// Entropy lower bounds for one instance
    Bound {
        #[arg(long, default_value_t = DEFAULT_EXACT_GUARD)]
        exact_guard: usize,
        /// Bits per vertex subtracted in the slack-adjusted bounds
        #[arg(long, default_value_t = 0.0)]
        slack: f64,
    },
    /// Bound table over many instances
    Sweep {
        /// Edge-list files
        files: Vec<PathBuf>,
        /// Also include complete k-graphs K_n for n in [n-from, n-to]
        #[arg(long)]
        complete_k: Option<usize>,
        #[arg(long, default_value_t = 5)]
        n_from: usize,
        #[arg(long, default_value_t = 9)]
        n_to: usize,
        #[arg(long, default_value_t = DEFAULT_EXACT_GUARD)]
        exact_guard: usize,
        #[arg(long, default_value_t = 0.0)]
        slack: f64,
    },
}

enum CliError {
    Usage(String),
    Compute(String),
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

pub fn help_text() -> String {
    Cli::command().render_help().to_string()
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// `run` with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return 0;
                }
                _ => 1,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let line: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut buf = Vec::new();
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &line, &mut buf)),
            Err(e) => Err(CliError::Usage(e.to_string())),
        },
        None => dispatch(&cli, &line, &mut buf),
    };
    let _ = out.write_all(&buf);
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(err, "usage error: {m}\n\n{}", Cli::command().render_usage());
            1
        }
        Err(CliError::Compute(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn load(cli: &Cli) -> Result<Hypergraph, CliError> {
    let path = cli.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
    Hypergraph::read_edge_file(path).map(|(g, _)| g).map_err(compute)
}

fn parse_tuple(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<u32>().map_err(|e| CliError::Usage(format!("bad vertex '{t}': {e}"))))
        .collect()
}

fn solve(g: &Hypergraph, tol: f64) -> Result<FractionalMatching, CliError> {
    max_entropy_pfm(g, SolverOptions { tol, ..SolverOptions::default() }).map(|(x, _)| x).map_err(compute)
}

/// Writes `text` to --out (with a manifest) or to stdout.
fn emit(cli: &Cli, line: &[String], text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => write_artifact(cli, line, path, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(compute),
    }
}

fn write_artifact(cli: &Cli, line: &[String], path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Compute(format!("{}: {e}", path.display())))?;
    let config = json!({
        "command": line.get(1..).unwrap_or_default(),
        "seed": cli.seed,
        "alpha": cli.alpha,
        "beta": cli.beta,
        "delta": cli.delta,
        "ell": cli.ell,
        "tol": cli.tol,
    });
    RunManifest::new(line.to_vec(), vec![cli.seed], &config).write_beside(path).map_err(compute)?;
    Ok(())
}

fn json_line(v: serde_json::Value) -> String {
    format!("{v}\n")
}

fn dispatch(cli: &Cli, line: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen { n, k, kind, p, max_tries } => {
            let kind = match kind {
                GenKind::Complete => GeneratorKind::Complete,
                GenKind::Binomial => GeneratorKind::Binomial { p: *p, seed: cli.seed },
                GenKind::Dirac => GeneratorKind::DiracRejection {
                    delta: cli.delta.unwrap_or(0.55),
                    p: *p,
                    seed: cli.seed,
                    max_tries: *max_tries,
                },
            };
            let g = Hypergraph::generate(kind, *n, *k).map_err(compute)?;
            emit(cli, line, &g.to_edge_string(), out)
        }
        Command::Solve => {
            let g = load(cli)?;
            let (x, pots) = max_entropy_pfm(&g, SolverOptions { tol: cli.tol, ..SolverOptions::default() }).map_err(compute)?;
            let ids = verify_identities(&g, &x);
            let b = certify_normality(&x, 1.0).b_star;
            let summary = json!({
                "n": g.n(), "k": g.k(), "edges": g.num_edges(),
                "h_bits": x.entropy(),
                "residual": x.max_residual(),
                "iterations": pots.iterations,
                "newton_steps": pots.newton_steps,
                "sinkhorn_sweeps": pots.sinkhorn_sweeps,
                "b_star": b,
                "identity_residual": ids.max_equality_residual(),
                "inequalities_hold": ids.inequalities_hold(),
            });
            if let Some(path) = &cli.out {
                write_artifact(cli, line, path, x.to_text(&g).as_bytes())?;
            }
            let text = match cli.format {
                OutFormat::Json => json_line(summary),
                _ => summary
                    .as_object()
                    .expect("object")
                    .iter()
                    .map(|(k, v)| format!("{k} {v}\n"))
                    .collect(),
            };
            out.write_all(text.as_bytes()).map_err(compute)
        }
        Command::Chain { t_max, start } => {
            let g = load(cli)?;
            let ell = cli.ell.unwrap_or(g.k() - 1);
            let x = solve(&g, cli.tol)?;
            let chain = build_chain(&g, &x, ell, ChainOptions::default()).map_err(compute)?;
            let start = match start {
                Some(s) => parse_tuple(s)?,
                None => chain.space.state(0).to_vec(),
            };
            let prof = chain.mixing_profile(&start, *t_max).map_err(compute)?;
            let text = match cli.format {
                OutFormat::Csv => {
                    let mut s = String::from("t,error\n");
                    for (t, e) in prof.errors.iter().enumerate() {
                        s.push_str(&format!("{t},{e}\n"));
                    }
                    s
                }
                OutFormat::Json => json_line(json!({
                    "states": chain.num_states(),
                    "stationarity_deviation": chain.stationarity_deviation(),
                    "rho": prof.rho, "rate": prof.rate, "errors": prof.errors,
                })),
                OutFormat::Text => format!(
                    "states {}\nstationarity_deviation {:e}\nrho {:?}\nrate {:?}\nerror_at_t_max {:e}\n",
                    chain.num_states(),
                    chain.stationarity_deviation(),
                    prof.rho,
                    prof.rate,
                    prof.errors.last().copied().unwrap_or(f64::NAN)
                ),
            };
            emit(cli, line, &text, out)
        }
        Command::Walk { steps, walks } => {
            let g = load(cli)?;
            let x = solve(&g, cli.tol)?;
            let m = steps.unwrap_or((g.n() as f64).cbrt().floor() as usize);
            let stats = well_behaved_monte_carlo(&g, &x, m, *walks, cli.seed, cli.alpha).map_err(compute)?;
            if let Some(path) = &cli.out {
                let kernel = TupleKernel { g: &g, x: &x };
                let mut lines = String::new();
                for i in 0..*walks as u64 {
                    let seed = walk_seed(cli.seed, i);
                    let w = sample_walk(&kernel, &random_start_tuple(&g, seed.rotate_left(17)), m, seed).map_err(compute)?;
                    lines.push_str(&w.to_json_line());
                    lines.push('\n');
                }
                write_artifact(cli, line, path, lines.as_bytes())?;
            }
            let text = match cli.format {
                OutFormat::Text => format!(
                    "steps {m}\nwalks {}\nself_avoiding {}\nrate {}\nstd_error {}\nwell_behaved {}\n",
                    stats.walks,
                    stats.self_avoiding,
                    stats.rate,
                    stats.std_error,
                    stats.well_behaved.unwrap_or(0)
                ),
                _ => json_line(serde_json::to_value(&stats).map_err(compute)?),
            };
            out.write_all(text.as_bytes()).map_err(compute)
        }
        Command::Surgery { remove } => {
            let g = load(cli)?;
            let m = parse_tuple(remove)?;
            if m.iter().any(|&v| v as usize >= g.n()) {
                return Err(CliError::Usage(format!("--remove has a vertex outside 0..{}", g.n())));
            }
            let x = solve(&g, cli.tol)?;
            let r = remove_and_repair(&g, &x, &m, cli.alpha, cli.tol).map_err(compute)?;
            if let Some(path) = &cli.out {
                write_artifact(cli, line, path, r.z.to_text(&r.induced.graph).as_bytes())?;
            }
            let text = match cli.format {
                OutFormat::Text => {
                    let rep = &r.report;
                    format!(
                        "lambda {}\nshifts {}\nmax_deviation {:e}\nentropy_in {}\nentropy_out {}\nentropy_floor {:?}\nfloor_met {:?}\nb_star_out {}\nhypotheses {:?}\n",
                        rep.lambda, rep.shift_count, rep.max_deviation, rep.entropy_in, rep.entropy_out, rep.entropy_floor, rep.floor_met, rep.b_star_out, rep.hypotheses
                    )
                }
                _ => json_line(serde_json::to_value(&r.report).map_err(compute)?),
            };
            out.write_all(text.as_bytes()).map_err(compute)
        }
        Command::Count { mode } => {
            let g = load(cli)?;
            let text = match mode {
                CountMode::Tight => {
                    let c = count_tight_hamilton_cycles(&g);
                    match cli.format {
                        OutFormat::Text => format!("{}\n", c.value),
                        _ => json_line(json!({"mode": "tight", "count": c.value.to_string(), "nodes": c.nodes_explored, "elapsed_s": c.elapsed})),
                    }
                }
                CountMode::Ell => {
                    let ell = cli.ell.ok_or_else(|| CliError::Usage("--mode ell needs --ell".into()))?;
                    let (u, o) = count_hamilton_ell_cycles(&g, ell).map_err(compute)?;
                    match cli.format {
                        OutFormat::Text => format!("unordered {}\nordered {}\n", u.value, o.value),
                        _ => json_line(json!({"mode": "ell", "ell": ell, "unordered": u.value.to_string(), "ordered": o.value.to_string()})),
                    }
                }
            };
            emit(cli, line, &text, out)
        }
        Command::Path { from, to, budget } => {
            let g = load(cli)?;
            let p = find_hamilton_path_between(&g, &parse_tuple(from)?, &parse_tuple(to)?, *budget).map_err(compute)?;
            let text = match cli.format {
                OutFormat::Text => p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ") + "\n",
                _ => json_line(json!({ "path": p })),
            };
            emit(cli, line, &text, out)
        }
        Command::Pipeline { runs, gate, matching, absorb_delta_hat, absorb_tries, max_resamples, allow_large } => {
            let g = load(cli)?;
            let base = PipelineConfig {
                alpha: cli.alpha,
                beta: cli.beta,
                absorb_delta_hat: *absorb_delta_hat,
                absorb_max_tries: *absorb_tries,
                max_resamples: *max_resamples,
                tol: cli.tol,
                gate: match gate {
                    GateArg::SelfAvoiding => WalkGate::SelfAvoiding,
                    GateArg::WellBehaved => WalkGate::WellBehaved,
                },
                matching: match matching {
                    MatchingArg::Resolve => MatchingMode::Resolve,
                    MatchingArg::Repair => MatchingMode::Repair,
                },
                allow_large: *allow_large,
                ..PipelineConfig::default()
            };
            base.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let mut text = String::new();
            let mut valid = 0;
            for r in 0..*runs {
                let cfg = PipelineConfig { seed: cli.seed + r, ..base.clone() };
                match sample_hamilton_cycle(&g, &cfg) {
                    Ok(c) => {
                        valid += c.validity as u64;
                        match cli.format {
                            OutFormat::Text => text.push_str(&format!(
                                "seed {} valid {} stages {} cycle {}\n",
                                c.seed,
                                c.validity,
                                c.stage_log.len(),
                                c.cycle.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
                            )),
                            _ => {
                                text.push_str(&c.to_json());
                                text.push('\n');
                            }
                        }
                    }
                    Err(e) => match cli.format {
                        OutFormat::Text => text.push_str(&format!("seed {} error {} {}\n", cfg.seed, e.kind(), e)),
                        _ => text.push_str(&json_line(json!({"seed": cfg.seed, "kind": e.kind(), "error": e.to_string()}))),
                    },
                }
            }
            emit(cli, line, &text, out)?;
            if valid == 0 {
                return Err(CliError::Compute("no valid certificate".into()));
            }
            Ok(())
        }
        Command::Bound { exact_guard, slack } => {
            let g = load(cli)?;
            let ell = cli.ell.unwrap_or(g.k() - 1);
            let cfg = SweepConfig { exact_guard: *exact_guard, slack: *slack, tol: cli.tol };
            let name = cli.input.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
            let r = bound_report(&name, &g, ell, &cfg).map_err(compute)?;
            write_rows(cli, line, &[r], out)
        }
        Command::Sweep { files, complete_k, n_from, n_to, exact_guard, slack } => {
            let mut inst: Vec<(String, Hypergraph)> = Vec::new();
            for f in files.iter().chain(cli.input.as_ref()) {
                let (g, _) = Hypergraph::read_edge_file(f).map_err(compute)?;
                inst.push((f.display().to_string(), g));
            }
            if let Some(k) = complete_k {
                for n in (*n_from).max(k + 1)..=*n_to {
                    inst.push((format!("K_{n}^({k})"), Hypergraph::complete(n, *k)));
                }
            }
            let cfg = SweepConfig { exact_guard: *exact_guard, slack: *slack, tol: cli.tol };
            let mut rows = Vec::new();
            let mut failures = Vec::new();
            for (name, g) in &inst {
                let ell = cli.ell.unwrap_or(g.k() - 1);
                match sweep(&[(name.clone(), g.clone())], ell, &cfg).remove(0) {
                    Ok(r) => rows.push(r),
                    Err((name, e)) => failures.push(format!("{name}: {e}")),
                }
            }
            write_rows(cli, line, &rows, out)?;
            for f in failures {
                eprintln!("row error: {f}");
            }
            Ok(())
        }
    }
}

fn write_rows(cli: &Cli, line: &[String], rows: &[BoundReport], out: &mut dyn Write) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match cli.format {
        OutFormat::Csv => emit_report(rows, Format::Csv, None, &mut buf).map_err(compute)?,
        OutFormat::Json => {
            let hash = crate::report::config_hash(&json!({"command": line.get(1..).unwrap_or_default(), "tol": cli.tol}));
            emit_report(rows, Format::Json, Some(&hash), &mut buf).map_err(compute)?
        }
        OutFormat::Text => {
            for r in rows {
                let _ = writeln!(
                    buf,
                    "{} n={} k={} ell={} delta={:.4} h={:.6} t16={:.6} t17={:.6} t18={:.6} exact={} gap={}",
                    r.instance,
                    r.n,
                    r.k,
                    r.ell,
                    r.delta,
                    r.h_bits,
                    r.bound_t16,
                    r.bound_t17,
                    r.bound_t18,
                    r.exact_log2.map_or("-".to_string(), |v| format!("{v:.6}")),
                    r.gap.map_or("-".to_string(), |v| format!("{v:.6}")),
                );
            }
        }
    }
    emit(cli, line, &String::from_utf8(buf).map_err(compute)?, out)
}
