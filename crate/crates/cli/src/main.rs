use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use cforge::{run, run_manifest, Command, GenKind, RunConfig};
use clap::Parser;

/// Constructive commutator, nilpotent, determinant and Cuntz-comparison
/// computations with verified JSON reports.
///
/// Exit status: 0 all checks pass, 1 a bound check failed, 2 invalid input,
/// 3 numerical non-convergence.
#[derive(Debug, Parser)]
#[command(name = "cforge", version)]
struct Args {
    /// Operation to run.
    #[arg(long, value_enum, required_unless_present = "jobs")]
    cmd: Option<Command>,
    /// Input instance (JSON).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Report path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Numerical tolerance, in (0, 1e-2).
    #[arg(long, env = "CFORGE_TOL", default_value_t = 1e-10)]
    tol: f64,
    /// Seed for `gen`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension for `gen`, amplification for `peel`, search bound for `compare`.
    #[arg(long)]
    n: Option<usize>,
    /// Power for `regroup` and `suzuki`, factor count for `gen --kind unitary_path`.
    #[arg(long = "N")]
    big_n: Option<usize>,
    /// Strict-comparison gap.
    #[arg(long)]
    gamma: Option<f64>,
    /// Cut-down level for the epsilon-delta witness.
    #[arg(long)]
    eps: Option<f64>,
    /// Partition grid size (`nilify`, `bridge`) or samples per path leg (`det`, `gen`).
    #[arg(long)]
    grid: Option<usize>,
    /// Run every job of a JSON manifest (an array of configurations).
    #[arg(long)]
    jobs: Option<PathBuf>,
    /// Leave delegated terms of `nilify` unresolved.
    #[arg(long)]
    report_only: bool,
    /// Instance kind for `gen`.
    #[arg(long, value_enum)]
    kind: Option<GenKind>,
    /// Tower depth (`fack_tower`) or block count (`cu_instance`) for `gen`.
    #[arg(long)]
    depth: Option<usize>,
    /// Comparison multiplicity for `gen --kind fack_tower`.
    #[arg(long = "L")]
    l: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    let code = match (&args.jobs, args.cmd) {
        (Some(path), _) => {
            let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
            match std::fs::read_to_string(path) {
                Ok(text) => run_manifest(&text, threads).unwrap_or_else(|e| {
                    eprintln!("error: {e}");
                    e.exit_code()
                }),
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    2
                }
            }
        }
        (None, Some(command)) => run(&RunConfig {
            command,
            input: args.input,
            output: args.out,
            tol: args.tol,
            seed: args.seed,
            n: args.n,
            big_n: args.big_n,
            gamma: args.gamma,
            eps: args.eps,
            grid: args.grid,
            report_only: args.report_only,
            kind: args.kind,
            depth: args.depth,
            l: args.l,
        }),
        (None, None) => unreachable!("clap requires --cmd or --jobs"),
    };
    // timing stays off the report so reruns are byte-identical
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(code as u8)
}
