use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use llg_harness::config::{ExperimentKind, Overrides};

/// Batch experiment driver for the spectral LLG/dGL solver.
#[derive(Parser)]
#[command(name = "llg-harness", version, about)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Run the solver per configured ε and persist snapshots and norms.
    Simulate(CommonArgs),
    /// Vanishing-damping sweep against the ε = 0 solution.
    Sweep(CommonArgs),
    /// Three-term low-frequency truncation study.
    Truncate(CommonArgs),
    /// Sphere path vs projected path under Δt refinement.
    Equivalence(CommonArgs),
    /// Invariant battery over all library modules.
    Selftest(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration (JSON; see schemas/config.schema.json).
    #[arg(long)]
    config: PathBuf,
    /// Replace the ε list (repeatable; sorted descending automatically).
    #[arg(long = "epsilon")]
    epsilon: Vec<f64>,
    /// Replace the grid, e.g. "32x32x32".
    #[arg(long)]
    grid: Option<String>,
    /// Replace the final time.
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Replace the step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Replace the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            epsilon: self.epsilon.clone(),
            grid: self.grid.clone(),
            t_final: self.t_final,
            dt: self.dt,
            out: self.out.clone(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.verb {
        Verb::Simulate(a) => (ExperimentKind::Simulate, a),
        Verb::Sweep(a) => (ExperimentKind::Sweep, a),
        Verb::Truncate(a) => (ExperimentKind::Truncate, a),
        Verb::Equivalence(a) => (ExperimentKind::Equivalence, a),
        Verb::Selftest(a) => (ExperimentKind::Selftest, a),
    };
    match llg_harness::run_from_config(kind, &args.config, &args.overrides()) {
        Ok(report) => {
            if report.print_summary() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
