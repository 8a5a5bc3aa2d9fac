//! Experiment harness for the spectral LLG/dGL solver.
//!
//! The library side holds everything the CLI does: config parsing and
//! validation, seeded synthetic data, the experiment drivers, and report
//! serialization.  The binary is a thin wrapper so integration tests can
//! call the same entry points the command line uses.

pub mod config;
pub mod datum;
pub mod experiments;
pub mod report;

use std::path::Path;

use anyhow::Result;

use config::{ExperimentConfig, ExperimentKind, Overrides};
use report::ExperimentReport;

/// Load a config, apply CLI overrides, run the experiment, and persist the
/// report (NDJSON plus plot data) under the configured output directory.
/// Returns the report; the caller decides the exit code from `passed()`.
pub fn run_from_config(
    kind: ExperimentKind,
    config_path: &Path,
    overrides: &Overrides,
) -> Result<ExperimentReport> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    overrides.apply(&mut cfg)?;
    match experiments::run(kind, &cfg) {
        Ok(report) => {
            persist(&report, &cfg)?;
            Ok(report)
        }
        Err(err) => {
            // A failed solve still leaves a partial report behind so the
            // run is diagnosable from the output directory alone.
            let mut partial =
                ExperimentReport::new(kind.to_string(), experiments::environment(&cfg));
            partial.criteria.push(report::CriterionOutcome::new(
                "run-completed",
                false,
                0.0,
                0.0,
                format!("{err:#}"),
            ));
            let _ = persist(&partial, &cfg);
            Err(err)
        }
    }
}

/// Write `report.ndjson` and one plot file per curve into `cfg.out_dir`.
pub fn persist(report: &ExperimentReport, cfg: &ExperimentConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    report.write_ndjson(&cfg.out_dir.join("report.ndjson"))?;
    report.emit_plotdata(&cfg.out_dir.join("plots"))?;
    Ok(())
}
