//! Plain solver runs: one trajectory per configured ε, persisted as
//! snapshots plus per-sample norm records.
//!
//! `simulate` asserts nothing beyond finishing without blowup; it exists to
//! produce artifacts (final-state snapshots, norm histories, manifests)
//! that the other experiments and external plotting consume.

use anyhow::{Context, Result};

use llg_core::snapshot::{self, SnapshotMeta};
use llg_core::{lp, records, transform};

use crate::config::ExperimentConfig;
use crate::datum;
use crate::report::{CriterionOutcome, ExperimentReport};

use super::{environment, solve_all, Job};

pub fn run_simulate(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = cfg.grid.build()?;
    let u0 = datum::build(&grid, &cfg.datum)?;
    let jobs: Vec<Job> = cfg
        .params
        .epsilons
        .iter()
        .map(|&eps| Job {
            label: format!("eps={eps}"),
            u0: &u0,
            epsilon: eps,
            t_final: cfg.params.t_final,
            dt: cfg.params.dt,
        })
        .collect();
    let runs = solve_all(cfg, &jobs)?;

    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    let mut report = ExperimentReport::new("simulate", environment(cfg));
    let mut norm_records = Vec::new();
    for (job, run) in jobs.iter().zip(&runs) {
        report.manifests.push(run.manifest.clone());
        let curve: Vec<[f64; 2]> = run
            .traj
            .times()
            .iter()
            .zip(run.traj.snaps())
            .map(|(&t, u)| [t, lp::critical_norm(u)])
            .collect();
        for p in &curve {
            norm_records.push(records::NormRecord::new(
                format!("{}/t={}", run.manifest.hash, p[0]),
                "critical-besov",
                p[1],
            ));
        }
        report.push_curve(
            format!("critical-norm-vs-time/{}", job.label),
            Some(&run.manifest),
            curve,
        );

        let last = run.traj.last();
        let meta = SnapshotMeta {
            time: *run.traj.times().last().unwrap(),
            epsilon: job.epsilon,
            a: cfg.params.a,
        };
        let path = cfg.out_dir.join(format!("final-{}.llgf", job.label.replace('=', "-")));
        snapshot::save_complex(&path, &transform::inverse(last), &meta)?;

        report.criteria.push(
            CriterionOutcome::new(
                format!("completed/{}", job.label),
                true,
                *run.traj.times().last().unwrap(),
                cfg.params.t_final,
                format!("{} samples, no blowup", run.traj.len()),
            ),
        );
    }
    records::write_ndjson(&cfg.out_dir.join("norms.ndjson"), norm_records.iter())?;
    Ok(report)
}
