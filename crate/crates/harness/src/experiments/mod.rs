//! Experiment drivers, one per CLI verb.
//!
//! Solves for distinct (ε, Δt) cells run concurrently through rayon's
//! indexed maps, so aggregation order is fixed by the job list and the
//! emitted report is identical regardless of worker count.

use anyhow::{Context, Result};
use rayon::prelude::*;

use llg_core::evolve::{self, Trajectory};
use llg_core::sphere::LlgParams;
use llg_core::{lp, SpectralField};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::{Environment, ExperimentReport, TrajectoryManifest};

pub mod equivalence;
pub mod selftest;
pub mod simulate;
pub mod sweep;
pub mod truncate;

pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.check_kind(kind)?;
    match kind {
        ExperimentKind::Simulate => simulate::run_simulate(cfg),
        ExperimentKind::Sweep => sweep::run_inviscid_sweep(cfg),
        ExperimentKind::Truncate => truncate::run_truncation_study(cfg, &cfg.truncation_levels),
        ExperimentKind::Equivalence => equivalence::run_equivalence_check(cfg),
        ExperimentKind::Selftest => selftest::run_lp_selftest(cfg),
    }
}

pub fn environment(cfg: &ExperimentConfig) -> Environment {
    Environment {
        package_version: env!("CARGO_PKG_VERSION").into(),
        grid_sizes: cfg.grid.sizes.clone(),
        dt: cfg.params.dt,
        t_final: cfg.params.t_final,
        seed: cfg.datum.seed,
    }
}

/// A finished solve and the manifest that identifies it.
pub(crate) struct Run {
    pub manifest: TrajectoryManifest,
    pub traj: Trajectory<SpectralField>,
}

/// One (label, ε, T, Δt) solver job on a shared datum.
#[derive(Clone)]
pub(crate) struct Job<'a> {
    pub label: String,
    pub u0: &'a SpectralField,
    pub epsilon: f64,
    pub t_final: f64,
    pub dt: f64,
}

impl Job<'_> {
    pub(crate) fn solve(&self, cfg: &ExperimentConfig) -> Result<Run> {
        let params = LlgParams::new(cfg.params.a, self.epsilon)?;
        let steps = (self.t_final / self.dt).round().max(1.0) as usize;
        let stride = cfg.pick_stride(steps);
        let traj = evolve::solve_dgl(self.u0, &params, self.t_final, self.dt, stride)
            .with_context(|| format!("solving {}", self.label))?;
        let manifest = TrajectoryManifest::new(
            &self.label,
            self.u0.grid(),
            cfg.params.a,
            self.epsilon,
            self.t_final,
            traj.dt() / stride as f64,
            stride,
            &traj.meta.integrator,
            &cfg.datum,
        );
        Ok(Run { manifest, traj })
    }
}

/// Solve all jobs concurrently; output order follows the job list.
pub(crate) fn solve_all(cfg: &ExperimentConfig, jobs: &[Job<'_>]) -> Result<Vec<Run>> {
    jobs.par_iter().map(|job| job.solve(cfg)).collect()
}

/// sup over sample times of the critical Besov distance between two
/// trajectories sampled on the same time grid.
pub fn sup_critical_distance(
    a: &Trajectory<SpectralField>,
    b: &Trajectory<SpectralField>,
) -> f64 {
    a.snaps()
        .iter()
        .zip(b.snaps())
        .map(|(x, y)| lp::critical_norm(&x.sub(y)))
        .fold(0.0, f64::max)
}

/// sup over sample times of the critical Besov norm along one trajectory.
pub fn sup_critical_norm(t: &Trajectory<SpectralField>) -> f64 {
    t.snaps().iter().map(lp::critical_norm).fold(0.0, f64::max)
}
