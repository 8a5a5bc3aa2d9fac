//! Sphere path vs projected path: evolve the same datum with the
//! sphere-valued integrator and with the complex-scalar integrator plus
//! inverse projection, then compare.
//!
//! Both integrators are fourth order, so the discrepancy between the
//! paths contracts like Δt⁴ under refinement and its size at the finest
//! step is asserted directly.  The check is repeated for every configured
//! ε: the projection is a change of variables, not a property of one
//! parameter regime.

use anyhow::{Context, Result};
use rayon::prelude::*;

use llg_core::evolve::{self, Trajectory};
use llg_core::sphere::{self, LlgParams, SphereField};
use llg_core::{lp, transform, SpectralField};

use crate::config::{stride_for, ExperimentConfig};
use crate::datum;
use crate::report::{fit_slope, CriterionOutcome, ExperimentReport, TrajectoryManifest};

use super::environment;

/// Discrepancies between the two paths at one (ε, Δt) cell.
struct Cell {
    manifest: TrajectoryManifest,
    /// sup over samples and points of the Euclidean gap on the sphere.
    pointwise: f64,
    /// sup over samples of the critical Besov gap of the projections.
    besov: f64,
}

fn compare_paths(
    sphere_traj: &Trajectory<SphereField>,
    dgl_traj: &Trajectory<SpectralField>,
) -> Result<(f64, f64)> {
    let mut pointwise = 0.0f64;
    let mut besov = 0.0f64;
    for (s, u) in sphere_traj.snaps().iter().zip(dgl_traj.snaps()) {
        let lifted = sphere::inverse_stereographic(&transform::inverse(u));
        pointwise = pointwise.max(s.vector().sub(lifted.vector()).linf_norm());
        let projected = transform::forward_complex(&sphere::stereographic(s)?);
        besov = besov.max(lp::critical_norm(&projected.sub(u)));
    }
    Ok((pointwise, besov))
}

fn solve_cell(
    cfg: &ExperimentConfig,
    u0: &SpectralField,
    s0: &SphereField,
    epsilon: f64,
    dt: f64,
) -> Result<Cell> {
    let params = LlgParams::new(cfg.params.a, epsilon)?;
    let t = cfg.params.t_final;
    let steps = (t / dt).round().max(1.0) as usize;
    let stride = stride_for(steps, 8);
    let label = format!("eps={epsilon}/dt={dt}");
    let sphere_traj = evolve::solve_llg(s0, &params, t, dt, stride)
        .with_context(|| format!("sphere path {label}"))?;
    let dgl_traj = evolve::solve_dgl(u0, &params, t, dt, stride)
        .with_context(|| format!("projected path {label}"))?;
    let (pointwise, besov) = compare_paths(&sphere_traj, &dgl_traj)?;
    let manifest = TrajectoryManifest::new(
        label,
        u0.grid(),
        cfg.params.a,
        epsilon,
        t,
        sphere_traj.dt() / stride as f64,
        stride,
        "rk4-projected|if-rk4",
        &cfg.datum,
    );
    Ok(Cell { manifest, pointwise, besov })
}

pub fn run_equivalence_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = cfg.grid.build()?;
    let u0 = datum::build(&grid, &cfg.datum)?;
    let s0 = sphere::inverse_stereographic(&transform::inverse(&u0));

    let jobs: Vec<(f64, f64)> = cfg
        .params
        .epsilons
        .iter()
        .flat_map(|&eps| cfg.dt_list.iter().map(move |&dt| (eps, dt)))
        .collect();
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(eps, dt)| solve_cell(cfg, &u0, &s0, eps, dt))
        .collect::<Result<_>>()?;

    let mut report = ExperimentReport::new("equivalence", environment(cfg));
    let n_dt = cfg.dt_list.len();
    for (i, &eps) in cfg.params.epsilons.iter().enumerate() {
        let block = &cells[i * n_dt..(i + 1) * n_dt];
        for c in block {
            report.manifests.push(c.manifest.clone());
        }
        let sup_points: Vec<[f64; 2]> =
            cfg.dt_list.iter().zip(block).map(|(&dt, c)| [dt, c.pointwise]).collect();
        let besov_points: Vec<[f64; 2]> =
            cfg.dt_list.iter().zip(block).map(|(&dt, c)| [dt, c.besov]).collect();
        report.push_curve(format!("discrepancy-sup-vs-dt/eps={eps}"), None, sup_points.clone());
        report.push_curve(format!("discrepancy-besov-vs-dt/eps={eps}"), None, besov_points);

        let finest = block.last().unwrap();
        report.criteria.push(
            CriterionOutcome::at_most(
                format!("sup-discrepancy/eps={eps}"),
                finest.pointwise,
                cfg.tolerances.equivalence_sup,
            )
            .with_detail(format!("at dt={}", cfg.dt_list[n_dt - 1])),
        );
        if n_dt >= 2 {
            let logs: Vec<[f64; 2]> =
                sup_points.iter().map(|p| [p[0].ln(), p[1].ln()]).collect();
            let order = fit_slope(&logs);
            report.criteria.push(
                CriterionOutcome::in_window(
                    format!("refinement-order/eps={eps}"),
                    order,
                    4.0 - cfg.tolerances.order_window,
                    4.0 + cfg.tolerances.order_window,
                )
                .with_detail(format!(
                    "sup discrepancies {:?}",
                    sup_points.iter().map(|p| p[1]).collect::<Vec<_>>()
                )),
            );
        }
    }
    Ok(report)
}
