//! Low-frequency truncation study.
//!
//! For a rough datum φ and cutoff K, split the damped-vs-undamped solution
//! gap into three legs through the truncated datum φ_K = P_{≤K} φ:
//!
//!   term 1:  S^ε(φ)   vs S^ε(φ_K)   (damped flow feels only the tail)
//!   term 2:  S^ε(φ_K) vs S^0(φ_K)   (vanishing damping at fixed K)
//!   term 3:  S^0(φ_K) vs S^0(φ)     (undamped flow feels only the tail)
//!
//! Terms 1 and 3 are controlled by the tail norm ‖φ − φ_K‖ with a stability
//! constant that must stay bounded uniformly in ε; term 2 vanishes linearly
//! in ε because φ_K is smooth.

use anyhow::Result;

use llg_core::{lp, SpectralField};

use crate::config::ExperimentConfig;
use crate::datum;
use crate::report::{fit_slope, CriterionOutcome, ExperimentReport};

use super::{environment, solve_all, sup_critical_distance, Job, Run};

pub fn run_truncation_study(cfg: &ExperimentConfig, levels: &[i32]) -> Result<ExperimentReport> {
    let grid = cfg.grid.build()?;
    let phi = datum::build(&grid, &cfg.datum)?;
    let truncated: Vec<(i32, SpectralField)> = levels
        .iter()
        .map(|&k| Ok((k, lp::project_below(&phi, k)?)))
        .collect::<Result<_>>()?;

    // Jobs: every datum variant (full first, then each φ_K) at every ε in
    // the list plus ε = 0.
    let t = cfg.params.t_final;
    let dt = cfg.params.dt;
    let eps_all: Vec<f64> = cfg.params.epsilons.iter().copied().chain([0.0]).collect();
    let variants: Vec<(String, &SpectralField)> = std::iter::once(("full".to_string(), &phi))
        .chain(truncated.iter().map(|(k, f)| (format!("K={k}"), f)))
        .collect();
    let jobs: Vec<Job> = variants
        .iter()
        .flat_map(|(name, u0)| {
            eps_all.iter().map(move |&eps| Job {
                label: format!("{name}/eps={eps}"),
                u0,
                epsilon: eps,
                t_final: t,
                dt,
            })
        })
        .collect();
    let runs = solve_all(cfg, &jobs)?;
    let n_eps = eps_all.len();
    let block = |v: usize| -> &[Run] { &runs[v * n_eps..(v + 1) * n_eps] };
    let full = block(0);

    let mut report = ExperimentReport::new("truncate", environment(cfg));
    for r in &runs {
        report.manifests.push(r.manifest.clone());
    }

    let mut tail_curve = Vec::new();
    for (v, (k, phi_k)) in truncated.iter().enumerate() {
        let trunc = block(v + 1);
        let tail = lp::critical_norm(&phi.sub(phi_k));
        tail_curve.push([*k as f64, tail]);

        let term1: Vec<f64> = (0..n_eps - 1)
            .map(|i| sup_critical_distance(&full[i].traj, &trunc[i].traj))
            .collect();
        let term3 = sup_critical_distance(&full[n_eps - 1].traj, &trunc[n_eps - 1].traj);
        let term2: Vec<[f64; 2]> = (0..n_eps - 1)
            .map(|i| [eps_all[i], sup_critical_distance(&trunc[i].traj, &trunc[n_eps - 1].traj)])
            .collect();
        report.push_curve(format!("term2-vs-epsilon/K={k}"), None, term2.clone());

        if tail <= 1e-14 {
            // Band-limited datum: the flows of φ and φ_K coincide.
            let worst = term1.iter().copied().fold(term3, f64::max);
            report.criteria.push(
                CriterionOutcome::at_most(format!("tail-vanishes/K={k}"), worst, 1e-10)
                    .with_detail("datum already band-limited below K"),
            );
            continue;
        }

        let c1 = term1.iter().copied().fold(0.0, f64::max) / tail;
        let c3 = term3 / tail;
        report.criteria.push(
            CriterionOutcome::at_most(
                format!("term1-stability/K={k}"),
                c1,
                cfg.tolerances.stability_factor,
            )
            .with_detail(format!("sup over eps of term1 / tail, tail {tail:.3e}")),
        );
        report.criteria.push(
            CriterionOutcome::at_most(
                format!("term3-stability/K={k}"),
                c3,
                cfg.tolerances.stability_factor,
            )
            .with_detail(format!("term3 / tail, tail {tail:.3e}")),
        );

        if term2.len() >= 2 {
            let logs: Vec<[f64; 2]> = term2.iter().map(|p| [p[0].ln(), p[1].ln()]).collect();
            let slope = fit_slope(&logs);
            report.criteria.push(
                CriterionOutcome::in_window(
                    format!("term2-slope/K={k}"),
                    slope,
                    cfg.tolerances.slope_lo,
                    cfg.tolerances.slope_hi,
                )
                .with_detail(format!(
                    "term2 {:?}",
                    term2.iter().map(|p| p[1]).collect::<Vec<_>>()
                )),
            );
        }
    }
    report.push_curve("tail-vs-K", None, tail_curve);
    Ok(report)
}
