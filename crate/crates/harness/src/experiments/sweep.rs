//! Vanishing-damping sweep: solve at each ε and at ε = 0, then study
//! e(ε) = sup_t of the critical Besov distance to the undamped solution.
//!
//! Smooth data carries a rate: e(ε) is close to linear in ε and in T, and
//! the fitted log-log slope is asserted to sit in the configured window.
//! Rough data carries no rate; only monotone decrease (plus an overall
//! contraction factor across the sweep) is asserted, and the thresholds
//! must stay that way.

use anyhow::Result;

use crate::config::{DatumFamily, ExperimentConfig};
use crate::datum;
use crate::report::{fit_slope, CriterionOutcome, ExperimentReport};

use super::{environment, solve_all, sup_critical_distance, Job, Run};

/// e(ε) for each ε, given the runs and the matching ε = 0 baseline.
fn error_curve(runs: &[(f64, &Run)], baseline: &Run) -> Vec<[f64; 2]> {
    runs.iter()
        .map(|(eps, run)| [*eps, sup_critical_distance(&run.traj, &baseline.traj)])
        .collect()
}

pub fn run_inviscid_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = cfg.grid.build()?;
    let u0 = datum::build(&grid, &cfg.datum)?;
    let t = cfg.params.t_final;
    let dt = cfg.params.dt;
    let smooth = cfg.datum.family == DatumFamily::Bump;

    // ε list plus the ε = 0 baseline; smooth data repeats the set at T/2
    // for the linear-in-T check.
    let mut jobs: Vec<Job> = Vec::new();
    let full: Vec<f64> = cfg.params.epsilons.clone();
    for &eps in full.iter().chain([0.0].iter()) {
        jobs.push(Job {
            label: format!("T={t}/eps={eps}"),
            u0: &u0,
            epsilon: eps,
            t_final: t,
            dt,
        });
    }
    if smooth {
        for &eps in full.iter().chain([0.0].iter()) {
            jobs.push(Job {
                label: format!("T={}/eps={eps}", t / 2.0),
                u0: &u0,
                epsilon: eps,
                t_final: t / 2.0,
                dt,
            });
        }
    }
    let runs = solve_all(cfg, &jobs)?;

    let n_eps = full.len();
    let at_t: Vec<(f64, &Run)> = full.iter().copied().zip(runs.iter()).collect();
    let base_t = &runs[n_eps];
    let errs = error_curve(&at_t, base_t);

    let mut report = ExperimentReport::new("sweep", environment(cfg));
    for r in &runs {
        report.manifests.push(r.manifest.clone());
    }
    report.push_curve("error-vs-epsilon", None, errs.clone());

    // Monotone decrease along the descending ε list.
    let worst_ratio = errs
        .windows(2)
        .map(|w| w[1][1] / w[0][1])
        .fold(0.0, f64::max);
    report.criteria.push(
        CriterionOutcome::at_most("monotone-decrease", worst_ratio, 1.0).with_detail(format!(
            "max e(eps_next)/e(eps) over the sweep; curve {:?}",
            errs.iter().map(|p| p[1]).collect::<Vec<_>>()
        )),
    );

    if smooth {
        let logs: Vec<[f64; 2]> = errs.iter().map(|p| [p[0].ln(), p[1].ln()]).collect();
        let slope = fit_slope(&logs);
        report.criteria.push(
            CriterionOutcome::in_window(
                "rate-slope",
                slope,
                cfg.tolerances.slope_lo,
                cfg.tolerances.slope_hi,
            )
            .with_detail("log-log slope of e(eps), smooth datum"),
        );

        let at_half: Vec<(f64, &Run)> =
            full.iter().copied().zip(runs[n_eps + 1..].iter()).collect();
        let base_half = &runs[2 * n_eps + 1];
        let errs_half = error_curve(&at_half, base_half);
        report.push_curve("error-vs-epsilon-halfT", None, errs_half.clone());
        // Halving T should halve e(eps) in the linear regime.
        let mut worst = 1.0f64;
        for (e, eh) in errs.iter().zip(&errs_half) {
            let ratio = e[1] / (2.0 * eh[1]);
            if (ratio - 1.0).abs() > (worst - 1.0).abs() {
                worst = ratio;
            }
        }
        report.criteria.push(
            CriterionOutcome::in_window(
                "t-linearity",
                worst,
                1.0 - cfg.tolerances.t_linearity,
                1.0 + cfg.tolerances.t_linearity,
            )
            .with_detail(format!("worst e_T / 2 e_T/2 across eps; T={t}")),
        );
    } else {
        // No rate for rough data; assert the overall contraction factor
        // the ε range makes unavoidable under convergence.
        let factor = errs.last().unwrap()[1] / errs[0][1];
        report.criteria.push(
            CriterionOutcome::at_most("tail-contraction", factor, cfg.tolerances.rough_factor)
                .with_detail(format!(
                    "e({}) / e({})",
                    errs.last().unwrap()[0],
                    errs[0][0]
                )),
        );
    }

    Ok(report)
}
