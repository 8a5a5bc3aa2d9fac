//! Acceptance battery: one test per shipped guarantee, each printing a
//! single verdict line (run with `--nocapture` to see them on success).
//!
//! The numbered prefixes fix the report order; every check drives the
//! public library surface end to end, several through the configs shipped
//! in `configs/`.

use std::path::Path;
use std::time::Instant;

use llg_core::evolve;
use llg_core::spacetime::{self, SpaceTimeField, TimeWindow};
use llg_core::sphere::LlgParams;
use llg_core::{lp, Grid, SpectralField};

use llg_harness::config::{DatumFamily, DatumSpec, ExperimentConfig, ExperimentKind};
use llg_harness::datum;
use llg_harness::experiments::{self, selftest};
use llg_harness::report::fit_slope;

fn verdict(tag: &str, pass: bool, detail: String) {
    println!("{}  {tag}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{tag}: {detail}");
}

fn bump(amplitude: f64, seed: u64) -> DatumSpec {
    DatumSpec {
        family: DatumFamily::Bump,
        amplitude,
        seed,
        width: 0.8,
        twist: 1,
        shell_decay: 2.0,
        shells: [1, 3],
    }
}

fn shell_random(amplitude: f64, seed: u64) -> DatumSpec {
    DatumSpec {
        family: DatumFamily::ShellRandom,
        amplitude,
        seed,
        width: 0.8,
        twist: 1,
        shell_decay: 3.0,
        shells: [1, 4],
    }
}

fn shipped_config(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    let mut cfg = ExperimentConfig::load(&path).expect("shipped config loads");
    cfg.out_dir = std::env::temp_dir().join("llg-acceptance");
    cfg
}

#[test]
fn c01_dyadic_shells_partition_unity_on_a_64_cubed_grid() {
    let grid = Grid::cubic(3, 64).unwrap();
    let t0 = Instant::now();
    let defect = selftest::partition_defect(&grid);
    let elapsed = t0.elapsed().as_secs_f64();
    verdict(
        "shell partition of unity",
        defect <= 1e-12 && elapsed < 1.0,
        format!("defect {defect:.3e} (tol 1e-12), {elapsed:.3} s on 64^3 (budget 1 s)"),
    );
}

#[test]
fn c02_stereographic_round_trips_a_thousand_random_fields() {
    let (roundtrip, unit) = selftest::projection_roundtrips(1000, 2026).unwrap();
    verdict(
        "projection round-trips",
        roundtrip <= 1e-12 && unit <= 1e-14,
        format!("worst round-trip {roundtrip:.3e} (tol 1e-12), worst unit defect {unit:.3e} (tol 1e-14)"),
    );
}

#[test]
fn c03_null_form_identity_and_dual_norm_routes_hold_on_solver_output() {
    let grid = Grid::cubic(3, 32).unwrap();
    let u0 = datum::build(&grid, &bump(0.02, 2026)).unwrap();
    let params = LlgParams::new(1.0, 1.0).unwrap();
    // The time sampling must outresolve the fastest dispersive phase by a
    // wide margin or the periodized product aliases above the tolerance.
    let traj = evolve::solve_dgl(&u0, &params, 0.25, 6.25e-4, 1).unwrap();
    let f = SpaceTimeField::from_trajectory(&traj, Some(TimeWindow::new(0.8).unwrap())).unwrap();
    let residual = spacetime::null_identity_residual(&f, &f).unwrap();
    let x = f.x01_norm();
    let rel = (x.value - x.via_physical).abs() / x.value;
    verdict(
        "exact identities on solver output",
        residual <= 1e-8 && rel <= 1e-10,
        format!("null residual {residual:.3e} (tol 1e-8), dual-route gap {rel:.3e} relative (tol 1e-10)"),
    );
}

#[test]
fn c04_time_stepping_converges_at_fourth_order_for_each_damping() {
    let t0 = Instant::now();
    let grid = Grid::cubic(3, 32).unwrap();
    // Amplitude large enough that the dt^4 error of the exponential
    // integrator sits well above roundoff over the whole halving range;
    // at sweep-scale amplitudes the differences bottom out near 1e-15.
    let u0 = datum::build(&grid, &bump(0.2, 2026)).unwrap();
    let dts = [5e-2, 2.5e-2, 1.25e-2, 6.25e-3];
    let mut lines = Vec::new();
    let mut ok = true;
    for eps in [0.0, 0.1, 1.0] {
        let params = LlgParams::new(1.0, eps).unwrap();
        let finals: Vec<SpectralField> = dts
            .iter()
            .map(|&dt| {
                let steps = (0.25_f64 / dt).round() as usize;
                evolve::solve_dgl(&u0, &params, 0.25, dt, steps)
                    .unwrap()
                    .last()
                    .clone()
            })
            .collect();
        // Consecutive-halving differences decay like dt^4 without needing
        // an exact reference solution.
        let ds: Vec<f64> = (0..dts.len() - 1)
            .map(|i| lp::critical_norm(&finals[i].sub(&finals[i + 1])))
            .collect();
        let pts: Vec<[f64; 2]> = ds
            .iter()
            .enumerate()
            .map(|(i, d)| [dts[i].ln(), d.ln()])
            .collect();
        let slope = fit_slope(&pts);
        ok &= (slope - 4.0).abs() <= 0.3;
        let dtxt: Vec<String> = ds.iter().map(|d| format!("{d:.3e}")).collect();
        lines.push(format!("eps={eps}: order {slope:.3} (diffs {})", dtxt.join(" ")));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    ok &= elapsed < 300.0;
    verdict(
        "integrator order",
        ok,
        format!("{} (window 4 +- 0.3), {elapsed:.1} s (budget 300 s)", lines.join(", ")),
    );
}

#[test]
fn c05_sphere_and_projected_paths_agree_to_fourth_order() {
    let cfg = shipped_config("equivalence.json");
    let report = experiments::run(ExperimentKind::Equivalence, &cfg).unwrap();
    let ok = report.print_summary();
    let mut lines: Vec<String> = report
        .criteria
        .iter()
        .map(|c| format!("{} {:.3e}", c.name, c.value))
        .collect();
    // The discrepancy must already be tiny at dt = 2.5e-3, not only at the
    // finest refinement cell.
    let mut at_op = true;
    for curve in report
        .curves
        .iter()
        .filter(|c| c.name.starts_with("discrepancy-sup-vs-dt/"))
    {
        let p = curve
            .points
            .iter()
            .find(|p| (p[0] - 2.5e-3).abs() < 1e-9)
            .expect("2.5e-3 cell present");
        at_op &= p[1] <= 1e-5;
        lines.push(format!("{} at dt=2.5e-3: {:.3e}", curve.name, p[1]));
    }
    verdict("formulation equivalence", ok && at_op, lines.join(", "));
}

#[test]
fn c06_small_data_stays_small_uniformly_in_damping_and_picard_contracts() {
    let grid = Grid::cubic(3, 32).unwrap();
    let delta = 0.02;
    let u0 = datum::build(&grid, &bump(delta, 2026)).unwrap();
    let mut worst_sup = 0.0f64;
    for eps in [0.0, 1e-3, 1e-2, 1e-1, 1.0] {
        let params = LlgParams::new(1.0, eps).unwrap();
        let traj = evolve::solve_dgl(&u0, &params, 0.25, 2.5e-3, 2).unwrap();
        worst_sup = worst_sup.max(experiments::sup_critical_norm(&traj));
    }
    let mut worst_ratio = 0.0f64;
    for eps in [0.0, 1.0] {
        let params = LlgParams::new(1.0, eps).unwrap();
        let run = evolve::picard_iterate(&u0, &params, 0.25, 26, 5).unwrap();
        for m in 1..=4 {
            if run.distances[m - 1] > 0.0 {
                worst_ratio = worst_ratio.max(run.distances[m] / run.distances[m - 1]);
            }
        }
    }
    verdict(
        "uniform smallness and contraction",
        worst_sup <= 5.0 * delta && worst_ratio <= 0.5,
        format!(
            "sup critical norm {worst_sup:.4} (tol {}), worst Picard ratio {worst_ratio:.3e} (tol 0.5)",
            5.0 * delta
        ),
    );
}

#[test]
fn c07_rough_data_errors_vanish_monotonically_with_damping() {
    let cfg = shipped_config("sweep-rough.json");
    let report = experiments::run(ExperimentKind::Sweep, &cfg).unwrap();
    let ok = report.print_summary();
    let lines: Vec<String> = report
        .criteria
        .iter()
        .map(|c| format!("{} {:.3e}", c.name, c.value))
        .collect();
    verdict("rough-data inviscid limit", ok, lines.join(", "));
}

#[test]
fn c08_smooth_data_error_is_linear_in_damping_and_time() {
    let t0 = Instant::now();
    let cfg = shipped_config("sweep-smooth.json");
    let report = experiments::run(ExperimentKind::Sweep, &cfg).unwrap();
    let ok = report.print_summary();
    let elapsed = t0.elapsed().as_secs_f64();
    let lines: Vec<String> = report
        .criteria
        .iter()
        .map(|c| format!("{} {:.3e}", c.name, c.value))
        .collect();
    verdict(
        "smooth-data inviscid rate",
        ok && elapsed < 1800.0,
        format!("{}, {elapsed:.1} s (budget 1800 s)", lines.join(", ")),
    );
}

#[test]
fn c09_heat_flow_dirichlet_energy_never_increases() {
    let (worst_rise, _) = selftest::heat_flow_checks(2026).unwrap();
    verdict(
        "dissipative monotonicity",
        worst_rise <= 1e-9,
        format!("worst one-step energy change {worst_rise:.3e} (tol 1e-9)"),
    );
}

#[test]
fn c10_critical_norm_survives_dyadic_dilation() {
    let grid = Grid::cubic(3, 32).unwrap();
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (label, spec) in [
        ("smooth", bump(0.05, 2026)),
        ("rough", shell_random(0.1, 2026)),
    ] {
        let u0 = datum::build(&grid, &spec).unwrap();
        let dilated = evolve::dilate(&u0, 2).unwrap();
        let base = lp::critical_norm(&u0);
        let drift = (lp::critical_norm(&dilated) - base).abs() / base;
        worst = worst.max(drift);
        lines.push(format!("{label} drift {drift:.3e}"));
    }
    verdict(
        "critical-norm scaling invariance",
        worst <= 5e-2,
        format!("{} (tol 5e-2)", lines.join(", ")),
    );
}
