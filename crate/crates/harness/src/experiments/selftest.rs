//! Invariant battery: runtime re-checks of the core library's structural
//! guarantees, sized by the config.
//!
//! Each check mirrors a property the library is built around (partition of
//! unity, projection round-trips, cubic smallness of the nonlinearity,
//! semigroup structure, integral-equation consistency, exact space-time
//! identities, scaling invariance, energy decay).  The battery is what CI
//! and fresh checkouts run first; thresholds are roundoff-scale where the
//! property is exact and rate-scale where it is asymptotic.

use anyhow::Result;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use llg_core::evolve;
use llg_core::spacetime::{self, SpaceTimeField, TimeWindow};
use llg_core::sphere::{self, LlgParams, SphereField, VectorField3};
use llg_core::{dgl, lp, transform, ComplexField, Grid, SpectralField};

use crate::config::ExperimentConfig;
use crate::datum;
use crate::report::{CriterionOutcome, ExperimentReport};

use super::environment;

fn random_spectral(grid: &Grid, amp: f64, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut f = SpectralField::zeros(grid.clone());
    for v in f.data_mut() {
        *v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * amp;
    }
    transform::dealias(&f)
}

/// Worst deviation of the shell sum from 1 over nonzero grid wavevectors.
pub fn partition_defect(grid: &Grid) -> f64 {
    let range = lp::grid_shell_range(grid);
    let mut worst = 0.0f64;
    for k2 in grid.k_squared().iter().skip(1) {
        let r = k2.sqrt();
        let total: f64 = range.iter().map(|k| lp::chi(k, r)).sum();
        worst = worst.max((total - 1.0).abs());
    }
    worst
}

/// Both projection round-trips plus the unit-length defect over `samples`
/// seeded random fields.  Returns (worst round-trip, worst unit defect).
pub fn projection_roundtrips(samples: usize, seed: u64) -> Result<(f64, f64)> {
    let grid = Grid::cubic(3, 8)?;
    let n = grid.num_points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_rt = 0.0f64;
    let mut worst_unit = 0.0f64;
    for _ in 0..samples {
        // Complex side: small field, chart center region.
        let data: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-0.45..0.45), rng.random_range(-0.45..0.45)))
            .collect();
        let u = ComplexField::from_data(grid.clone(), data)?;
        let s = sphere::inverse_stereographic(&u);
        worst_unit = worst_unit.max(s.max_unit_defect());
        let back = sphere::stereographic(&s)?;
        let d1 = u
            .data()
            .iter()
            .zip(back.data())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);

        // Sphere side: random unit vectors kept away from the south pole.
        let mut comps = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for i in 0..n {
            let mut v = [0.0f64; 3];
            loop {
                for w in &mut v {
                    *w = rng.random_range(-1.0..1.0);
                }
                let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if r > 0.2 {
                    for w in &mut v {
                        *w /= r;
                    }
                    break;
                }
            }
            if v[2] < -0.8 {
                v[2] = -v[2];
            }
            for (c, w) in comps.iter_mut().zip(v) {
                c[i] = w;
            }
        }
        let s = SphereField::from_components(grid.clone(), comps)?;
        let u2 = sphere::stereographic(&s)?;
        let s2 = sphere::inverse_stereographic(&u2);
        let d2 = s.vector().sub(s2.vector()).linf_norm();
        worst_rt = worst_rt.max(d1.max(d2));
    }
    Ok((worst_rt, worst_unit))
}

/// Ratio drift of ‖G(δu)‖/δ³ across two decades of δ.
fn cubic_scaling_drift(seed: u64) -> Result<f64> {
    let grid = Grid::cubic(2, 16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = random_spectral(&grid, 0.02, &mut rng);
    let ratio = |delta: f64| {
        let mut v = base.clone();
        v.scale(Complex64::from(delta));
        dgl::g_nonlinearity(&v).l2_norm() / delta.powi(3)
    };
    let r1 = ratio(1e-1);
    let r2 = ratio(1e-2);
    Ok((r1 / r2 - 1.0).abs())
}

/// Relative semigroup defect E(t)E(s) vs E(t+s) and the mass balance of
/// the damped propagator.
fn propagator_checks(seed: u64) -> Result<(f64, f64)> {
    let grid = Grid::cubic(1, 64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_spectral(&grid, 1.0, &mut rng);
    let params = LlgParams::new(1.0, 0.3)?;
    let (t, s) = (0.07, 0.05);
    let two = evolve::linear_propagate(&evolve::linear_propagate(&u, &params, t)?, &params, s)?;
    let one = evolve::linear_propagate(&u, &params, t + s)?;
    let semigroup = two.sub(&one).l2_norm() / one.l2_norm();

    let free = LlgParams::new(1.0, 0.0)?;
    let rotated = evolve::linear_propagate(&u, &free, 0.3)?;
    let mass = (rotated.l2_norm() / u.l2_norm() - 1.0).abs();
    Ok((semigroup, mass))
}

/// Defect of a solver trajectory under the integral-equation map at a
/// modest sample count; fourth order in the sample spacing.
fn duhamel_defect() -> Result<f64> {
    let grid = Grid::cubic(1, 64)?;
    let u0 = transform::dealias(&transform::forward_complex(&ComplexField::from_fn(
        grid.clone(),
        |x| {
            Complex64::from_polar(0.05, x[0])
                + Complex64::from_polar(0.02, -2.0 * x[0] + 0.4)
        },
    )));
    let params = LlgParams::new(1.0, 0.2)?;
    let t = 0.5;
    let traj = evolve::solve_dgl(&u0, &params, t, t / 512.0, 32)?;
    let mapped = evolve::duhamel_map(&traj.snaps()[0], &traj, &params)?;
    let defect = traj
        .snaps()
        .iter()
        .zip(mapped.snaps())
        .map(|(a, b)| a.sub(b).l2_norm())
        .fold(0.0, f64::max);
    Ok(defect)
}

/// Space-time coefficient array with a few prescribed (time mode, space
/// mode) entries, low enough that products stay on the lattice.
fn synthetic_joint(
    grid: &Grid,
    nt: usize,
    period: f64,
    entries: &[(i64, [i64; 3], Complex64)],
) -> Result<SpaceTimeField> {
    let nx = grid.num_points();
    let mut coeffs = vec![Complex64::default(); nt * nx];
    for &(l, modes, v) in entries {
        let lt = l.rem_euclid(nt as i64) as usize;
        let mut flat = 0usize;
        for (axis, &n) in grid.sizes().iter().enumerate() {
            let m = modes[axis].rem_euclid(n as i64) as usize;
            flat = flat * n + m;
        }
        coeffs[lt * nx + flat] = v;
    }
    Ok(SpaceTimeField::from_coeffs(grid.clone(), nt, period, coeffs)?)
}

fn null_identity_defect() -> Result<f64> {
    let grid = Grid::cubic(3, 8)?;
    let u = synthetic_joint(
        &grid,
        8,
        1.0,
        &[
            (0, [1, 0, 0], Complex64::new(0.9, 0.1)),
            (1, [0, 1, -1], Complex64::new(-0.3, 0.7)),
            (-1, [1, 1, 0], Complex64::new(0.2, -0.4)),
        ],
    )?;
    let v = synthetic_joint(
        &grid,
        8,
        1.0,
        &[
            (1, [0, -1, 0], Complex64::new(0.5, 0.3)),
            (-2, [1, 0, 1], Complex64::new(0.1, 0.8)),
        ],
    )?;
    Ok(spacetime::null_identity_residual(&u, &v)?)
}

fn resonance_defect(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let xi1: Vec<f64> = (0..3).map(|_| rng.random_range(-8.0..8.0)).collect();
        let xi2: Vec<f64> = (0..3).map(|_| rng.random_range(-8.0..8.0)).collect();
        let dot: f64 = xi1.iter().zip(&xi2).map(|(a, b)| a * b).sum();
        worst = worst.max((spacetime::resonance(&xi1, &xi2) + 2.0 * dot).abs());
    }
    worst
}

/// Relative gap between the two evaluation routes of the modulation norm
/// on a windowed solver trajectory.
fn x01_route_gap() -> Result<f64> {
    let grid = Grid::cubic(1, 32)?;
    let u0 = transform::dealias(&transform::forward_complex(&ComplexField::from_fn(
        grid.clone(),
        |x| Complex64::from_polar(0.05, x[0]) + Complex64::from_polar(0.03, 2.0 * x[0]),
    )));
    let params = LlgParams::new(1.0, 0.3)?;
    let traj = evolve::solve_dgl(&u0, &params, 0.5, 0.5 / 64.0, 4)?;
    let joint = SpaceTimeField::from_trajectory(&traj, Some(TimeWindow::new(0.8)?))?;
    let norm = joint.x01_norm();
    Ok((norm.value - norm.via_physical).abs() / norm.value)
}

/// Energy decay and unit-length preservation of the damped sphere flow
/// with the precession term switched off.  Returns (worst one-step energy
/// increase, worst unit defect).
pub fn heat_flow_checks(seed: u64) -> Result<(f64, f64)> {
    let grid = Grid::cubic(3, 16)?;
    let n = grid.num_points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Mildly wiggly unit field around the north pole.
    let mut comps = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let noise: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)])
        .collect();
    let smooth = |vals: Vec<f64>| {
        let f = llg_core::RealField::from_data(grid.clone(), vals).unwrap();
        // Keep only resolved scales so the flow starts smooth.
        let low = lp::project_below(&transform::forward(&f), 2).unwrap();
        transform::inverse_real(&low)
    };
    let wx = smooth(noise.iter().map(|p| p[0]).collect());
    let wy = smooth(noise.iter().map(|p| p[1]).collect());
    for i in 0..n {
        comps[0][i] = wx.data()[i];
        comps[1][i] = wy.data()[i];
        comps[2][i] = 1.0;
    }
    let v = VectorField3::from_components(grid, comps)?;
    let s0 = sphere::renormalize(&v)?;
    let params = LlgParams::new(0.0, 1.0)?;
    let traj = evolve::solve_llg(&s0, &params, 0.25, 5e-3, 1)?;
    let energies: Vec<f64> = traj.snaps().iter().map(sphere::dirichlet_energy).collect();
    let worst_rise = energies
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let worst_unit = traj
        .snaps()
        .iter()
        .map(|s| s.max_unit_defect())
        .fold(0.0, f64::max);
    Ok((worst_rise, worst_unit))
}

pub fn run_lp_selftest(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let grid = cfg.grid.build()?;
    let seed = cfg.datum.seed;
    let mut report = ExperimentReport::new("selftest", environment(cfg));

    // No timings in the report: persisted bytes must be run-invariant.
    let defect = partition_defect(&grid);
    report.criteria.push(
        CriterionOutcome::at_most("partition-of-unity", defect, 1e-12)
            .with_detail(format!("all nonzero wavevectors, grid {:?}", grid.sizes())),
    );

    let (rt, unit) = projection_roundtrips(cfg.samples, seed)?;
    report.criteria.push(
        CriterionOutcome::at_most("projection-roundtrip", rt, 1e-12)
            .with_detail(format!("{} random fields, both directions", cfg.samples)),
    );
    report.criteria.push(
        CriterionOutcome::at_most("projection-unit-length", unit, 1e-14)
            .with_detail("lifted fields are pointwise unit"),
    );

    report.criteria.push(
        CriterionOutcome::at_most("cubic-nonlinearity", cubic_scaling_drift(seed)?, 2e-2)
            .with_detail("ratio drift of |G(delta u)| / delta^3 over two decades"),
    );

    let (semigroup, mass) = propagator_checks(seed)?;
    report.criteria.push(
        CriterionOutcome::at_most("propagator-semigroup", semigroup, 1e-12)
            .with_detail("E(t)E(s) vs E(t+s)"),
    );
    report.criteria.push(
        CriterionOutcome::at_most("propagator-isometry", mass, 1e-13)
            .with_detail("undamped linear flow conserves mass"),
    );

    report.criteria.push(
        CriterionOutcome::at_most("duhamel-consistency", duhamel_defect()?, 1e-4)
            .with_detail("integral-equation defect of a solver trajectory, 16 cells"),
    );

    report.criteria.push(
        CriterionOutcome::at_most("null-identity", null_identity_defect()?, 1e-9)
            .with_detail("band-limited synthetic factors"),
    );
    report.criteria.push(
        CriterionOutcome::at_most("resonance-identity", resonance_defect(seed), 1e-12)
            .with_detail("H(xi1, xi2) = -2 xi1.xi2 on random pairs"),
    );
    report.criteria.push(
        CriterionOutcome::at_most("modulation-dual-route", x01_route_gap()?, 1e-10)
            .with_detail("spectral vs physical evaluation, windowed trajectory"),
    );

    let u0 = datum::build(&grid, &cfg.datum)?;
    let dilated = evolve::dilate(&u0, 2)?;
    let drift = (lp::critical_norm(&dilated) / lp::critical_norm(&u0) - 1.0).abs();
    report.criteria.push(
        CriterionOutcome::at_most("dilation-invariance", drift, 5e-2)
            .with_detail("critical norm under the lambda = 2 parabolic rescaling"),
    );

    let (rise, unit_flow) = heat_flow_checks(seed)?;
    report.criteria.push(
        CriterionOutcome::at_most("energy-monotone", rise, 1e-9)
            .with_detail("Dirichlet energy per step, precession off"),
    );
    report.criteria.push(
        CriterionOutcome::at_most("flow-unit-length", unit_flow, 1e-14)
            .with_detail("renormalized steps stay on the sphere"),
    );

    // Plot data: the datum's shell profile.
    let besov = lp::besov_norm(&u0, lp::BesovParams::critical(grid.dim()));
    let shells: Vec<[f64; 2]> = besov
        .shell_range
        .iter()
        .zip(&besov.shell_norms)
        .map(|(k, &m)| [k as f64, m])
        .collect();
    report.push_curve("datum-shell-masses", None, shells);

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::testutil::tiny_config;

    #[test]
    fn the_default_battery_passes_on_a_small_grid() {
        let mut cfg = tiny_config(vec![16, 16, 16]);
        cfg.samples = 25;
        let report = run_lp_selftest(&cfg).unwrap();
        assert!(report.passed(), "{:#?}", report.criteria);
        assert_eq!(report.criteria.len(), 13);
        assert!(report.curves.iter().any(|c| c.name == "datum-shell-masses"));
    }

    #[test]
    fn the_synthetic_joint_field_places_modes_where_asked() {
        let grid = Grid::cubic(3, 8).unwrap();
        let f = synthetic_joint(&grid, 8, 1.0, &[(1, [0, -1, 0], Complex64::new(0.5, 0.3))])
            .unwrap();
        assert!((f.l2_norm() - Complex64::new(0.5, 0.3).norm()).abs() < 1e-12);
    }
}
