//! The flow in stereographic coordinates.
//!
//! With `u = (s1 + i s2)/(1 + s3)` the projection carries `s x .` to
//! multiplication by `i` and the tension field to `Lap u - 2 G(u)`, so the
//! sphere flow becomes a derivative Ginzburg-Landau equation,
//!
//! ```text
//! d_t u = (eps + a i) (Lap u - 2 G(u)),
//! G(u) = conj(u) / (1 + |u|^2) * sum_j (d_j u)^2.
//! ```
//!
//! For `a = 1` this is the usual form `(i d_t + Lap - i eps Lap) u =
//! (2 - 2 i eps) G(u)`; flipping `a` conjugates the equation, so `u` solves
//! it with `a = 1` exactly when `conj(u)` does with `a = -1`.  The
//! nonlinear coefficient is spelled `-(2 eps + 2 a i)` below.
//!
//! All entry points take and return spectral fields; products are formed
//! pointwise in physical space and the result is dealiased on the way back.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, SpectralField};
use crate::sphere::LlgParams;
use crate::tol;
use crate::transform;

/// The gradient-squared sum `sum_j (d_j u)^2` and `|u|^2`, both pointwise.
fn gradient_square_terms(u_hat: &SpectralField) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = u_hat.grid();
    let u = transform::inverse(u_hat);
    let mut grad_sq = vec![Complex64::default(); grid.num_points()];
    for axis in 0..grid.dim() {
        let d = transform::inverse(&transform::derivative(u_hat, axis));
        for (acc, v) in grad_sq.iter_mut().zip(d.data()) {
            *acc += v * v;
        }
    }
    (u.into_data(), grad_sq)
}

/// The rational nonlinearity `G(u) = conj(u)/(1 + |u|^2) * sum_j (d_j u)^2`,
/// evaluated pointwise and returned dealiased in spectral form.
pub fn g_nonlinearity(u_hat: &SpectralField) -> SpectralField {
    let (u, grad_sq) = gradient_square_terms(u_hat);
    let data: Vec<Complex64> = u
        .iter()
        .zip(&grad_sq)
        .map(|(v, gs)| v.conj() / (1.0 + v.norm_sqr()) * gs)
        .collect();
    let g = transform::forward_complex(
        &ComplexField::from_data(u_hat.grid().clone(), data).expect("sized"),
    );
    transform::dealias(&g)
}

/// Degree-`2k + 3` Taylor truncation of `G`:
/// `G_K(u) = conj(u) * sum_j (d_j u)^2 * sum_{k=0}^{K} (-|u|^2)^k`.
///
/// Valid only where the geometric series converges; errors when
/// `sup |u| >= 1`.  The truncation error obeys
/// `|G - G_K| <= |u|^{2K+3} |sum (d_j u)^2| / (1 + |u|^2)`
/// pointwise, and for real positive data consecutive truncations bracket `G`.
pub fn g_taylor(u_hat: &SpectralField, order: usize) -> Result<SpectralField> {
    let (u, grad_sq) = gradient_square_terms(u_hat);
    let sup = u.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    if sup >= tol::SERIES_SUP {
        return Err(Error::SeriesDiverges(sup));
    }
    let data: Vec<Complex64> = u
        .iter()
        .zip(&grad_sq)
        .map(|(v, gs)| {
            let m = -v.norm_sqr();
            let mut partial = 0.0;
            let mut term = 1.0;
            for _ in 0..=order {
                partial += term;
                term *= m;
            }
            v.conj() * partial * gs
        })
        .collect();
    let g = transform::forward_complex(
        &ComplexField::from_data(u_hat.grid().clone(), data).expect("sized"),
    );
    Ok(transform::dealias(&g))
}

/// Coefficient multiplying `G` on the right-hand side: `-(2 eps + 2 a i)`.
pub fn nonlinear_coefficient(params: &LlgParams) -> Complex64 {
    Complex64::new(-2.0 * params.epsilon, -2.0 * params.a)
}

/// The nonlinear part of the right-hand side, `-(2 eps + 2 a i) G(u)`.
pub fn nonlinear_rhs(u_hat: &SpectralField, params: &LlgParams) -> SpectralField {
    let mut g = g_nonlinearity(u_hat);
    let c = nonlinear_coefficient(params);
    for v in g.data_mut() {
        *v *= c;
    }
    g
}

/// Full right-hand side `(i + eps) Lap u - (2 eps + 2 a i) G(u)`.
pub fn dgl_rhs(u_hat: &SpectralField, params: &LlgParams) -> SpectralField {
    let mut lin = transform::laplacian(u_hat);
    let c = Complex64::new(params.epsilon, params.a);
    for v in lin.data_mut() {
        *v *= c;
    }
    nonlinear_rhs(u_hat, params).add(&lin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, TAU};
    use crate::transform::{forward_complex, inverse};

    fn single_mode(n: usize, delta: f64) -> SpectralField {
        let grid = Grid::cubic(1, n).unwrap();
        forward_complex(&ComplexField::from_fn(grid, |x| {
            Complex64::new(0.0, x[0]).exp() * delta
        }))
    }

    #[test]
    fn single_mode_nonlinearity_is_exact() {
        // For u = delta e^{ix}, |u| is constant, so
        // G = conj(u) (i u)^2 / (1 + delta^2) = -delta^3 e^{ix} / (1 + delta^2):
        // one harmonic with no truncation error at all.
        let delta = 0.4;
        let u_hat = single_mode(64, delta);
        let g_hat = g_nonlinearity(&u_hat);
        let expect = -delta.powi(3) / (1.0 + delta * delta);
        let c = g_hat.coeff(&[1]).unwrap();
        assert!((c - Complex64::from(expect * TAU.sqrt())).norm() <= 1e-12);
        let mut residual = 0.0f64;
        for (i, v) in g_hat.data().iter().enumerate() {
            if i != 1 {
                residual = residual.max(v.norm());
            }
        }
        assert!(residual <= 1e-13, "spurious harmonics {residual}");
    }

    #[test]
    fn rhs_matches_hand_formula_on_a_single_mode() {
        let delta = 0.3;
        let u_hat = single_mode(64, delta);
        for (a, eps) in [(1.0, 0.0), (1.0, 0.3), (-1.0, 1.0), (0.0, 1.0)] {
            let params = LlgParams::new(a, eps).unwrap();
            let rhs = dgl_rhs(&u_hat, &params);
            // d_t u = (eps + a i)(-1) u - (2 eps + 2 a i)(-delta^2/(1+delta^2)) u
            let factor = Complex64::new(-eps, -a)
                + Complex64::new(2.0 * eps, 2.0 * a) * delta * delta / (1.0 + delta * delta);
            let expect = u_hat.coeff(&[1]).unwrap() * factor;
            let got = rhs.coeff(&[1]).unwrap();
            assert!((got - expect).norm() <= 1e-12 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn flipping_the_precession_sign_conjugates_the_flow() {
        let grid = Grid::cubic(2, 16).unwrap();
        let datum = |x: [f64; 3]| {
            Complex64::new(0.1 * x[0].sin() + 0.05 * (x[0] + x[1]).cos(), 0.08 * x[1].sin())
        };
        let u = forward_complex(&ComplexField::from_fn(grid.clone(), datum));
        let u_bar = forward_complex(&ComplexField::from_fn(grid, |x| datum(x).conj()));
        let fwd = inverse(&dgl_rhs(&u, &LlgParams::new(1.0, 0.4).unwrap()));
        let rev = inverse(&dgl_rhs(&u_bar, &LlgParams::new(-1.0, 0.4).unwrap()));
        let worst = fwd
            .data()
            .iter()
            .zip(rev.data())
            .map(|(f, r)| (f.conj() - r).norm())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-13, "conjugation symmetry broken by {worst}");
    }

    #[test]
    fn constants_are_equilibria() {
        let grid = Grid::cubic(2, 16).unwrap();
        let u_hat = forward_complex(&ComplexField::from_fn(grid, |_| Complex64::new(0.7, -0.2)));
        let params = LlgParams::new(1.0, 0.5).unwrap();
        assert!(g_nonlinearity(&u_hat).l2_norm() <= 1e-14);
        assert!(dgl_rhs(&u_hat, &params).l2_norm() <= 1e-12);
        let zero = SpectralField::zeros(Grid::cubic(1, 8).unwrap());
        assert_eq!(dgl_rhs(&zero, &params).l2_norm(), 0.0);
    }

    #[test]
    fn taylor_refuses_large_amplitudes() {
        let u_hat = single_mode(32, 1.0);
        assert!(matches!(g_taylor(&u_hat, 3), Err(Error::SeriesDiverges(_))));
        assert!(g_taylor(&single_mode(32, 0.99), 3).is_ok());
    }

    #[test]
    fn taylor_remainder_obeys_the_geometric_bound() {
        // Multi-mode data, sup|u| ~ 0.3; the pointwise remainder bound is
        // integrated into an L2 bound on a fine grid where aliasing is nil.
        let grid = Grid::cubic(1, 128).unwrap();
        let u_hat = forward_complex(&ComplexField::from_fn(grid.clone(), |x| {
            Complex64::new(0.2 * x[0].cos(), 0.1 * (2.0 * x[0]).sin())
        }));
        let order = 5;
        let g = g_nonlinearity(&u_hat);
        let gk = g_taylor(&u_hat, order).unwrap();
        let diff = g.sub(&gk).l2_norm();

        let u = inverse(&u_hat);
        let du = inverse(&transform::derivative(&u_hat, 0));
        let bound_sq: f64 = u
            .data()
            .iter()
            .zip(du.data())
            .map(|(v, d)| {
                let b = v.norm().powi(2 * order as i32 + 3) * d.norm_sqr() / (1.0 + v.norm_sqr());
                b * b
            })
            .sum::<f64>()
            * grid.cell_volume();
        assert!(
            diff <= bound_sq.sqrt() * (1.0 + 1e-10) + 1e-14,
            "remainder {diff} exceeds bound {}",
            bound_sq.sqrt()
        );
    }

    #[test]
    fn truncations_bracket_the_rational_value_on_positive_data() {
        // u real positive with (du)^2 >= 0: the series alternates pointwise,
        // so even orders overshoot and odd orders undershoot G everywhere.
        let grid = Grid::cubic(1, 64).unwrap();
        let u_hat = forward_complex(&ComplexField::from_fn(grid, |x| {
            Complex64::from(0.5 + 0.2 * x[0].cos())
        }));
        let g = inverse(&g_nonlinearity(&u_hat));
        let tails: Vec<Vec<f64>> = (0..4)
            .map(|k| {
                inverse(&g_taylor(&u_hat, k).unwrap())
                    .data()
                    .iter()
                    .map(|v| v.re)
                    .collect()
            })
            .collect();
        for (i, gv) in g.data().iter().enumerate() {
            for k in 0..4 {
                let diff = tails[k][i] - gv.re;
                if k % 2 == 0 {
                    assert!(diff >= -1e-12, "even order {k} fell below G at {i}: {diff}");
                } else {
                    assert!(diff <= 1e-12, "odd order {k} rose above G at {i}: {diff}");
                }
            }
        }
    }

    #[test]
    fn high_order_taylor_agrees_with_the_rational_form() {
        let grid = Grid::cubic(2, 32).unwrap();
        let u_hat = forward_complex(&ComplexField::from_fn(grid, |x| {
            Complex64::new(0.1 * x[0].cos(), 0.08 * x[1].sin())
        }));
        let g = g_nonlinearity(&u_hat);
        let gk = g_taylor(&u_hat, 8).unwrap();
        assert!(g.sub(&gk).l2_norm() <= 1e-12);
    }

    #[test]
    fn nonlinearity_is_cubically_small() {
        // Halving the datum divides G by ~8 once the quintic correction is
        // negligible.
        let u1 = single_mode(64, 0.1);
        let u2 = single_mode(64, 0.05);
        let r = g_nonlinearity(&u1).l2_norm() / g_nonlinearity(&u2).l2_norm();
        assert!((r - 8.0).abs() <= 0.1, "cubic ratio {r}");
    }
}
