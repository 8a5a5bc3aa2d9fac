//! Sphere-valued maps and the Landau-Lifshitz-Gilbert flow
//!
//! `d_t s = a s x (Lap s) - eps s x (s x (Lap s))`
//!
//! for `s: torus -> S^2`, with gyromagnetic sign `a` (+1 by default) and
//! Gilbert damping `eps` in `[0, 1]`.  `eps = 0` is the Schroedinger map flow,
//! `a = 0` the harmonic map heat flow.  The base point is the north pole
//! `Q = (0, 0, 1)`; stereographic projection is taken from the south pole, so
//! maps that approach `-Q` anywhere are rejected rather than silently losing
//! precision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField};
use crate::grid::Grid;
use crate::tol;
use crate::transform;

/// Parameters of the flow; see the module header for the two special limits.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LlgParams {
    /// Gyromagnetic sign, normally +1 or -1 (0 switches the precession off).
    pub a: f64,
    /// Gilbert damping in `[0, 1]`.
    pub epsilon: f64,
}

impl LlgParams {
    pub fn new(a: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || !epsilon.is_finite() {
            return Err(Error::BadEpsilon(epsilon));
        }
        Ok(LlgParams { a, epsilon })
    }
}

impl Default for LlgParams {
    fn default() -> Self {
        LlgParams { a: 1.0, epsilon: 0.0 }
    }
}

/// Three real components on a common grid; not necessarily unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    grid: Grid,
    comps: [Vec<f64>; 3],
}

impl VectorField3 {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.num_points();
        VectorField3 { grid, comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n]] }
    }

    pub fn from_components(grid: Grid, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != grid.num_points() {
                return Err(Error::BadDataLength { expected: grid.num_points(), got: c.len() });
            }
        }
        Ok(VectorField3 { grid, comps })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn comp(&self, i: usize) -> &[f64] {
        &self.comps[i]
    }

    pub fn comp_field(&self, i: usize) -> RealField {
        RealField::from_data(self.grid.clone(), self.comps[i].clone()).expect("sized")
    }

    /// `self + c * other`, allocating.
    pub fn add_scaled(&self, c: f64, other: &VectorField3) -> VectorField3 {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        let comps = [0, 1, 2].map(|i| {
            self.comps[i]
                .iter()
                .zip(&other.comps[i])
                .map(|(a, b)| a + c * b)
                .collect()
        });
        VectorField3 { grid: self.grid.clone(), comps }
    }

    pub fn scale(&mut self, c: f64) {
        for comp in &mut self.comps {
            for v in comp {
                *v *= c;
            }
        }
    }

    pub fn sub(&self, other: &VectorField3) -> VectorField3 {
        self.add_scaled(-1.0, other)
    }

    /// Pointwise Euclidean length, as a field.
    pub fn pointwise_norm(&self) -> RealField {
        let data = (0..self.grid.num_points())
            .map(|i| {
                (self.comps[0][i] * self.comps[0][i]
                    + self.comps[1][i] * self.comps[1][i]
                    + self.comps[2][i] * self.comps[2][i])
                    .sqrt()
            })
            .collect();
        RealField::from_data(self.grid.clone(), data).expect("sized")
    }

    pub fn linf_norm(&self) -> f64 {
        self.pointwise_norm().linf_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    /// Componentwise spectral Laplacian.
    pub fn laplacian(&self) -> VectorField3 {
        let comps = [0, 1, 2].map(|i| {
            transform::inverse_real(&transform::laplacian(&transform::forward(&self.comp_field(i))))
                .into_data()
        });
        VectorField3 { grid: self.grid.clone(), comps }
    }

    /// Componentwise two-thirds dealiasing (used after pointwise products).
    pub fn dealias(&self) -> VectorField3 {
        let comps = [0, 1, 2].map(|i| {
            transform::inverse_real(&transform::dealias(&transform::forward(&self.comp_field(i))))
                .into_data()
        });
        VectorField3 { grid: self.grid.clone(), comps }
    }
}

/// Pointwise cross product `u x v`.
pub fn cross(u: &VectorField3, v: &VectorField3) -> Result<VectorField3> {
    if u.grid != v.grid {
        return Err(Error::GridMismatch);
    }
    let n = u.grid.num_points();
    let mut out = VectorField3::zeros(u.grid.clone());
    for i in 0..n {
        let (u1, u2, u3) = (u.comps[0][i], u.comps[1][i], u.comps[2][i]);
        let (v1, v2, v3) = (v.comps[0][i], v.comps[1][i], v.comps[2][i]);
        out.comps[0][i] = u2 * v3 - u3 * v2;
        out.comps[1][i] = u3 * v1 - u1 * v3;
        out.comps[2][i] = u1 * v2 - u2 * v1;
    }
    Ok(out)
}

/// A map into the unit sphere: a `VectorField3` with `|s| = 1` certified at
/// construction (tolerance [`tol::UNIT_LENGTH`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SphereField {
    inner: VectorField3,
}

impl SphereField {
    pub fn from_components(grid: Grid, comps: [Vec<f64>; 3]) -> Result<Self> {
        SphereField::from_vector(VectorField3::from_components(grid, comps)?)
    }

    pub fn from_vector(v: VectorField3) -> Result<Self> {
        let defect = unit_defect(&v);
        if defect > tol::UNIT_LENGTH {
            return Err(Error::NotUnitLength(defect));
        }
        Ok(SphereField { inner: v })
    }

    /// Constant map at the north pole `Q`.
    pub fn north(grid: Grid) -> Self {
        let n = grid.num_points();
        SphereField {
            inner: VectorField3 { grid, comps: [vec![0.0; n], vec![0.0; n], vec![1.0; n]] },
        }
    }

    pub fn vector(&self) -> &VectorField3 {
        &self.inner
    }

    pub fn grid(&self) -> &Grid {
        self.inner.grid()
    }

    pub fn comp(&self, i: usize) -> &[f64] {
        self.inner.comp(i)
    }

    pub fn max_unit_defect(&self) -> f64 {
        unit_defect(&self.inner)
    }
}

fn unit_defect(v: &VectorField3) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..v.grid.num_points() {
        let n2 = v.comps[0][i] * v.comps[0][i]
            + v.comps[1][i] * v.comps[1][i]
            + v.comps[2][i] * v.comps[2][i];
        worst = worst.max((n2.sqrt() - 1.0).abs());
    }
    worst
}

/// Project a nowhere-degenerate vector field back onto the sphere.
pub fn renormalize(v: &VectorField3) -> Result<SphereField> {
    let mut out = v.clone();
    let mut min_len = f64::INFINITY;
    for i in 0..v.grid.num_points() {
        let len = (v.comps[0][i] * v.comps[0][i]
            + v.comps[1][i] * v.comps[1][i]
            + v.comps[2][i] * v.comps[2][i])
            .sqrt();
        min_len = min_len.min(len);
        if len < tol::DEGENERATE_VECTOR {
            return Err(Error::DegenerateVector(min_len));
        }
        for c in 0..3 {
            out.comps[c][i] /= len;
        }
    }
    // Division by the exact length leaves at most a few ulps of defect.
    Ok(SphereField { inner: out })
}

/// The flow's right-hand side `a s x (Lap s) - eps s x (s x (Lap s))`.
///
/// The Laplacian is spectral and each cross product is dealiased before being
/// used again, so the result is in-band; tangency `rhs . s = 0` then holds to
/// the dealiasing residue (1e-10 on smooth data) instead of exactly.
///
/// Refuses inputs further than [`tol::UNIT_LENGTH_RHS`] from the sphere.
pub fn llg_rhs(s: &SphereField, params: &LlgParams) -> Result<VectorField3> {
    let defect = s.max_unit_defect();
    if defect > tol::UNIT_LENGTH_RHS {
        return Err(Error::NotUnitLength(defect));
    }
    Ok(llg_rhs_unchecked(s.vector(), params))
}

/// Same formula on a raw vector field; the time stepper applies it to RK4
/// stage states, which sit `O(dt^2)` off the sphere by construction.
pub(crate) fn llg_rhs_unchecked(s: &VectorField3, params: &LlgParams) -> VectorField3 {
    let lap = s.laplacian();
    let precession = cross(s, &lap).expect("same grid").dealias();
    let mut rhs = precession.clone();
    rhs.scale(params.a);
    if params.epsilon != 0.0 {
        let damping = cross(s, &precession).expect("same grid").dealias();
        rhs = rhs.add_scaled(-params.epsilon, &damping);
    }
    rhs
}

/// Stereographic projection from the south pole:
/// `u = (s1 + i s2) / (1 + s3)`.
///
/// Errors when `1 + s3` drops below [`tol::POLE_GUARD`] anywhere.
pub fn stereographic(s: &SphereField) -> Result<ComplexField> {
    let grid = s.grid().clone();
    let n = grid.num_points();
    let (s1, s2, s3) = (s.comp(0), s.comp(1), s.comp(2));
    let mut min_denom = f64::INFINITY;
    for i in 0..n {
        min_denom = min_denom.min(1.0 + s3[i]);
    }
    if min_denom < tol::POLE_GUARD {
        return Err(Error::PoleProximity(min_denom));
    }
    let data = (0..n)
        .map(|i| Complex64::new(s1[i], s2[i]) / (1.0 + s3[i]))
        .collect();
    ComplexField::from_data(grid, data)
}

/// Inverse stereographic projection:
/// `s = (2 Re u, 2 Im u, 1 - |u|^2) / (1 + |u|^2)`.
///
/// The image satisfies `|s| = 1` identically (the three numerators square-sum
/// to `(1 + |u|^2)^2`), so the result is sphere-valued to roundoff with no
/// projection step.
pub fn inverse_stereographic(u: &ComplexField) -> SphereField {
    let grid = u.grid().clone();
    let n = grid.num_points();
    let mut comps = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, v) in u.data().iter().enumerate() {
        let d = 1.0 + v.norm_sqr();
        comps[0][i] = 2.0 * v.re / d;
        comps[1][i] = 2.0 * v.im / d;
        comps[2][i] = (1.0 - v.norm_sqr()) / d;
    }
    SphereField { inner: VectorField3 { grid, comps } }
}

/// Dirichlet energy `sum_x |grad s|^2 dV` with spectral gradients.
pub fn dirichlet_energy(s: &SphereField) -> f64 {
    let grid = s.grid();
    let mut acc = 0.0;
    for c in 0..3 {
        let hat = transform::forward(&s.vector().comp_field(c));
        for axis in 0..grid.dim() {
            let d = transform::inverse_real(&transform::derivative(&hat, axis));
            acc += d.data().iter().map(|v| v * v).sum::<f64>();
        }
    }
    acc * grid.cell_volume()
}
