//! Field containers: real and complex samples in physical space, and Fourier
//! coefficients in spectral space.
//!
//! All three are plain `(grid, flat data)` pairs in row-major order.  A
//! `SpectralField` stores the unitary-normalized coefficients produced by
//! [`crate::transform`]; with that normalization `SpectralField::l2_norm` (a
//! bare coefficient sum) equals the weighted physical-space norm, so code can
//! pick whichever side is cheaper.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

macro_rules! common_impl {
    ($ty:ident, $elem:ty) => {
        impl $ty {
            pub fn zeros(grid: Grid) -> Self {
                let n = grid.num_points();
                $ty { grid, data: vec![<$elem>::default(); n] }
            }

            pub fn from_data(grid: Grid, data: Vec<$elem>) -> Result<Self> {
                if data.len() != grid.num_points() {
                    return Err(Error::BadDataLength {
                        expected: grid.num_points(),
                        got: data.len(),
                    });
                }
                Ok($ty { grid, data })
            }

            pub fn grid(&self) -> &Grid {
                &self.grid
            }

            pub fn data(&self) -> &[$elem] {
                &self.data
            }

            pub fn data_mut(&mut self) -> &mut [$elem] {
                &mut self.data
            }

            pub fn into_data(self) -> Vec<$elem> {
                self.data
            }

            /// Panics on grid mismatch: mixing grids is a programming error,
            /// not a runtime condition.
            pub fn assert_same_grid(&self, other: &Self) {
                assert_eq!(self.grid, other.grid, "fields on different grids");
            }

            pub fn scale(&mut self, c: $elem) {
                for v in &mut self.data {
                    *v = *v * c;
                }
            }

            /// `self += c * other`.
            pub fn axpy(&mut self, c: $elem, other: &Self) {
                self.assert_same_grid(other);
                for (v, w) in self.data.iter_mut().zip(&other.data) {
                    *v = *v + c * *w;
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                self.assert_same_grid(other);
                let data = self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect();
                $ty { grid: self.grid.clone(), data }
            }

            pub fn add(&self, other: &Self) -> Self {
                self.assert_same_grid(other);
                let data = self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect();
                $ty { grid: self.grid.clone(), data }
            }

            pub fn is_finite(&self) -> bool {
                self.data.iter().all(|v| Self::elem_finite(v))
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    data: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    data: Vec<Complex64>,
}

common_impl!(RealField, f64);
common_impl!(ComplexField, Complex64);
common_impl!(SpectralField, Complex64);

impl RealField {
    fn elem_finite(v: &f64) -> bool {
        v.is_finite()
    }

    /// Sample `f` at the grid points; `f` receives padded coordinates
    /// (unused axes are 0).
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let [n0, n1, n2] = grid.padded_sizes();
        let mut data = Vec::with_capacity(grid.num_points());
        for i0 in 0..n0 {
            for i1 in 0..n1 {
                for i2 in 0..n2 {
                    let mut x = [0.0; 3];
                    for (axis, &i) in [i0, i1, i2].iter().enumerate().take(grid.dim()) {
                        x[axis] = grid.coordinate(axis, i);
                    }
                    data.push(f(x));
                }
            }
        }
        RealField { grid, data }
    }

    /// Physical L2 norm, `sqrt(sum |f|^2 dV)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.data.iter().map(|v| v * v).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn to_complex(&self) -> ComplexField {
        let data = self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        ComplexField { grid: self.grid.clone(), data }
    }
}

impl ComplexField {
    fn elem_finite(v: &Complex64) -> bool {
        v.re.is_finite() && v.im.is_finite()
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let [n0, n1, n2] = grid.padded_sizes();
        let mut data = Vec::with_capacity(grid.num_points());
        for i0 in 0..n0 {
            for i1 in 0..n1 {
                for i2 in 0..n2 {
                    let mut x = [0.0; 3];
                    for (axis, &i) in [i0, i1, i2].iter().enumerate().take(grid.dim()) {
                        x[axis] = grid.coordinate(axis, i);
                    }
                    data.push(f(x));
                }
            }
        }
        ComplexField { grid, data }
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.data.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn real_part(&self) -> RealField {
        RealField { grid: self.grid.clone(), data: self.data.iter().map(|v| v.re).collect() }
    }

    pub fn imag_part(&self) -> RealField {
        RealField { grid: self.grid.clone(), data: self.data.iter().map(|v| v.im).collect() }
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }
}

impl SpectralField {
    fn elem_finite(v: &Complex64) -> bool {
        v.re.is_finite() && v.im.is_finite()
    }

    /// Coefficient-side L2 norm; equals the physical L2 norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn coeff(&self, modes: &[i64]) -> Result<Complex64> {
        Ok(self.data[self.flat_index(modes)?])
    }

    pub fn set_coeff(&mut self, modes: &[i64], v: Complex64) -> Result<()> {
        let i = self.flat_index(modes)?;
        self.data[i] = v;
        Ok(())
    }

    fn flat_index(&self, modes: &[i64]) -> Result<usize> {
        if modes.len() != self.grid.dim() {
            return Err(Error::MismatchedAxes);
        }
        let mut flat = 0usize;
        for (axis, &m) in modes.iter().enumerate() {
            flat = flat * self.grid.size(axis) + self.grid.mode_index(axis, m)?;
        }
        Ok(flat)
    }

    /// Coefficient at `xi = 0`; the field mean is `mean_coeff() / sqrt(V)`.
    pub fn mean_coeff(&self) -> Complex64 {
        self.data[0]
    }

    /// Field average over the torus.
    pub fn mean(&self) -> Complex64 {
        self.data[0] / self.grid.volume().sqrt()
    }

    pub fn with_zero_mean(&self) -> SpectralField {
        let mut out = self.clone();
        out.data[0] = Complex64::new(0.0, 0.0);
        out
    }
}
