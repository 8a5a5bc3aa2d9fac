//! Uniform periodic grids in one to three dimensions.
//!
//! A `Grid` fixes the sampling conventions shared by every field type:
//!
//! * axis `j` has `N_j` points (a power of two, at least 8) on a circle of
//!   circumference `L_j` (default `2*pi`), sampled at `x = i * L_j / N_j`;
//! * storage is row major, axis 0 slowest;
//! * the discrete wavenumbers on axis `j` are `2*pi*m / L_j` for
//!   `m = -N_j/2 .. N_j/2 - 1`, stored in the usual FFT order
//!   (`m = 0, 1, .., N_j/2 - 1, -N_j/2, .., -1`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    sizes: Vec<usize>,
    lengths: Vec<f64>,
}

impl Grid {
    pub fn new(sizes: &[usize], lengths: &[f64]) -> Result<Self> {
        let dim = sizes.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::BadDimension(dim));
        }
        if lengths.len() != dim {
            return Err(Error::MismatchedAxes);
        }
        for &n in sizes {
            if !n.is_power_of_two() || n < 8 {
                return Err(Error::BadAxisSize(n));
            }
        }
        for &l in lengths {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::BadAxisLength(l));
            }
        }
        Ok(Grid { dim, sizes: sizes.to_vec(), lengths: lengths.to_vec() })
    }

    /// Cube with the default period `2*pi` on every axis.
    pub fn cubic(dim: usize, n: usize) -> Result<Self> {
        Grid::new(&vec![n; dim], &vec![TAU; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn size(&self, axis: usize) -> usize {
        self.sizes[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.lengths[axis]
    }

    pub fn num_points(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Volume element of one sample cell, `prod_j L_j / N_j`.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.num_points() as f64
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.sizes[axis] as f64
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        i as f64 * self.spacing(axis)
    }

    /// Largest representable wavenumber magnitude on `axis`, `pi * N_j / L_j`.
    pub fn nyquist(&self, axis: usize) -> f64 {
        std::f64::consts::PI * self.sizes[axis] as f64 / self.lengths[axis]
    }

    /// Signed mode number at storage index `i` (FFT order).
    pub fn mode(&self, axis: usize, i: usize) -> i64 {
        let n = self.sizes[axis];
        debug_assert!(i < n);
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn wavenumber(&self, axis: usize, i: usize) -> f64 {
        TAU * self.mode(axis, i) as f64 / self.lengths[axis]
    }

    pub fn axis_wavenumbers(&self, axis: usize) -> Vec<f64> {
        (0..self.sizes[axis]).map(|i| self.wavenumber(axis, i)).collect()
    }

    /// Storage index for signed mode `m`, if representable.
    pub fn mode_index(&self, axis: usize, m: i64) -> Result<usize> {
        let n = self.sizes[axis] as i64;
        if m < -n / 2 || m >= n / 2 {
            return Err(Error::ModeOutOfRange(m));
        }
        Ok(if m >= 0 { m as usize } else { (m + n) as usize })
    }

    /// Sizes padded with trailing 1s so loops can always run over three axes.
    pub fn padded_sizes(&self) -> [usize; 3] {
        let mut s = [1usize; 3];
        s[..self.dim].copy_from_slice(&self.sizes);
        s
    }

    /// Per-axis wavenumber tables padded to three axes; unused axes get `[0.0]`.
    pub fn wavenumber_tables(&self) -> [Vec<f64>; 3] {
        let mut t = [vec![0.0], vec![0.0], vec![0.0]];
        for axis in 0..self.dim {
            t[axis] = self.axis_wavenumbers(axis);
        }
        t
    }

    /// Flat table of `|xi|^2` in storage order.
    pub fn k_squared(&self) -> Vec<f64> {
        let [n0, n1, n2] = self.padded_sizes();
        let [k0, k1, k2] = self.wavenumber_tables();
        let mut out = Vec::with_capacity(self.num_points());
        for i0 in 0..n0 {
            let a = k0[i0] * k0[i0];
            for i1 in 0..n1 {
                let b = a + k1[i1] * k1[i1];
                for i2 in 0..n2 {
                    out.push(b + k2[i2] * k2[i2]);
                }
            }
        }
        out
    }

    /// Smallest nonzero wavenumber magnitude, `min_j 2*pi/L_j`.
    pub fn min_wavenumber(&self) -> f64 {
        (0..self.dim).map(|a| TAU / self.lengths[a]).fold(f64::INFINITY, f64::min)
    }

    /// Largest wavevector magnitude, reached at the all-Nyquist corner.
    pub fn max_wavenumber(&self) -> f64 {
        (0..self.dim).map(|a| self.nyquist(a).powi(2)).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_smallest_grid() {
        let g = Grid::cubic(1, 8).unwrap();
        assert_eq!(g.num_points(), 8);
        assert!((g.volume() - TAU).abs() < 1e-15);
    }

    #[test]
    fn rejects_small_and_non_power_sizes() {
        assert!(matches!(Grid::cubic(1, 4), Err(Error::BadAxisSize(4))));
        assert!(matches!(Grid::new(&[12], &[TAU]), Err(Error::BadAxisSize(12))));
        assert!(matches!(Grid::new(&[8, 8, 8, 8], &[1.0; 4]), Err(Error::BadDimension(4))));
        assert!(matches!(Grid::new(&[8], &[0.0]), Err(Error::BadAxisLength(_))));
    }

    #[test]
    fn wavenumbers_come_in_negating_pairs() {
        // Every mode except 0 and -N/2 pairs off with its negative.
        let g = Grid::new(&[16], &[5.0]).unwrap();
        for m in 1..8i64 {
            let i = g.mode_index(0, m).unwrap();
            let j = g.mode_index(0, -m).unwrap();
            assert_eq!(g.wavenumber(0, i), -g.wavenumber(0, j));
        }
        assert_eq!(g.mode(0, 8), -8);
        assert!(g.mode_index(0, 8).is_err());
    }

    #[test]
    fn k_squared_matches_tables() {
        let g = Grid::new(&[8, 16], &[TAU, 1.0]).unwrap();
        let ksq = g.k_squared();
        let mut idx = 0;
        for i0 in 0..8 {
            for i1 in 0..16 {
                let expect = g.wavenumber(0, i0).powi(2) + g.wavenumber(1, i1).powi(2);
                assert!((ksq[idx] - expect).abs() < 1e-12);
                idx += 1;
            }
        }
    }
}
