//! Discrete Fourier transforms and Fourier multipliers.
//!
//! Normalization is fixed once, here, and every norm in the crate leans on it:
//!
//! * forward:  `u_hat(xi_m) = sqrt(V)/N * sum_x u(x) exp(-i xi_m . x)`
//! * inverse:  `u(x) = 1/sqrt(V) * sum_m u_hat(xi_m) exp(+i xi_m . x)`
//!
//! with `V` the torus volume and `N` the total sample count.  The pair is
//! unitary from samples weighted by the cell volume onto bare coefficients:
//! `sum_x |u(x)|^2 dV = sum_m |u_hat(xi_m)|^2` (Parseval, exercised to 1e-12
//! in the tests).  Consequently a single nonzero coefficient `c` at `xi`
//! represents the function `c * exp(i xi.x) / sqrt(V)` of L2 norm `|c|`.
//!
//! Multidimensional transforms are axis-by-axis 1-D FFTs (rustfft), with plans
//! cached per length.  Everything here is single threaded and deterministic:
//! identical inputs give bit-identical outputs.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField, SpectralField};

type PlanKey = (usize, bool);

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap();
    cache
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// Unnormalized in-place FFT of `data` (layout `sizes`, row major) along every
/// axis with more than one point.  Also used by the space-time module with a
/// leading time axis, hence the free-standing signature.
pub(crate) fn fft_nd(data: &mut [Complex64], sizes: &[usize], forward: bool) {
    debug_assert_eq!(data.len(), sizes.iter().product::<usize>());
    for axis in 0..sizes.len() {
        fft_axis(data, sizes, axis, forward);
    }
}

/// Unnormalized in-place FFT along a single axis of a row-major array.
pub(crate) fn fft_axis(data: &mut [Complex64], sizes: &[usize], axis: usize, forward: bool) {
    debug_assert_eq!(data.len(), sizes.iter().product::<usize>());
    let n = sizes[axis];
    if n == 1 {
        return;
    }
    let fft = plan(n, forward);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let stride: usize = sizes[axis + 1..].iter().product();
    if stride == 1 {
        for chunk in data.chunks_exact_mut(n) {
            fft.process_with_scratch(chunk, &mut scratch);
        }
    } else {
        let blocks: usize = sizes[..axis].iter().product();
        let block_stride = n * stride;
        let mut line = vec![Complex64::default(); n];
        for b in 0..blocks {
            let base_block = b * block_stride;
            for off in 0..stride {
                let base = base_block + off;
                for t in 0..n {
                    line[t] = data[base + t * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for t in 0..n {
                    data[base + t * stride] = line[t];
                }
            }
        }
    }
}

pub fn forward(f: &RealField) -> SpectralField {
    forward_complex(&f.to_complex())
}

pub fn forward_complex(f: &ComplexField) -> SpectralField {
    let grid = f.grid().clone();
    let mut data = f.data().to_vec();
    fft_nd(&mut data, grid.sizes(), true);
    let scale = grid.volume().sqrt() / grid.num_points() as f64;
    for v in &mut data {
        *v *= scale;
    }
    SpectralField::from_data(grid, data).expect("length preserved")
}

pub fn inverse(f: &SpectralField) -> ComplexField {
    let grid = f.grid().clone();
    let mut data = f.data().to_vec();
    fft_nd(&mut data, grid.sizes(), false);
    let scale = 1.0 / grid.volume().sqrt();
    for v in &mut data {
        *v *= scale;
    }
    ComplexField::from_data(grid, data).expect("length preserved")
}

/// Inverse transform of a Hermitian-symmetric spectrum.  The imaginary residue
/// is dropped; for genuinely real data it is at roundoff level (the "real in,
/// real out to 1e-12" guarantee of the derivative helpers below).
pub fn inverse_real(f: &SpectralField) -> RealField {
    inverse(f).real_part()
}

/// Apply a Fourier multiplier given as a function of the padded wavevector.
/// Rejects non-finite multiplier values (e.g. a 1/|xi| symbol evaluated at 0).
pub fn apply_multiplier(
    f: &SpectralField,
    mut m: impl FnMut([f64; 3]) -> Complex64,
) -> Result<SpectralField> {
    let grid = f.grid();
    let [n0, n1, n2] = grid.padded_sizes();
    let [k0, k1, k2] = grid.wavenumber_tables();
    let mut data = Vec::with_capacity(f.data().len());
    let mut flat = 0usize;
    for i0 in 0..n0 {
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                let mv = m([k0[i0], k1[i1], k2[i2]]);
                if !(mv.re.is_finite() && mv.im.is_finite()) {
                    return Err(Error::NonFiniteMultiplier(flat));
                }
                data.push(f.data()[flat] * mv);
                flat += 1;
            }
        }
    }
    SpectralField::from_data(grid.clone(), data)
}

/// Multiplier `-|xi|^2`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let grid = f.grid().clone();
    let ksq = grid.k_squared();
    let data = f.data().iter().zip(&ksq).map(|(v, k2)| v * -k2).collect();
    SpectralField::from_data(grid, data).expect("length preserved")
}

/// Multiplier `i xi_axis`.
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    let grid = f.grid().clone();
    assert!(axis < grid.dim(), "axis out of range");
    let [n0, n1, n2] = grid.padded_sizes();
    let [k0, k1, k2] = grid.wavenumber_tables();
    let mut data = Vec::with_capacity(f.data().len());
    let mut flat = 0usize;
    for i0 in 0..n0 {
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                let k = [k0[i0], k1[i1], k2[i2]][axis];
                data.push(f.data()[flat] * Complex64::new(0.0, k));
                flat += 1;
            }
        }
    }
    SpectralField::from_data(grid, data).expect("length preserved")
}

pub fn gradient(f: &SpectralField) -> Vec<SpectralField> {
    (0..f.grid().dim()).map(|a| derivative(f, a)).collect()
}

/// Laplacian of a real field, back in physical space.
pub fn laplacian_real(f: &RealField) -> RealField {
    inverse_real(&laplacian(&forward(f)))
}

/// True if the coefficient survives the per-axis two-thirds rule.
fn keep_mode(modes: [f64; 3], cutoffs: [f64; 3]) -> bool {
    modes.iter().zip(&cutoffs).all(|(k, c)| k.abs() <= *c)
}

/// Two-thirds dealiasing: zero every coefficient with `|xi_j|` above
/// `(2/3) * Nyquist_j` on any axis.  In particular the unpaired `-N/2` Nyquist
/// mode is always removed.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralField) {
    let grid = f.grid().clone();
    let [n0, n1, n2] = grid.padded_sizes();
    let [k0, k1, k2] = grid.wavenumber_tables();
    let mut cut = [f64::INFINITY; 3];
    for axis in 0..grid.dim() {
        cut[axis] = 2.0 / 3.0 * grid.nyquist(axis);
    }
    let data = f.data_mut();
    let mut flat = 0usize;
    for i0 in 0..n0 {
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                if !keep_mode([k0[i0], k1[i1], k2[i2]], cut) {
                    data[flat] = Complex64::new(0.0, 0.0);
                }
                flat += 1;
            }
        }
    }
}
