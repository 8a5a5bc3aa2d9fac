//! Centralized tolerances.
//!
//! Each constant states the contract it enforces; keeping them in one place
//! makes the tolerance ladder auditable (see the test below for the ordering
//! that the rest of the crate relies on).

/// A `SphereField` must satisfy `|s| = 1` pointwise to this accuracy.
pub const UNIT_LENGTH: f64 = 1e-9;

/// `llg_rhs` refuses inputs whose unit-length violation exceeds this (looser
/// than [`UNIT_LENGTH`] so that freshly stepped, not yet renormalized data can
/// still be inspected).
pub const UNIT_LENGTH_RHS: f64 = 1e-6;

/// Stereographic projection refuses maps with `1 + s3` below this anywhere.
pub const POLE_GUARD: f64 = 0.1;

/// `renormalize` refuses vectors shorter than this.
pub const DEGENERATE_VECTOR: f64 = 1e-8;

/// Below this sup-norm bound the Taylor form of the nonlinearity converges
/// with a usable geometric tail (the hard domain limit is 1).
pub const SERIES_SUP: f64 = 1.0;

/// Default smallness threshold for the critical Besov norm of initial data;
/// solves merely warn, they do not refuse.
pub const SMALL_DATA: f64 = 0.05;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_ordered() {
        assert!(UNIT_LENGTH < UNIT_LENGTH_RHS);
        assert!(DEGENERATE_VECTOR < UNIT_LENGTH_RHS);
        assert!(UNIT_LENGTH_RHS < POLE_GUARD);
        assert!(SMALL_DATA < SERIES_SUP);
        for t in [UNIT_LENGTH, UNIT_LENGTH_RHS, POLE_GUARD, DEGENERATE_VECTOR, SMALL_DATA] {
            assert!(t > 0.0 && t.is_finite());
        }
    }
}
