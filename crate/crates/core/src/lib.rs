//! Pseudospectral solver and analysis toolkit for the Landau-Lifshitz-Gilbert
//! flow on flat tori, together with its stereographic complex form (a
//! derivative Ginzburg-Landau equation) and the Littlewood-Paley machinery
//! used to measure both.
//!
//! Layering, bottom up:
//!
//! * [`grid`], [`field`], [`transform`]: periodic grids, field containers,
//!   unitary FFTs, derivative multipliers, two-thirds dealiasing;
//! * [`lp`]: dyadic frequency decomposition, Besov and anisotropic norms;
//! * [`sphere`]: sphere-valued maps, the LLG right-hand side, stereographic
//!   projection and its inverse, Dirichlet energy;
//! * [`dgl`]: the complex-form nonlinearity and right-hand side;
//! * [`evolve`]: exact free propagator, integrating-factor RK4 and projected
//!   RK4 time steppers, Duhamel fixed-point map, trajectories, rescaling;
//! * [`spacetime`]: windowed space-time fields, modulation shells, null-form
//!   identity checks, Strichartz-type norms;
//! * [`snapshot`], [`records`]: binary field snapshots and NDJSON records.

pub mod dgl;
pub mod error;
pub mod evolve;
pub mod field;
pub mod grid;
pub mod lp;
pub mod records;
pub mod snapshot;
pub mod sphere;
pub mod spacetime;
pub mod tol;
pub mod transform;

pub use error::{Error, Result};
pub use field::{ComplexField, RealField, SpectralField};
pub use grid::Grid;
