//! Generalized spin Wigner functions applied to small cyclic spin-1/2 chains.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`] dense complex operator algebra (Paulis, embeddings, Hermitian
//!   eigendecomposition, partial traces);
//! * [`models`] Hamiltonians of the transverse-field Ising, anisotropic XY and
//!   XXZ chains, their symmetry operators, ground-state selection and the
//!   analytic reference formulas;
//! * [`wigner`] the rotated-parity kernel, equal-angle Wigner values, sphere
//!   fields, reference states and state reconstruction from Wigner samples;
//! * [`analysis`] parameter sweeps ("phase lines") and critical-point
//!   detection;
//! * [`acceptance`] the end-to-end numerical checks used by the `verify`
//!   command and the acceptance test target.

pub mod acceptance;
pub mod analysis;
pub mod models;
pub mod qcore;
pub mod quadrature;
pub mod wigner;

mod error;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use qcore::{CorrelationLabel, DensityMatrix, HermitianOperator};
