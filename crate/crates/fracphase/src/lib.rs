//! Solvers and certification tools for time-fractional phase-field
//! equations discretized with the L2 approximation of the Caputo derivative.
//!
//! The crate provides:
//!
//! - [`coeff`]: the L2 coefficient families and their tabulation;
//! - [`caputo`]: the discrete nonlocal operator over a stored history, in
//!   two algebraically equivalent forms;
//! - [`analysis`]: the quadratic-form matrices behind the energy estimates
//!   and numerical certificates for their structural properties;
//! - [`spectral`]: a periodic 2D pseudo-spectral workspace;
//! - [`schemes`]: the second-order SAV stepper and the `3-alpha` order
//!   implicit–explicit stepper;
//! - [`energy`]: classical/modified energies and fractional energy-law sums.

// negated comparisons like `!(x > 0.0)` double as NaN guards; indexed loops
// are the clearest form for the strided gather/scatter kernels
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod caputo;
pub mod coeff;
pub mod config;
pub mod convergence;
pub mod energy;
pub mod error;
pub mod problems;
pub mod quadrature;
pub mod runner;
pub mod schemes;
pub mod spectral;
pub mod verify;

pub use coeff::{Alpha, CoeffTable};
pub use error::{Error, Result};
