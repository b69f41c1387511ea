//! Stochastic Galerkin projection of parametric second-order systems and
//! their reduction by balanced truncation for a quadratic (energy) output.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches
//! files, configs or the command line lives in the companion `sgmor` crate.
//!
//! Module map:
//!
//! - [`polychaos`]: orthonormal Legendre chaos bases and expectations.
//! - [`galerkin`]: Galerkin assembly and the first-order energy realization.
//! - [`lyapsylv`]: Schur-based Lyapunov/Sylvester solvers, Gramian factors.
//! - [`bt`]: balanced truncation for quadratic outputs and H2 errors.
//! - [`arnoldi`]: one-sided Krylov baseline.
//! - [`passivity`]: dissipation matrix and the passivity-loss measure.
//! - [`msd`]: the parametric mass-spring-damper benchmark.
//! - [`simulate`]: trapezoidal time integration and error-bound checks.
//! - [`sweep`]: reduction sweeps over a range of reduced dimensions.
#![no_std]
// NaN must fail the `!(x < tol)` style checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arnoldi;
pub mod bt;
mod dense;
pub mod error;
pub mod galerkin;
pub mod lyapsylv;
pub mod msd;
pub mod passivity;
pub mod polychaos;
pub mod simulate;
pub mod sparse;
pub mod sweep;

pub use error::{Error, Result};
pub use nalgebra::{DMatrix, DVector};
