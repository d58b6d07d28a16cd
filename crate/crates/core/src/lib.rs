//! Discontinuous Galerkin solver for scalar conservation laws with mixed
//! second- and third-order diffusion terms,
//!
//! ```text
//! u_t + div v(u) - eps Lap(u) - tau eps^2 Lap(u_t) = 0,
//! ```
//!
//! on uniform 1D/2D rectangular meshes. Space is discretized with a symmetric
//! interior penalty DG method on orthonormal Legendre bases, advection with a
//! local Lax-Friedrichs flux, and time with a third-order implicit-explicit
//! SSP Runge-Kutta scheme (advection explicit, diffusion implicit, the
//! `tau eps^2` term folded into the mass-like operator). Slope, WENO, and
//! bound-rescaling limiters are applied after each complete time step.
//!
//! The `tw` module carries the semi-analytic traveling-wave machinery used to
//! predict plateau/basin saturation levels and to classify Riemann data.

pub mod basis;
pub mod cg;
pub mod config;
pub mod driver;
pub mod error;
pub mod imex;
pub mod limiter;
pub mod mesh;
pub mod output;
pub mod problem;
pub mod problems;
pub mod quadrature;
pub mod sipdg;
pub mod solution;
pub mod sparse;
pub mod tw;

pub use error::{Error, Result};
