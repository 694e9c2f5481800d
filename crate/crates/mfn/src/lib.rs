//! Minimum Frobenius norm (MFN) quadratic interpolation for
//! derivative-free trust-region methods: the default initial
//! interpolation set, MFN Lagrange polynomials (numeric and closed
//! form), constants of well-poisedness over lp balls, quadratic
//! maximization engines behind them, and a small demonstration solver.
//!
//! Quick tour:
//!
//! * [`powell::powell_initial_set`] builds the initial set;
//! * [`interp::interpolate_mfn`] and [`interp::interpolate_sym_broyden`]
//!   fit models;
//! * [`lagrange`] computes Lagrange polynomials both ways;
//! * [`ballmax`] maximizes quadratics over lp balls;
//! * [`poisedness`] evaluates and sweeps well-poisedness constants;
//! * [`solver`] runs the derivative-free trust-region loop.

pub mod ball;
pub mod ballmax;
mod error;
pub mod interp;
pub mod lagrange;
pub mod model;
pub mod poisedness;
pub mod powell;
pub mod set;
pub mod solver;
pub mod testfns;

pub use ball::{pow_ext, LpBall, PNorm};
pub use error::{Error, Result};
pub use model::QuadraticModel;
pub use set::InterpolationSet;
