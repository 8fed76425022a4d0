//! Rough-path lifts of Brownian and fractional Brownian drivers, their
//! stationary smooth approximations `ω_δ`, rough differential equation
//! solvers, and Monte Carlo experiments on convergence of the induced
//! random dynamical systems.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covariance;
pub mod csv;
pub mod driver;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod lift;
pub mod rde;
pub mod rng;
pub mod smoothing;
pub mod variation;

pub use error::{Error, Result};
pub use grid::{make_grid, TimeGrid, VectorPath, Window};
pub use lift::{lift_smooth, rough_metric, RoughPathLift};
pub use smoothing::{smooth, SmoothedPath, SmoothingParams};
