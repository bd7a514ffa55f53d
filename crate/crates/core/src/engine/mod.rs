//! Paley–Wiener test functions, grid functions, Lagrange partial sums and
//! Riesz projections.

mod grid;
mod lagrange;
mod pw;
mod riesz;

pub use grid::{interval_count, l2_error, GridFunction};
pub use lagrange::{disk_samples, partial_sum, Coefficients, LagrangeSystem};
pub use pw::PWFunction;
pub use riesz::{hilbert, riesz_project, weighted_projector_check, ProjectorCheck, Projected, Sign};
