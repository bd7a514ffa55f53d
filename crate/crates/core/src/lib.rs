//! Linear summation methods for non-harmonic Fourier series in the
//! Paley–Wiener space, computed through Lagrange interpolation series.
//!
//! * [`spectrum`]: frequency sets and their truncations
//! * [`genfun`]: generating function `G`, `G′(λ)` and the outer factor
//! * [`blaschke`]: Blaschke products, tail ratios, exceptional disks
//! * [`contours`]: triangle contours for the universal method
//! * [`weights`]: naive, projection and universal weight matrices
//! * [`engine`]: test functions, partial sums, Riesz projections, norms
//! * [`diagnostics`]: (A2), Carleson and integrability estimates
//! * [`cli`]: batch front-end

pub mod blaschke;
pub mod cli;
pub mod contours;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod genfun;
pub mod quadrature;
pub mod special;
pub mod spectrum;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
