//! Monte Carlo laboratory for the critical points of random polynomials.
//!
//! Polynomials are built in root form, `f(z) = prod (z - X_j)`, with the roots
//! drawn IID from a [`measures::MeasureSpec`]. The zeros of `f'` are computed
//! to a certified residual by [`polyroots::critical_points`], and compared to
//! the root distribution with the tools in [`metrics`]. The unit-circle case,
//! where the critical points inside a disk of radius `rho < 1` behave like the
//! zeros of a Gaussian power series, lives in [`circle`]. Small exact checks of
//! the classical geometric theorems are in [`classic`], and [`experiment`]
//! runs seeded, parallel batches of trials and writes the reports.

pub mod circle;
pub mod classic;
pub mod csvio;
pub mod experiment;
pub mod geometry;
pub mod measures;
pub mod metrics;
pub mod mp;
pub mod polyroots;
pub mod quadrature;
pub mod seed;
pub mod summation;

pub use num_complex::Complex64;
