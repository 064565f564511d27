//! Numerical tools for polynomial dynamics in one complex variable.
//!
//! Polynomials, Böttcher series and deck transformations at infinity,
//! fiber-based factorization of commuting-type pairs, the parameter-space
//! endomorphism on critical points, Chebyshev and power normal forms,
//! Green functions, capacities and atomic measures.

// `!(x <= tol)` is deliberate: a NaN residual must count as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod poly;
pub mod tolerance;

pub use error::{Error, Result};
pub use poly::{LinearMap, PointMultiset, Poly, C64};
pub use tolerance::ToleranceContext;
pub mod series;
pub use series::TailSeries;
pub mod fiber;
pub mod param;
pub mod normal_forms;
pub mod potential;
pub mod classify;
pub mod io;
pub mod cli;
