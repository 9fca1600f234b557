//! Numerical evaluators for a generalized Feller-Spitzer density and a
//! modified-Bessel integrated tail, each computed along several independent
//! routes so that every route can be checked against the others.
//!
//! Module map:
//!
//! - [`specfun`]: Γ, ln Γ, ψ, Pochhammer, I_ν (plain and exponentially
//!   scaled), generic pFq and E1.
//! - [`quadrature`]: adaptive Gauss-Kronrod engine and a log-substitution
//!   front end for algebraically decaying integrands on `[y, ∞)`.
//! - [`density`]: the density 𝓘(t) via the collapsed branch-cut integral,
//!   the Bessel double series and the Bromwich contour integral.
//! - [`tail`]: the integrated tail via quadrature, the ₃F₃ closed form and
//!   the Poincaré asymptotic series.
//! - [`inequalities`]: signed margins for two modified-Bessel inequalities,
//!   the Jones inequality and the log-convexity of `e^(-x) x^(-ν) I_ν(x)`.
//!
//! Every function here is pure; nothing holds global mutable state.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod dd;
pub mod density;
pub mod error;
pub mod inequalities;
pub mod quadrature;
pub mod series;
pub mod specfun;
pub mod tail;

pub use error::{Error, Result};
pub use series::{EvalResult, Method, Truncation};
