//! Scalar special functions consumed by every other module.

mod bessel;
mod expint;
mod gamma;
mod hyper;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_i_scaled_route, BesselRoute, BESSEL_X_SWITCH};
pub use expint::{exp_integral_e1, exp_integral_e1_route, E1Route};
pub use gamma::{digamma, gamma, ln_gamma, pochhammer, rgamma, sin_pi, EULER_GAMMA};
pub use hyper::{hyp1f1, hyp2f1, hyp3f2, hyp3f3, hyp_pfq, PfqSpec};

pub(crate) use hyper::hyp_pfq_extended;
