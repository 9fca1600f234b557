use super::gamma::EULER_GAMMA;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum E1Route {
    Auto,
    Series,
    ContinuedFraction,
}

// Ascending series below, continued fraction above.
const E1_SPLIT: f64 = 1.0;

/// Exponential integral E1(y) = ∫_y^∞ e^(−t)/t dt for y > 0.
pub fn exp_integral_e1(y: f64) -> Result<f64> {
    exp_integral_e1_route(y, E1Route::Auto)
}

pub fn exp_integral_e1_route(y: f64, route: E1Route) -> Result<f64> {
    if !(y > 0.0) || y.is_infinite() {
        return Err(Error::Domain {
            what: "exp_integral_e1",
            value: y,
            expected: "y > 0 and finite",
        });
    }
    match route {
        E1Route::Series => series(y),
        E1Route::ContinuedFraction => continued_fraction(y),
        E1Route::Auto if y <= E1_SPLIT => series(y),
        E1Route::Auto => continued_fraction(y),
    }
}

/// E1(y) = −γ − ln y − Σ_{n≥1} (−y)^n / (n · n!)
fn series(y: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut pow_fact = 1.0;
    for n in 1..500 {
        let nf = n as f64;
        pow_fact *= -y / nf;
        let term = pow_fact / nf;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            return Ok(-EULER_GAMMA - y.ln() - sum);
        }
    }
    Err(Error::NonConvergence {
        what: "exp_integral_e1 series",
        terms: 500,
    })
}

/// Modified Lentz evaluation of
/// E1(y) = e^(−y) / (y + 1 − 1²/(y + 3 − 2²/(y + 5 − ⋯))).
fn continued_fraction(y: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = y + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h * (-y).exp());
        }
    }
    Err(Error::NonConvergence {
        what: "exp_integral_e1 continued fraction",
        terms: 10_000,
    })
}
