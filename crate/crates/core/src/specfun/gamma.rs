use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant, γ = −ψ(1).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// Below this the Stirling sums are fed through the recurrence first.
const STIRLING_MIN: f64 = 15.0;
const DIGAMMA_ASYMPTOTIC_MIN: f64 = 10.0;

/// B_{2k} / (2k (2k − 1)) for k = 1..=8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// B_{2k} / (2k) for k = 1..=8.
const DIGAMMA_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

// 170! is the largest factorial below f64::MAX.
const MAX_FACTORIAL_ARG: f64 = 171.0;
const GAMMA_OVERFLOW_ARG: f64 = 171.624_376_956_302_7;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in STIRLING_COEFFS {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::Domain {
            what: "ln_gamma",
            value: x,
            expected: "x > 0 and finite",
        });
    }
    if x == x.floor() && x < MAX_FACTORIAL_ARG {
        return Ok(factorial(x as u32 - 1).ln());
    }
    if x >= STIRLING_MIN {
        return Ok(stirling_ln_gamma(x));
    }
    // ln Γ(x) = ln Γ(x + n) − ln[x (x+1) ⋯ (x+n−1)]
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < STIRLING_MIN {
        prod *= shifted;
        shifted += 1.0;
    }
    Ok(stirling_ln_gamma(shifted) - prod.ln())
}

/// sin(πx), exact zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.floor() {
        return 0.0;
    }
    // reduce to r in [-1, 1] with sin(πx) = sin(πr)
    let r = x - 2.0 * (x / 2.0).round();
    if r.abs() <= 0.5 {
        (PI * r).sin()
    } else {
        // sin(πr) = sin(π(sign(r) − r))
        let s = r.signum();
        (PI * (s - r)).sin()
    }
}

/// Γ(x) away from the poles at 0, −1, −2, ….
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain {
            what: "gamma",
            value: x,
            expected: "a number",
        });
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole {
            what: "gamma",
            value: x,
        });
    }
    if x < 0.5 {
        // Γ(x) Γ(1 − x) = π / sin(πx)
        let g = gamma(1.0 - x)?;
        let v = PI / (sin_pi(x) * g);
        return Ok(v);
    }
    if x >= GAMMA_OVERFLOW_ARG {
        return Err(Error::Overflow { what: "gamma" });
    }
    if x == x.floor() {
        return Ok(factorial(x as u32 - 1));
    }
    if x < STIRLING_MIN {
        let mut shifted = x;
        let mut prod = 1.0;
        while shifted < STIRLING_MIN {
            prod *= shifted;
            shifted += 1.0;
        }
        return Ok(stirling_ln_gamma(shifted).exp() / prod);
    }
    Ok(stirling_ln_gamma(x).exp())
}

/// 1/Γ(x), an entire function: exactly zero at non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= GAMMA_OVERFLOW_ARG {
        return (-stirling_ln_gamma(x)).exp();
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1 − x) / π
        let s = sin_pi(x);
        return match gamma(1.0 - x) {
            Ok(g) => s * g / PI,
            Err(_) => {
                let ln = stirling_ln_gamma(1.0 - x) + s.abs().ln() - PI.ln();
                s.signum() * ln.exp()
            }
        };
    }
    match gamma(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// ψ(x) = Γ′(x)/Γ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::Domain {
            what: "digamma",
            value: x,
            expected: "x > 0 and finite",
        });
    }
    // ψ(x) = ψ(x + n) − Σ 1/(x + i)
    let mut shifted = x;
    let mut acc = 0.0;
    while shifted < DIGAMMA_ASYMPTOTIC_MIN {
        acc -= 1.0 / shifted;
        shifted += 1.0;
    }
    let inv2 = 1.0 / (shifted * shifted);
    let mut p = inv2;
    let mut series = 0.0;
    for c in DIGAMMA_COEFFS {
        series += c * p;
        p *= inv2;
    }
    Ok(acc + shifted.ln() - 0.5 / shifted - series)
}

/// Rising factorial (a)_k = a (a+1) ⋯ (a+k−1) by direct product.
pub fn pochhammer(a: f64, k: u32) -> Result<f64> {
    let mut p = 1.0;
    for j in 0..k {
        p *= a + j as f64;
        if p == 0.0 {
            return Ok(0.0);
        }
    }
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::Overflow { what: "pochhammer" })
    }
}
