//! The integrated tail
//!
//! T(ρ, y) = ∫_y^∞ e^(−x) I_{ρ−1}(x) / x^ρ dx,  ρ > 1/2, y > 0,
//!
//! by quadrature, by its ₃F₃ closed form and by its Poincaré asymptotic
//! series. The closed form naturally produces the normalized value
//! 2^(ρ−1) Γ(ρ) T, the asymptotic series the bare T; [`TailValue`] always
//! carries both.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite_log, QuadConfig};
use crate::series::{Method, Truncation};
use crate::specfun::{
    bessel_i_scaled, digamma, gamma, hyp_pfq_extended, ln_gamma, rgamma, PfqSpec, EULER_GAMMA,
};

/// Largest y for which the alternating ₃F₃(…; −2y) series is summed.
pub const Y_CANCEL: f64 = 20.0;

/// Closed form at or below, asymptotic series above.
pub const Y_SWITCH: f64 = 10.0;

/// The asymptotic route flags results whose error estimate exceeds this
/// fraction of the value.
pub const ASYMPTOTIC_WARN_REL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub rho: f64,
    pub y: f64,
}

impl TailParams {
    pub fn new(rho: f64, y: f64) -> Result<Self> {
        if !(rho > 0.5) || !rho.is_finite() {
            return Err(Error::Domain {
                what: "tail",
                value: rho,
                expected: "ρ > 1/2",
            });
        }
        if !(y > 0.0) || !y.is_finite() {
            return Err(Error::Domain {
                what: "tail",
                value: y,
                expected: "y > 0 and finite",
            });
        }
        Ok(Self { rho, y })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailWarning {
    /// The smallest asymptotic term is still above [`ASYMPTOTIC_WARN_REL`]
    /// of the value.
    AsymptoticRegimeNotReached,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailValue {
    pub bare: f64,
    /// 2^(ρ−1) Γ(ρ) · bare.
    pub normalized: f64,
    pub method: Method,
    /// Error estimate for `bare`.
    pub abs_err_estimate: f64,
    /// Terms summed or quadrature nodes evaluated.
    pub effort: usize,
    pub warning: Option<TailWarning>,
}

/// 2^(ρ−1) Γ(ρ).
pub fn normalization_factor(rho: f64) -> Result<f64> {
    let f = 2f64.powf(rho - 1.0) * gamma(rho)?;
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::Overflow {
            what: "tail normalization 2^(ρ−1)Γ(ρ)",
        })
    }
}

impl TailValue {
    fn from_bare(
        p: &TailParams,
        bare: f64,
        err: f64,
        method: Method,
        effort: usize,
    ) -> Result<Self> {
        Ok(Self {
            bare,
            normalized: bare * normalization_factor(p.rho)?,
            method,
            abs_err_estimate: err,
            effort,
            warning: None,
        })
    }

    fn from_normalized(
        p: &TailParams,
        normalized: f64,
        err_normalized: f64,
        method: Method,
        effort: usize,
    ) -> Result<Self> {
        let factor = normalization_factor(p.rho)?;
        Ok(Self {
            bare: normalized / factor,
            normalized,
            method,
            abs_err_estimate: err_normalized / factor,
            effort,
            warning: None,
        })
    }
}

/// Direct quadrature of the defining integral, with decay hint ρ + 1/2
/// from e^(−x) I_{ρ−1}(x) ~ (2πx)^(−1/2).
///
/// The integrand is divided by y·f(y) before integration, so `cfg.abs_tol`
/// is measured in units of that scale rather than in absolute terms.
pub fn tail_quadrature(p: &TailParams, cfg: &QuadConfig) -> Result<TailValue> {
    let trunc = Truncation::default();
    let nu = p.rho - 1.0;
    let rho = p.rho;
    // errors inside the closure surface as NaN, which the engine rejects
    let f = |x: f64| match bessel_i_scaled(nu, x, &trunc) {
        Ok(r) => r.value * x.powf(-rho),
        Err(_) => f64::NAN,
    };
    let scale = match f(p.y).abs() * p.y {
        s if s.is_finite() && s > 0.0 => s,
        _ => 1.0,
    };
    let q = integrate_semi_infinite_log(|x| f(x) / scale, p.y, rho + 0.5, cfg)?;
    if !q.converged {
        return Err(Error::NonConvergence {
            what: "tail quadrature",
            terms: q.nodes_used,
        });
    }
    TailValue::from_bare(
        p,
        q.value * scale,
        q.abs_err_estimate * scale,
        Method::Quadrature,
        q.nodes_used,
    )
}

/// Λ(y) = γ + ln(2y) + ψ(ρ − 1/2) − ψ(2ρ − 1).
pub fn lambda_fn(p: &TailParams) -> Result<f64> {
    Ok(EULER_GAMMA + (2.0 * p.y).ln() + digamma(p.rho - 0.5)? - digamma(2.0 * p.rho - 1.0)?)
}

/// The closed form
///
/// 2^(ρ−1) Γ(ρ) T = −γ + y ₃F₃(1, 1, ρ+½; 2, 2, 2ρ; −2y) − ln(2y) + ψ(2ρ−1) − ψ(ρ−½).
///
/// The ₃F₃ series alternates with terms up to roughly e^(2y) times its sum,
/// so it is carried in double-double arithmetic and the subtraction of Λ is
/// done before rounding. Beyond [`Y_CANCEL`] the route refuses.
pub fn tail_closed_form(p: &TailParams, trunc: &Truncation) -> Result<TailValue> {
    if p.y > Y_CANCEL {
        return Err(Error::Cancellation {
            y: p.y,
            limit: Y_CANCEL,
        });
    }
    let rho = p.rho;
    let spec = PfqSpec::new(&[1.0, 1.0, rho + 0.5], &[2.0, 2.0, 2.0 * rho], -2.0 * p.y);
    let (f, f_dd) = hyp_pfq_extended(&spec, trunc)?;
    let lambda = lambda_fn(p)?;
    let normalized = (DoubleDouble::from_f64(p.y) * f_dd - DoubleDouble::from_f64(lambda)).to_f64();
    // ψ values carry ~1e-15 absolute error each
    let err = p.y * f.abs_err_estimate + 8.0 * f64::EPSILON * lambda.abs().max(1.0);
    TailValue::from_normalized(p, normalized, err, Method::ClosedForm, f.effort)
}

/// Coefficient of (2y)^(−k) in the asymptotic series:
/// (−1)^k Γ(ρ+k−½) / [(ρ+k−½) Γ(ρ−k−½) k!].
///
/// 1/Γ(ρ−k−½) is taken from [`rgamma`], so the coefficient is exactly zero
/// once ρ−k−½ hits a pole.
pub fn asymptotic_coefficient(rho: f64, k: usize) -> Result<f64> {
    let kf = k as f64;
    let recip = rgamma(rho - kf - 0.5);
    if recip == 0.0 {
        return Ok(0.0);
    }
    let a = rho + kf - 0.5;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let magnitude = (ln_gamma(a)? - ln_gamma(kf + 1.0)?).exp() / a;
    Ok(sign * magnitude * recip)
}

/// The k-th term y^(−ρ+½)/√(2π) c_k(ρ) (2y)^(−k) of the asymptotic series.
pub fn asymptotic_term(rho: f64, y: f64, k: usize) -> Result<f64> {
    let c = asymptotic_coefficient(rho, k)?;
    if c == 0.0 {
        return Ok(0.0);
    }
    let ln_pre = (0.5 - rho) * y.ln() - 0.5 * (2.0 * PI).ln();
    let ln_2y = LN_2 + y.ln();
    Ok(c.signum() * (c.abs().ln() + ln_pre - k as f64 * ln_2y).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermCap {
    /// Stop before the smallest-magnitude term.
    Auto,
    /// Sum k = 0..=K.
    Fixed(usize),
}

/// Upper bound on the number of asymptotic terms examined in [`TermCap::Auto`].
const AUTO_TERM_LIMIT: usize = 2000;

/// Bound on the part of T that no truncation of the power series in 1/y
/// sees: e^(−x) I_ν(x) also contains e^(−2x)/√(2πx) Σ a_k(ν) x^(−k),
/// whose integral from y is about e^(−2y) y^(−ρ−½) / (2√(2π)) times that
/// sum at x = y. Zero only in the limit; it is what remains when the series
/// terminates at half-integer ρ.
pub fn exponentially_small_bound(rho: f64, y: f64) -> f64 {
    let nu = rho - 1.0;
    let mu = 4.0 * nu * nu;
    let mut term: f64 = 1.0;
    let mut sum = 1.0;
    for k in 0..50 {
        let odd = (2 * k + 1) as f64;
        let next = term * (mu - odd * odd).abs() / (8.0 * (k as f64 + 1.0) * y);
        if next >= term || next <= f64::EPSILON * sum {
            break;
        }
        sum += next;
        term = next;
    }
    (-2.0 * y - (rho + 0.5) * y.ln()).exp() * sum / (2.0 * (2.0 * PI).sqrt())
}

/// The Poincaré series
///
/// T ~ y^(−ρ+½)/√(2π) Σ_k c_k(ρ) (2y)^(−k).
///
/// `abs_err_estimate` is the magnitude of the first omitted term plus
/// [`exponentially_small_bound`]. With [`TermCap::Auto`] the sum also stops
/// once a term is negligible next to the partial sum; for half-integer ρ it
/// terminates exactly.
pub fn tail_asymptotic(p: &TailParams, cap: TermCap) -> Result<TailValue> {
    let rho = p.rho;
    let term = |k: usize| asymptotic_term(rho, p.y, k);

    let mut sum = 0.0;
    let (included, omitted) = match cap {
        TermCap::Fixed(kmax) => {
            for k in 0..=kmax {
                sum += term(k)?;
            }
            (kmax + 1, term(kmax + 1)?)
        }
        TermCap::Auto => {
            let mut current = term(0)?;
            let mut k = 0;
            loop {
                sum += current;
                let next = term(k + 1)?;
                let exact_stop =
                    next == 0.0 && (rho - 0.5).fract() == 0.0 && (k + 1) as f64 >= rho - 0.5;
                if exact_stop
                    || next.abs() >= current.abs()
                    || next.abs() <= 0.25 * f64::EPSILON * sum.abs()
                    || k + 1 >= AUTO_TERM_LIMIT
                {
                    break (k + 1, next);
                }
                current = next;
                k += 1;
            }
        }
    };
    let err = omitted.abs() + exponentially_small_bound(rho, p.y);
    let mut v = TailValue::from_bare(p, sum, err, Method::Asymptotic, included)?;
    if err > ASYMPTOTIC_WARN_REL * sum.abs() {
        v.warning = Some(TailWarning::AsymptoticRegimeNotReached);
    }
    Ok(v)
}

/// Closed form for y ≤ [`Y_SWITCH`], asymptotic series above.
///
/// If the asymptotic series has not reached its regime (large ρ relative
/// to y) the closed form is used up to [`Y_CANCEL`], and quadrature past it.
pub fn tail_auto(p: &TailParams) -> Result<TailValue> {
    if p.y <= Y_SWITCH {
        return tail_closed_form(p, &Truncation::default());
    }
    let asym = tail_asymptotic(p, TermCap::Auto)?;
    if asym.warning.is_none() {
        return Ok(asym);
    }
    if p.y <= Y_CANCEL {
        tail_closed_form(p, &Truncation::default())
    } else {
        tail_quadrature(p, &QuadConfig::default())
    }
}
