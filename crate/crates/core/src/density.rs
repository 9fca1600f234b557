//! The density 𝓘(t) defined as the inverse Laplace transform
//!
//! 𝓘(t) = e^(−t)/(2πi) ∫_{c−i∞}^{c+i∞} e^(wt) e^(w√(w²−1) − w² + 1) / (w + √(w²−1)) dw,  c > 1,
//!
//! evaluated three ways that share no numerical code:
//!
//! - [`density_branch_cut`]: the contour collapsed onto the cut [−1, 1],
//!   a smooth real integral.
//! - [`density_series`]: the double series in I_{2n+r+1}, I_{2n+r+2} and the
//!   operator D = (1/t) d/dt, applied by exact term-by-term differentiation.
//! - [`density_bromwich`]: the contour integral itself on Re w = c. This one
//!   is a coarse diagnostic.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_finite, QuadConfig};
use crate::series::{EvalResult, Method, StopRule, Truncation};
use crate::specfun::{gamma, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityArg {
    pub t: f64,
    /// Abscissa of the Bromwich line, c > 1.
    pub c: f64,
}

impl DensityArg {
    pub const DEFAULT_OFFSET: f64 = 2.0;

    pub fn new(t: f64) -> Result<Self> {
        Self::with_offset(t, Self::DEFAULT_OFFSET)
    }

    pub fn with_offset(t: f64, c: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain {
                what: "density",
                value: t,
                expected: "t > 0 and finite",
            });
        }
        if !(c > 1.0) || !c.is_finite() {
            return Err(Error::Domain {
                what: "density Bromwich offset",
                value: c,
                expected: "c > 1",
            });
        }
        Ok(Self { t, c })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesBudget {
    pub n_max: usize,
    pub r_max: usize,
    pub k_max: usize,
    pub trunc: Truncation,
}

impl Default for SeriesBudget {
    fn default() -> Self {
        Self {
            n_max: 12,
            r_max: 40,
            k_max: 200,
            trunc: Truncation::default(),
        }
    }
}

/// Result of the double-series route.
///
/// `piece_one` and `piece_two` are the two double sums (the parts coming from
/// the cos φ and sin φ halves of the collapsed integral) before the common
/// prefactor, so `value = 2t e^(−t)/√π · (piece_one − piece_two)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesDiagnostics {
    pub value: f64,
    pub piece_one: f64,
    pub piece_two: f64,
    /// Outer terms (values of n) summed.
    pub n_terms_used: usize,
    /// Largest number of inner r-terms needed by any n.
    pub r_terms_used: usize,
    /// Power-series terms summed across every operator evaluation.
    pub k_terms_total: usize,
    pub abs_err_estimate: f64,
    pub converged: bool,
}

/// φ(x) = x √(1 − x²) on |x| ≤ 1.
pub fn phi(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain {
            what: "phi",
            value: x,
            expected: "|x| ≤ 1",
        });
    }
    Ok(x * (1.0 - x * x).sqrt())
}

/// Integrand of the collapsed contour integral in its original variable,
///
/// e^(xt − x²) {√(1−x²) cos φ(x) − x sin φ(x)},  x ∈ [−1, 1],
///
/// without the e^(1−t)/π prefactor.
pub fn collapsed_integrand(x: f64, t: f64) -> Result<f64> {
    let p = phi(x)?;
    Ok((x * t - x * x).exp() * ((1.0 - x * x).sqrt() * p.cos() - x * p.sin()))
}

/// s − sin(2s)/2, which behaves like (2/3)s³ near zero.
fn angle_excess(s: f64) -> f64 {
    if s.abs() < 0.5 {
        // ½ Σ_{k≥1} (−1)^(k+1) (2s)^(2k+1) / (2k+1)!
        let w = 2.0 * s;
        let w2 = w * w;
        let mut term = w * w2 / 6.0;
        let mut sum = term;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= -w2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            sum += term;
            k += 1.0;
        }
        0.5 * sum
    } else {
        s - 0.5 * (2.0 * s).sin()
    }
}

/// Integrand of the branch-cut route after x = sin θ, θ = π/2 − s,
/// including the e^(1−t) factor:
///
/// exp(sin²s − 2t sin²(s/2)) · sin(s − sin(2s)/2) · sin s,  s ∈ [0, π].
///
/// Every factor is entire and non-negative on [0, π].
pub fn branch_cut_integrand(s: f64, t: f64) -> f64 {
    let half = (0.5 * s).sin();
    let sin_s = s.sin();
    (sin_s * sin_s - 2.0 * t * half * half).exp() * angle_excess(s).sin() * sin_s
}

/// 𝓘(t) from the collapsed integral
/// (e/π) e^(−t) ∫_{−1}^{1} e^(xt−x²) {√(1−x²) cos φ(x) − x sin φ(x)} dx.
pub fn density_branch_cut(arg: &DensityArg, cfg: &QuadConfig) -> Result<EvalResult> {
    density_branch_cut_at(arg.t, cfg)
}

/// Same as [`density_branch_cut`] but also defined at t = 0.
pub fn density_branch_cut_at(t: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "density",
            value: t,
            expected: "t ≥ 0 and finite",
        });
    }
    // the integrand concentrates in s ≲ 1/√t; split there for large t
    let width = if t > 4.0 { 8.0 / t.sqrt() } else { PI / 2.0 };
    let f = |s: f64| branch_cut_integrand(s, t);
    let head = integrate_finite(f, 0.0, width.min(PI / 2.0), cfg)?;
    let tail = integrate_finite(f, width.min(PI / 2.0), PI, cfg)?;
    let value = (head.value + tail.value) / PI;
    let err = (head.abs_err_estimate + tail.abs_err_estimate) / PI;
    if !(head.converged && tail.converged) {
        return Err(Error::NonConvergence {
            what: "density branch-cut quadrature",
            terms: head.nodes_used + tail.nodes_used,
        });
    }
    Ok(EvalResult::new(
        value,
        err,
        head.nodes_used + tail.nodes_used,
        Method::BranchCut,
    ))
}

/// D^n [t^power_shift · I_order(t)] with D = (1/t) d/dt.
///
/// Uses the power series of I_order: with m_k = 2k + order + power_shift,
/// D t^m = m t^(m−2), so
///
/// D^n[...] = Σ_k [Π_{j<n} (m_k − 2j)] t^(m_k − 2n) / (2^(2k+order) k! Γ(k+order+1)).
pub fn bessel_operator_d(
    n_applications: usize,
    power_shift: f64,
    order: f64,
    t: f64,
    trunc: &Truncation,
) -> Result<f64> {
    operator_series(
        n_applications,
        power_shift,
        order,
        t,
        0.0,
        trunc,
        trunc.max_terms,
    )
    .map(|(v, _)| v)
}

/// e^(log_prefactor) · D^n[t^power_shift I_order(t)], with the prefactor
/// folded into the first term so neither factor has to be representable on
/// its own. Returns the value and the number of k-terms summed.
fn operator_series(
    n: usize,
    power_shift: f64,
    order: f64,
    t: f64,
    log_prefactor: f64,
    trunc: &Truncation,
    k_max: usize,
) -> Result<(f64, usize)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain {
            what: "bessel_operator_d",
            value: t,
            expected: "t > 0",
        });
    }
    if !(order >= 0.0) || !order.is_finite() || !power_shift.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "operator series needs a finite order ≥ 0 and finite power shift, got order {order}, shift {power_shift}"
        )));
    }
    let m0 = order + power_shift;
    let coeff = |k: usize| -> f64 {
        let m = m0 + 2.0 * k as f64;
        (0..n).map(|j| m - 2.0 * j as f64).product()
    };
    let exponent = m0 - 2.0 * n as f64;
    // t^exponent / (2^order Γ(order+1)) scaled by e^log_prefactor
    let base0 = {
        let direct = if log_prefactor == 0.0 && order < 170.0 {
            t.powf(exponent) / (2f64.powf(order) * gamma(order + 1.0)?)
        } else {
            f64::NAN
        };
        if direct.is_finite() && direct != 0.0 {
            direct
        } else {
            (log_prefactor + exponent * t.ln() - order * LN_2 - ln_gamma(order + 1.0)?).exp()
        }
    };
    if !base0.is_finite() {
        return Err(Error::Overflow {
            what: "bessel_operator_d",
        });
    }
    let q = 0.25 * t * t;
    let mut base = base0;
    let mut sum = coeff(0) * base;
    let mut rule = StopRule::new(trunc);
    let mut prev = sum.abs();
    for k in 0..k_max {
        // base_{k+1} / base_k = t² / (4 (k+1)(k+order+1))
        base *= q / ((k as f64 + 1.0) * (k as f64 + order + 1.0));
        let term = coeff(k + 1) * base;
        sum += term;
        let shrinking = term.abs() <= prev;
        prev = term.abs();
        if (rule.observe(term, sum) && shrinking) || base == 0.0 {
            return Ok((sum, k + 2));
        }
    }
    Err(Error::NonConvergence {
        what: "bessel_operator_d power series",
        terms: k_max,
    })
}

/// ln b_r(n) = r ln 2 + ln Γ(n + r + 3/2) − ln r!
fn ln_coefficient(n: usize, r: usize) -> Result<f64> {
    Ok(r as f64 * LN_2 + ln_gamma(n as f64 + r as f64 + 1.5)? - ln_gamma(r as f64 + 1.0)?)
}

/// Σ_r b_r(n) D^{n_ops}[t^(−r−shift) I_{2n+r+order_offset}(t)] with the
/// coefficient and the outer weight applied in log space.
fn inner_sum(
    n: usize,
    n_ops: usize,
    shift: f64,
    order_offset: f64,
    log_weight: f64,
    t: f64,
    budget: &SeriesBudget,
) -> Result<(f64, usize, usize, bool)> {
    let mut sum = 0.0;
    let mut rule = StopRule::new(&budget.trunc);
    let mut k_total = 0;
    for r in 0..=budget.r_max {
        let order = 2.0 * n as f64 + r as f64 + order_offset;
        let power = -(r as f64) - shift;
        let log_pre = log_weight + ln_coefficient(n, r)?;
        let (v, k_used) =
            operator_series(n_ops, power, order, t, log_pre, &budget.trunc, budget.k_max)?;
        k_total += k_used;
        sum += v;
        if rule.observe(v, sum) {
            return Ok((sum, r + 1, k_total, true));
        }
    }
    Ok((sum, budget.r_max + 1, k_total, false))
}

fn ln_factorial(n: usize) -> Result<f64> {
    ln_gamma(n as f64 + 1.0)
}

/// The double series for 𝓘(t), reporting partial results instead of failing
/// when a cap is reached first (`converged = false`).
pub fn density_series_partial(
    arg: &DensityArg,
    budget: &SeriesBudget,
) -> Result<SeriesDiagnostics> {
    budget.trunc.validate()?;
    let t = arg.t;
    let mut piece_one = 0.0;
    let mut piece_two = 0.0;
    let mut rule = StopRule::new(&budget.trunc);
    let mut r_used = 0;
    let mut k_total = 0;
    let mut inner_ok = true;
    let mut last_term = f64::INFINITY;
    let mut n_used = 0;
    let mut stopped = false;
    for n in 0..=budget.n_max {
        // (−2)^n/(2n)! and (−2)^n/(2n+1)!, magnitude in logs, sign outside
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let ln_two_n = n as f64 * LN_2;
        let w1 = ln_two_n - ln_factorial(2 * n)?;
        let w2 = ln_two_n - ln_factorial(2 * n + 1)?;
        let (a, r1, k1, ok1) = inner_sum(n, n, 2.0, 1.0, w1, t, budget)?;
        let (b, r2, k2, ok2) = inner_sum(n, n + 1, 1.0, 2.0, w2, t, budget)?;
        inner_ok &= ok1 && ok2;
        r_used = r_used.max(r1).max(r2);
        k_total += k1 + k2;
        piece_one += sign * a;
        piece_two += sign * b;
        n_used = n + 1;
        last_term = a.abs().max(b.abs());
        if rule.observe(last_term, piece_one - piece_two) {
            stopped = true;
            break;
        }
    }
    let prefactor = 2.0 * t * (-t).exp() / PI.sqrt();
    let diff = piece_one - piece_two;
    let value = prefactor * diff;
    let err = prefactor * (last_term + 16.0 * f64::EPSILON * (piece_one.abs() + piece_two.abs()));
    Ok(SeriesDiagnostics {
        value,
        piece_one,
        piece_two,
        n_terms_used: n_used,
        r_terms_used: r_used,
        k_terms_total: k_total,
        abs_err_estimate: err,
        converged: stopped && inner_ok,
    })
}

/// The double series for 𝓘(t). Reaching `n_max` or `r_max` before the
/// stopping rule fires is a [`Error::NonConvergence`].
pub fn density_series(arg: &DensityArg, budget: &SeriesBudget) -> Result<SeriesDiagnostics> {
    let d = density_series_partial(arg, budget)?;
    if !d.converged {
        return Err(Error::NonConvergence {
            what: "density double series",
            terms: d.n_terms_used,
        });
    }
    Ok(d)
}

impl SeriesDiagnostics {
    pub fn as_eval(&self) -> EvalResult {
        EvalResult {
            value: self.value,
            abs_err_estimate: self.abs_err_estimate,
            effort: self.k_terms_total,
            method: Method::DoubleSeries,
            converged: self.converged,
        }
    }
}

/// The Laplace-domain factor e^(w√(w²−1) − w² + 1) / (w + √(w²−1)) on the
/// principal branch cut along [−1, 1].
pub fn laplace_factor(w: Complex64) -> Complex64 {
    let root = (w - 1.0).sqrt() * (w + 1.0).sqrt();
    let sum = w + root;
    // w√(w²−1) − w² = −w/(w + √(w²−1)) without cancellation
    let exponent = -w / sum + 1.0;
    exponent.exp() / sum
}

/// Leading behaviour of [`laplace_factor`] for large |w|:
/// √e (1/(2w) + 1/(16 w³)). Its inverse transform is √e (1/2 + t²/32).
fn laplace_asymptote(w: Complex64) -> Complex64 {
    let e_half = 0.5f64.exp();
    let inv = w.inv();
    e_half * (0.5 * inv + inv * inv * inv / 16.0)
}

/// Default Bromwich truncation height, 400/t.
pub fn default_bromwich_height(t: f64) -> f64 {
    400.0 / t
}

/// Coarse accuracy that the Bromwich route is expected to reach.
pub const BROMWICH_TARGET: f64 = 1e-4;

/// e^((w−1)t) [F(w) − asymptote(w)] on the line w = c + iu.
fn bromwich_remainder(t: f64, c: f64, u: f64) -> Complex64 {
    let w = Complex64::new(c, u);
    ((w - 1.0) * t).exp() * (laplace_factor(w) - laplace_asymptote(w))
}

/// Starts from [`default_bromwich_height`] and doubles (at most ten times)
/// until the neglected tail is estimated below a tenth of
/// [`BROMWICH_TARGET`]. The fixed default is too short once e^((c−1)t) is
/// large.
pub fn bromwich_height(arg: &DensityArg) -> f64 {
    let base = default_bromwich_height(arg.t);
    let mut u = base;
    while bromwich_remainder(arg.t, arg.c, u).norm() / (PI * arg.t) > 0.1 * BROMWICH_TARGET
        && u < 1024.0 * base
    {
        u *= 2.0;
    }
    u
}

/// 𝓘(t) by integrating the Bromwich integral along w = c + iu, |u| ≤ U.
///
/// The two leading terms of the large-|w| expansion are subtracted and
/// added back through their exact inverse transforms, leaving an integrand
/// that decays like |u|^(−5). The conjugate symmetry of the integrand gives
/// 𝓘(t) = e^(−t) [√e (1/2 + t²/32) + (1/π) ∫_0^U Re(e^(wt) R(w)) du].
///
/// `abs_err_estimate` combines the quadrature estimate with the size of the
/// neglected oscillatory tail; `converged` is false if the total exceeds
/// [`BROMWICH_TARGET`]. The integrand scales like e^((c−1)t), so `cfg`
/// tolerances far below that scale may exhaust the subdivision budget; the
/// estimate still reports what was reached.
pub fn density_bromwich(arg: &DensityArg, height: f64, cfg: &QuadConfig) -> Result<EvalResult> {
    if !(height > 0.0) || !height.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Bromwich truncation height must be positive, got {height}"
        )));
    }
    let (t, c) = (arg.t, arg.c);
    // e^{(w−1)t} keeps the e^{−t} prefactor inside
    let remainder = |u: f64| bromwich_remainder(t, c, u);
    let q = integrate_finite(|u| remainder(u).re, 0.0, height, cfg)?;
    let e_half = 0.5f64.exp();
    let analytic = (-t).exp() * e_half * (0.5 + t * t / 32.0);
    let value = analytic + q.value / PI;
    // ∫_U^∞ A(u) e^{iut} du ≈ A(U)/t for slowly varying amplitude A
    let tail = remainder(height).norm() / (PI * t);
    let err = q.abs_err_estimate / PI + tail;
    Ok(EvalResult {
        value,
        abs_err_estimate: err,
        effort: q.nodes_used,
        method: Method::Bromwich,
        converged: err <= BROMWICH_TARGET,
    })
}
