//! Modified Bessel function of the first kind, I_ν(x), for ν ≥ −1/2 and
//! x ≥ 0, plus the exponentially scaled e^(−x) I_ν(x).
//!
//! Two routes:
//!
//! - the defining power series Σ (x/2)^(2k+ν) / (k! Γ(k+ν+1)). Every term is
//!   positive, so the only hazard is over/underflow. The sum is anchored at
//!   its largest term (computed through ln Γ) and extended in both
//!   directions by the term ratio, which keeps it finite for any x.
//! - the large-argument expansion
//!   e^(−x) I_ν(x) ~ (2πx)^(−1/2) Σ (−1)^k a_k(ν) / x^k, used past
//!   [`BESSEL_X_SWITCH`] whenever it reaches the requested tolerance before
//!   its terms start to grow.

use std::f64::consts::PI;

use super::gamma::{ln_gamma, rgamma};
use crate::error::{Error, Result};
use crate::series::{EvalResult, Method, StopRule, Truncation};

/// Argument above which the asymptotic expansion is tried first.
pub const BESSEL_X_SWITCH: f64 = 30.0;

/// Past this the unscaled I_ν overflows double precision.
const UNSCALED_X_MAX: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselRoute {
    Auto,
    PowerSeries,
    Asymptotic,
}

fn check_domain(nu: f64, x: f64) -> Result<()> {
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(Error::Domain {
            what: "bessel_i",
            value: nu,
            expected: "order ν ≥ −1/2",
        });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "bessel_i",
            value: x,
            expected: "argument x ≥ 0 and finite",
        });
    }
    if x == 0.0 && nu < 0.0 {
        return Err(Error::Domain {
            what: "bessel_i",
            value: x,
            expected: "x > 0 when ν < 0 (I_ν is unbounded at the origin)",
        });
    }
    Ok(())
}

/// I_ν(x). Fails with [`Error::Overflow`] for x > 700; use
/// [`bessel_i_scaled`] there.
pub fn bessel_i(nu: f64, x: f64, trunc: &Truncation) -> Result<EvalResult> {
    check_domain(nu, x)?;
    trunc.validate()?;
    if x > UNSCALED_X_MAX {
        return Err(Error::Overflow { what: "bessel_i" });
    }
    if x <= BESSEL_X_SWITCH {
        return power_series(nu, x, false, trunc);
    }
    let scaled = bessel_i_scaled(nu, x, trunc)?;
    let e = x.exp();
    Ok(EvalResult {
        value: scaled.value * e,
        abs_err_estimate: scaled.abs_err_estimate * e,
        ..scaled
    })
}

/// e^(−x) I_ν(x); finite for every x ≥ 0.
pub fn bessel_i_scaled(nu: f64, x: f64, trunc: &Truncation) -> Result<EvalResult> {
    bessel_i_scaled_route(nu, x, BesselRoute::Auto, trunc)
}

/// [`bessel_i_scaled`] with the route pinned, for cross-checking the two
/// evaluation methods against each other.
pub fn bessel_i_scaled_route(
    nu: f64,
    x: f64,
    route: BesselRoute,
    trunc: &Truncation,
) -> Result<EvalResult> {
    check_domain(nu, x)?;
    trunc.validate()?;
    match route {
        BesselRoute::PowerSeries => power_series(nu, x, true, trunc),
        BesselRoute::Asymptotic => asymptotic_scaled(nu, x, trunc).ok_or(Error::NonConvergence {
            what: "bessel_i asymptotic expansion",
            terms: trunc.max_terms,
        }),
        BesselRoute::Auto => {
            if x > BESSEL_X_SWITCH {
                if let Some(r) = asymptotic_scaled(nu, x, trunc) {
                    return Ok(r);
                }
            }
            power_series(nu, x, true, trunc)
        }
    }
}

fn power_series(nu: f64, x: f64, scaled: bool, trunc: &Truncation) -> Result<EvalResult> {
    if x == 0.0 {
        let v = if nu == 0.0 { 1.0 } else { 0.0 };
        return Ok(EvalResult::new(v, 0.0, 1, Method::PowerSeries));
    }
    let half = 0.5 * x;
    let q = half * half;
    // term_{k+1} / term_k
    let ratio = |k: f64| q / ((k + 1.0) * (k + 1.0 + nu));

    // largest term: first k with ratio(k) < 1
    let disc = (nu * nu + 4.0 * q).sqrt();
    let mut peak = (0.5 * (disc - nu) - 1.0).ceil().max(0.0);
    while peak > 0.0 && ratio(peak - 1.0) < 1.0 {
        peak -= 1.0;
    }
    while ratio(peak) >= 1.0 {
        peak += 1.0;
    }

    let scale = if scaled { x } else { 0.0 };
    let peak_term = if peak == 0.0 {
        let direct = half.powf(nu) * rgamma(nu + 1.0) * (-scale).exp();
        if direct.is_finite() && direct > 0.0 {
            direct
        } else {
            (nu * half.ln() - ln_gamma(nu + 1.0)? - scale).exp()
        }
    } else {
        ((2.0 * peak + nu) * half.ln() - ln_gamma(peak + 1.0)? - ln_gamma(peak + nu + 1.0)? - scale)
            .exp()
    };
    if !peak_term.is_finite() {
        return Err(Error::Overflow { what: "bessel_i" });
    }
    if peak_term == 0.0 {
        return Ok(EvalResult::new(
            0.0,
            f64::MIN_POSITIVE,
            1,
            Method::PowerSeries,
        ));
    }

    // Sum the decreasing flanks from the outside in so small terms are
    // accumulated before the large ones.
    let mut rule = StopRule::new(trunc);
    let mut upper = Vec::new();
    let mut term = peak_term;
    let mut k = peak;
    let mut running = peak_term;
    loop {
        term *= ratio(k);
        k += 1.0;
        upper.push(term);
        running += term;
        if rule.observe(term, running) {
            break;
        }
        if upper.len() >= trunc.max_terms {
            return Err(Error::NonConvergence {
                what: "bessel_i power series",
                terms: upper.len(),
            });
        }
    }
    let last_ratio = ratio(k);
    let tail_bound = term * last_ratio / (1.0 - last_ratio);

    let mut lower = Vec::new();
    rule.reset();
    let mut term = peak_term;
    let mut k = peak;
    while k > 0.0 {
        k -= 1.0;
        term /= ratio(k);
        lower.push(term);
        running += term;
        if rule.observe(term, running) {
            break;
        }
    }
    let below_bound = if k > 0.0 { term * k } else { 0.0 };

    let mut sum = 0.0;
    for t in upper.iter().rev() {
        sum += t;
    }
    for t in lower.iter().rev() {
        sum += t;
    }
    sum += peak_term;

    let effort = upper.len() + lower.len() + 1;
    let err = tail_bound + below_bound + 4.0 * f64::EPSILON * sum;
    Ok(EvalResult::new(sum, err, effort, Method::PowerSeries))
}

/// Largest tolerated ratio between the biggest asymptotic term and the sum,
/// which bounds the rounding loss to about 1e-13 relative.
const MAX_ASYMPTOTIC_PEAK_RATIO: f64 = 500.0;

/// Returns `None` when the expansion's terms start growing before the
/// tolerance is met, or when they peak far above the sum.
fn asymptotic_scaled(nu: f64, x: f64, trunc: &Truncation) -> Option<EvalResult> {
    if x <= 0.0 {
        return None;
    }
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut peak = 1.0_f64;
    let mut rule = StopRule::new(trunc);
    for k in 0..trunc.max_terms {
        let odd = (2 * k + 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * (k as f64 + 1.0) * x);
        if next == 0.0 {
            // half-integer order: the expansion terminates
            let pre = 1.0 / (2.0 * PI * x).sqrt();
            return Some(EvalResult::new(
                sum * pre,
                4.0 * f64::EPSILON * sum.abs() * pre,
                k + 1,
                Method::Asymptotic,
            ));
        }
        if next.abs() > term.abs() && (odd + 2.0) * (odd + 2.0) > mu {
            return None;
        }
        sum += next;
        term = next;
        peak = peak.max(next.abs());
        if rule.observe(next, sum) {
            // large intermediate terms cancel; leave such cases to the series
            if peak > MAX_ASYMPTOTIC_PEAK_RATIO * sum.abs() {
                return None;
            }
            let pre = 1.0 / (2.0 * PI * x).sqrt();
            let err = (next.abs() + 4.0 * f64::EPSILON * peak) * pre;
            return Some(EvalResult::new(sum * pre, err, k + 2, Method::Asymptotic));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::gamma;

    fn tr() -> Truncation {
        Truncation::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Σ (x/2)^(2k+ν) / (k! Γ(k+ν+1)) summed in index order, for small x only.
    fn naive_series(nu: f64, x: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..80 {
            let kf = k as f64;
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            s += (0.5 * x).powf(2.0 * kf + nu) / (fact * gamma(kf + nu + 1.0).unwrap());
        }
        s
    }

    #[test]
    fn values_at_the_origin() {
        assert_eq!(bessel_i(0.0, 0.0, &tr()).unwrap().value, 1.0);
        assert_eq!(bessel_i(1.0, 0.0, &tr()).unwrap().value, 0.0);
        assert_eq!(bessel_i_scaled(0.0, 0.0, &tr()).unwrap().value, 1.0);
        assert!(bessel_i(-0.25, 0.0, &tr()).is_err());
    }

    #[test]
    fn half_order_closed_form() {
        let v = bessel_i(0.5, 1.0, &tr()).unwrap().value;
        let exact = (2.0 / PI).sqrt() * 1f64.sinh();
        assert!(rel(v, exact) < 1e-15);
        assert!((v - 0.937_674_888_245_488_5).abs() < 1e-15);
        // I_{-1/2}(x) = sqrt(2/(πx)) cosh x
        let v = bessel_i(-0.5, 2.0, &tr()).unwrap().value;
        assert!(rel(v, (1.0 / PI).sqrt() * 2f64.cosh()) < 5e-15);
    }

    #[test]
    fn scaled_half_order_at_ten() {
        let v = bessel_i_scaled(0.5, 10.0, &tr()).unwrap().value;
        let exact = (1.0 - (-20f64).exp()) / (2.0 * (5.0 * PI).sqrt());
        assert!(rel(v, exact) < 1e-14);
    }

    #[test]
    fn scaled_large_argument_leading_behaviour() {
        let v = bessel_i_scaled(2.0, 200.0, &tr()).unwrap().value;
        assert!(rel(v, 1.0 / (2.0 * PI * 200.0).sqrt()) < 0.02);
        // the half-integer expansion terminates: e^{-x} I_{1/2}(x) exactly
        let v = bessel_i_scaled(0.5, 650.0, &tr()).unwrap();
        assert_eq!(v.method, Method::Asymptotic);
        assert!(rel(v.value, 1.0 / (2.0 * PI * 650.0).sqrt()) < 1e-15);
    }

    #[test]
    fn peak_anchored_series_matches_naive_sum() {
        for &nu in &[-0.5, 0.0, 0.3, 1.0, 2.5, 7.0] {
            for &x in &[0.01, 0.5, 1.0, 3.0, 8.0] {
                let v = bessel_i(nu, x, &tr()).unwrap().value;
                assert!(rel(v, naive_series(nu, x)) < 1e-13, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn known_integer_order_values() {
        // I_0(1), I_1(1), I_2(1)
        assert!(
            rel(
                bessel_i(0.0, 1.0, &tr()).unwrap().value,
                1.266_065_877_752_008_4
            ) < 1e-15
        );
        assert!(
            rel(
                bessel_i(1.0, 1.0, &tr()).unwrap().value,
                0.565_159_103_992_485
            ) < 1e-15
        );
        assert!(
            rel(
                bessel_i(2.0, 1.0, &tr()).unwrap().value,
                0.135_747_669_767_038_3
            ) < 1e-14
        );
    }

    #[test]
    fn routes_overlap_around_the_switch() {
        for &nu in &[-0.5, 0.0, 0.7, 1.0, 3.0, 6.5, 10.0] {
            let mut x = 25.0;
            while x <= 35.0 {
                let s = bessel_i_scaled_route(nu, x, BesselRoute::PowerSeries, &tr()).unwrap();
                let a = bessel_i_scaled_route(nu, x, BesselRoute::Asymptotic, &tr()).unwrap();
                assert!(rel(a.value, s.value) < 1e-11, "nu={nu} x={x}");
                x += 0.5;
            }
        }
    }

    #[test]
    fn large_order_falls_back_to_series() {
        let v = bessel_i_scaled(60.0, 40.0, &tr()).unwrap();
        assert_eq!(v.method, Method::PowerSeries);
        let s = bessel_i_scaled_route(60.0, 40.0, BesselRoute::PowerSeries, &tr()).unwrap();
        assert_eq!(v.value, s.value);
    }

    #[test]
    fn unscaled_overflow_is_flagged() {
        assert!(matches!(
            bessel_i(0.0, 701.0, &tr()),
            Err(Error::Overflow { .. })
        ));
        let v = bessel_i_scaled(0.0, 1e6, &tr()).unwrap().value;
        assert!(rel(v, 1.0 / (2.0 * PI * 1e6).sqrt()) < 1e-6);
    }

    #[test]
    fn error_estimate_covers_truncation() {
        let loose = Truncation::with_rel_tol(1e-6).unwrap();
        let v = bessel_i(1.0, 5.0, &loose).unwrap();
        let tight = bessel_i(1.0, 5.0, &tr()).unwrap();
        assert!((v.value - tight.value).abs() <= v.abs_err_estimate);
        assert!(v.effort < tight.effort);
    }
}
