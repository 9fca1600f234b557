//! Adaptive Gauss-Kronrod (7/15) integration.
//!
//! Panels are bisected worst-first until the summed error estimate meets
//! `max(abs_tol, rel_tol * |value|)`. The per-panel estimate is the
//! QUADPACK rescaling of |K15 − G7|, which is conservative for smooth
//! integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let c = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(
                "quadrature max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken by position so the bisection order is deterministic
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite {
                what: "quadrature",
                at: x,
            })
        }
    };

    let fc = eval(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let err = rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h);
    Ok(Panel {
        a,
        b,
        value: res_k * half,
        err,
    })
}

/// ∫_a^b f(x) dx.
///
/// Non-convergence within `max_subdivisions` panels is reported through
/// `converged = false`, not as an error. A non-finite integrand value is an
/// error.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    cfg.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integration interval must satisfy a < b with finite ends, got [{a}, {b}]"
        )));
    }
    let first = gauss_kronrod(&f, a, b)?;
    let mut nodes = 15;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut value = first.value;
    let mut err = first.err;
    let mut converged = err <= cfg.target(value);
    while !converged && heap.len() < cfg.max_subdivisions {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // panel narrower than the floating-point grid
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        nodes += 30;
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        converged = err <= cfg.target(value);
    }
    // re-add in interval order so the reported value does not depend on
    // the drift of the running updates
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    Ok(QuadResult {
        value,
        abs_err_estimate: err,
        nodes_used: nodes,
        converged: err <= cfg.target(value),
    })
}

/// Upper end of the log-substituted range for decay x^(−β).
pub fn log_substitution_cutoff(abs_tol: f64, decay_exponent: f64) -> f64 {
    let excess = decay_exponent - 1.0;
    // 1/(β−1) bounds the dropped tail's integral, so its log widens the cut
    let base = (1.0 / abs_tol).ln() + 5.0 + (1.0 / excess).ln().max(0.0);
    (base / excess).max(30.0)
}

/// ∫_y^∞ f(x) dx for an integrand decaying like x^(−β), β > 1.
///
/// Substitutes x = y e^u, giving ∫_0^∞ f(y e^u) y e^u du with an
/// exponentially decaying integrand, and truncates at the cutoff of
/// [`log_substitution_cutoff`].
pub fn integrate_semi_infinite_log<F: Fn(f64) -> f64>(
    f: F,
    y: f64,
    decay_exponent_hint: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "semi-infinite integral needs a finite lower limit y > 0, got {y}"
        )));
    }
    if !(decay_exponent_hint > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "decay exponent hint must exceed 1, got {decay_exponent_hint}"
        )));
    }
    let mut upper = log_substitution_cutoff(cfg.abs_tol, decay_exponent_hint);
    // keep y e^u representable
    upper = upper.min(700.0 - y.ln());
    let g = |u: f64| {
        let x = y * u.exp();
        f(x) * x
    };
    integrate_finite(g, 0.0, upper, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn kronrod_weights_integrate_constants_and_polynomials() {
        let total: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        assert!((total - 2.0).abs() < 1e-15);
        let gauss: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((gauss - 2.0).abs() < 1e-15);
        // K15 is exact through degree 22 on a single panel
        let p = gauss_kronrod(&|x: f64| x.powi(22), -1.0, 1.0).unwrap();
        assert!((p.value - 2.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn trivial_integrals() {
        let r = integrate_finite(|_| 1.0, 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15 && r.converged);
        let r = integrate_finite(|x| x, 0.0, 2.0, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_integral() {
        let r = integrate_finite(|x: f64| (-x * x).exp(), -6.0, 6.0, &cfg()).unwrap();
        let sqrt_pi = crate::specfun::ln_gamma(0.5).unwrap().exp();
        assert!((r.value - sqrt_pi).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫_0^1 x^(-1/2) dx = 2
        let r = integrate_finite(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn non_convergence_is_flagged_not_raised() {
        let tight = QuadConfig::new(1e-15, 1e-15, 3).unwrap();
        let r = integrate_finite(|x: f64| (50.0 * x).sin() * x.sqrt(), 0.0, 10.0, &tight).unwrap();
        assert!(!r.converged);
        assert!(r.abs_err_estimate > 0.0);
    }

    #[test]
    fn nan_integrand_is_an_error() {
        let r = integrate_finite(|x: f64| (x - 0.5).ln(), 0.0, 1.0, &cfg());
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn bad_intervals_and_configs_are_rejected() {
        assert!(integrate_finite(|x| x, 1.0, 1.0, &cfg()).is_err());
        assert!(integrate_finite(|x| x, 2.0, 1.0, &cfg()).is_err());
        assert!(QuadConfig::new(0.0, 1e-10, 10).is_err());
        assert!(QuadConfig::new(1e-10, 1e-10, 0).is_err());
    }

    #[test]
    fn semi_infinite_examples() {
        let r = integrate_semi_infinite_log(|x: f64| x.powi(-2), 1.0, 2.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11);
        let r = integrate_semi_infinite_log(|x: f64| x.powi(-2), 2.0, 2.0, &cfg()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-11);
        let r = integrate_semi_infinite_log(|x: f64| (-x).exp(), 1.0, 50.0, &cfg()).unwrap();
        assert!((r.value - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_rejects_weak_decay() {
        assert!(integrate_semi_infinite_log(|x: f64| 1.0 / x, 1.0, 1.0, &cfg()).is_err());
        assert!(integrate_semi_infinite_log(|x: f64| 1.0 / x, 0.0, 2.0, &cfg()).is_err());
    }

    #[test]
    fn additivity_over_an_interior_point() {
        let f = |x: f64| (x.sin() + 2.0) * (-0.3 * x).exp();
        let whole = integrate_finite(f, 0.0, 5.0, &cfg()).unwrap().value;
        for &m in &[0.1, 1.7, 2.5, 4.99] {
            let l = integrate_finite(f, 0.0, m, &cfg()).unwrap().value;
            let r = integrate_finite(f, m, 5.0, &cfg()).unwrap().value;
            assert!((whole - l - r).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn error_estimates_are_honest_on_closed_forms() {
        let e = std::f64::consts::E;
        type Case = (Box<dyn Fn(f64) -> f64>, f64, f64, f64);
        let cases: Vec<Case> = vec![
            (Box::new(|x: f64| x.exp()), 0.0, 1.0, e - 1.0),
            (Box::new(|x: f64| x.sin()), 0.0, PI, 2.0),
            (Box::new(|x: f64| x.cos().powi(2)), 0.0, PI, PI / 2.0),
            (Box::new(|x: f64| 1.0 / (1.0 + x * x)), -1.0, 1.0, PI / 2.0),
            (Box::new(|x: f64| 1.0 / x), 1.0, e, 1.0),
            (Box::new(|x: f64| x.ln()), 1.0, e, 1.0),
            (Box::new(|x: f64| x.sqrt()), 0.0, 1.0, 2.0 / 3.0),
            (Box::new(|x: f64| x.powi(7)), 0.0, 2.0, 32.0),
            (
                Box::new(|x: f64| (-x).exp() * x),
                0.0,
                40.0,
                1.0 - 41.0 * (-40f64).exp(),
            ),
            (
                Box::new(|x: f64| 1.0 / (1.0 + x).powi(2)),
                0.0,
                1000.0,
                1.0 - 1.0 / 1001.0,
            ),
            (Box::new(|x: f64| (10.0 * x).sin()), 0.0, PI, 0.0),
            (
                Box::new(|x: f64| (x * x).exp()),
                0.0,
                1.0,
                1.462_651_745_907_181_6,
            ),
            (Box::new(|x: f64| -x.ln()), 0.0, 1.0, 1.0),
            (Box::new(|x: f64| x.abs()), -1.0, 2.0, 2.5),
            (
                Box::new(|x: f64| (x - 0.3).abs().sqrt()),
                0.0,
                1.0,
                (2.0 / 3.0) * (0.3f64.powf(1.5) + 0.7f64.powf(1.5)),
            ),
            (Box::new(|x: f64| x.cosh()), -2.0, 2.0, 2.0 * 2f64.sinh()),
            (
                Box::new(|x: f64| 1.0 / x.cosh().powi(2)),
                -20.0,
                20.0,
                2.0 * 20f64.tanh(),
            ),
            (
                Box::new(|x: f64| x * (3.0 * x).sin()),
                0.0,
                2.0 * PI,
                -2.0 * PI / 3.0,
            ),
            (
                Box::new(|x: f64| (-x * x / 2.0).exp() * x * x),
                -10.0,
                10.0,
                (2.0 * PI).sqrt(),
            ),
            (
                Box::new(|x: f64| 1.0 / (x + 1e-3)),
                0.0,
                1.0,
                (1.001f64 / 1e-3).ln(),
            ),
        ];
        assert_eq!(cases.len(), 20);
        for (i, (f, a, b, exact)) in cases.iter().enumerate() {
            let r = integrate_finite(f, *a, *b, &cfg()).unwrap();
            let actual = (r.value - exact).abs();
            // an estimate of zero still has to cover floating-point noise
            let allowed = 10.0 * r.abs_err_estimate + 4.0 * f64::EPSILON * exact.abs().max(1.0);
            assert!(
                actual <= allowed,
                "case {i}: err {actual:e} vs estimate {:e}",
                r.abs_err_estimate
            );
        }
    }
}
