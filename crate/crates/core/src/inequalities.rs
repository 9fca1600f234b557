//! Signed margins for three modified-Bessel inequalities on ν > −1/2, x > 0:
//!
//! - A1: (1/x) I_ν I_{ν+1} > I_{ν+1}² − I_ν I_{ν+2}
//! - A2: I_ν > (1 + (2ν+1)/(2x)) I_{ν+1}
//! - Jones: I_ν > I_{ν+1}
//!
//! plus the monotonicity and log-convexity of f(x) = e^(−x) x^(−ν) I_ν(x).
//!
//! Margins are reported in exponentially scaled units: A1 carries the factor
//! e^(−2x), A2 and Jones carry e^(−x). The sign and the relative margin are
//! computed from the ratios I_{ν+1}/I_ν and I_{ν+2}/I_ν, so neither depends
//! on whether the reported margin itself underflows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Truncation;
use crate::specfun::{bessel_i, bessel_i_scaled, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IneqPoint {
    pub nu: f64,
    pub x: f64,
}

impl IneqPoint {
    pub fn new(nu: f64, x: f64) -> Result<Self> {
        if !(nu > -0.5) || !nu.is_finite() {
            return Err(Error::Domain {
                what: "inequality point",
                value: nu,
                expected: "ν > −1/2",
            });
        }
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain {
                what: "inequality point",
                value: x,
                expected: "x > 0 and finite",
            });
        }
        Ok(Self { nu, x })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    A1,
    A2,
    Jones,
}

impl Inequality {
    pub const ALL: [Inequality; 3] = [Inequality::A1, Inequality::A2, Inequality::Jones];

    pub fn as_str(&self) -> &'static str {
        match self {
            Inequality::A1 => "a1",
            Inequality::A2 => "a2",
            Inequality::Jones => "jones",
        }
    }
}

impl std::str::FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a1" => Ok(Inequality::A1),
            "a2" => Ok(Inequality::A2),
            "jones" => Ok(Inequality::Jones),
            other => Err(Error::InvalidParameter(format!(
                "unknown inequality `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub point: IneqPoint,
    pub inequality: Inequality,
    /// Left side minus right side, in scaled units.
    pub margin: f64,
    /// margin / left side.
    pub relative_margin: f64,
    pub holds: bool,
}

/// Below this x the ratios come from the normalized power series.
const SMALL_X: f64 = 1.0;

/// N_μ(x) = Σ_k (x²/4)^k / (k! (μ+1)_k), so that
/// I_μ(x) = (x/2)^μ N_μ(x) / Γ(μ+1).
fn normalized_series(mu: f64, x: f64) -> Result<f64> {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (mu + kf));
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "normalized Bessel series",
        terms: 200,
    })
}

/// Scaled I_ν and the ratios I_{ν+1}/I_ν, I_{ν+2}/I_ν.
struct Ratios {
    i_nu_scaled: f64,
    q1: f64,
    q2: f64,
}

fn ratios(p: &IneqPoint) -> Result<Ratios> {
    let trunc = Truncation::default();
    let (nu, x) = (p.nu, p.x);
    if x <= SMALL_X {
        let n0 = normalized_series(nu, x)?;
        let n1 = normalized_series(nu + 1.0, x)?;
        let n2 = normalized_series(nu + 2.0, x)?;
        let h = 0.5 * x;
        let q1 = h / (nu + 1.0) * n1 / n0;
        let q2 = h * h / ((nu + 1.0) * (nu + 2.0)) * n2 / n0;
        let ln_i = nu * h.ln() - ln_gamma(nu + 1.0)? + n0.ln() - x;
        Ok(Ratios {
            i_nu_scaled: ln_i.exp(),
            q1,
            q2,
        })
    } else {
        let i0 = bessel_i_scaled(nu, x, &trunc)?.value;
        let i1 = bessel_i_scaled(nu + 1.0, x, &trunc)?.value;
        let i2 = bessel_i_scaled(nu + 2.0, x, &trunc)?.value;
        Ok(Ratios {
            i_nu_scaled: i0,
            q1: i1 / i0,
            q2: i2 / i0,
        })
    }
}

fn report(p: &IneqPoint, inequality: Inequality, scale: f64, lhs: f64, diff: f64) -> MarginReport {
    MarginReport {
        point: *p,
        inequality,
        margin: scale * diff,
        relative_margin: diff / lhs,
        holds: diff > 0.0,
    }
}

fn evaluate(p: &IneqPoint, r: &Ratios, which: Inequality) -> MarginReport {
    let x = p.x;
    match which {
        Inequality::A1 => {
            // divided through by I_ν²
            let lhs = r.q1 / x;
            let diff = lhs - r.q1 * r.q1 + r.q2;
            report(p, which, r.i_nu_scaled * r.i_nu_scaled, lhs, diff)
        }
        Inequality::A2 => {
            let diff = 1.0 - (1.0 + (2.0 * p.nu + 1.0) / (2.0 * x)) * r.q1;
            report(p, which, r.i_nu_scaled, 1.0, diff)
        }
        Inequality::Jones => report(p, which, r.i_nu_scaled, 1.0, 1.0 - r.q1),
    }
}

/// (1/x) I_ν I_{ν+1} − I_{ν+1}² + I_ν I_{ν+2}, times e^(−2x).
pub fn margin_a1(p: &IneqPoint) -> Result<MarginReport> {
    Ok(evaluate(p, &ratios(p)?, Inequality::A1))
}

/// I_ν − (1 + (2ν+1)/(2x)) I_{ν+1}, times e^(−x).
pub fn margin_a2(p: &IneqPoint) -> Result<MarginReport> {
    Ok(evaluate(p, &ratios(p)?, Inequality::A2))
}

/// I_ν − I_{ν+1}, times e^(−x).
pub fn margin_jones(p: &IneqPoint) -> Result<MarginReport> {
    Ok(evaluate(p, &ratios(p)?, Inequality::Jones))
}

pub fn margin(p: &IneqPoint, which: Inequality) -> Result<MarginReport> {
    Ok(evaluate(p, &ratios(p)?, which))
}

/// All three margins from one set of Bessel evaluations, in [`Inequality::ALL`] order.
pub fn margins_all(p: &IneqPoint) -> Result<[MarginReport; 3]> {
    let r = ratios(p)?;
    Ok(Inequality::ALL.map(|w| evaluate(p, &r, w)))
}

/// The same margins from unscaled I_ν values, written out term by term and
/// then multiplied by the matching power of e^(−x). Intended as a cross-check
/// for moderate x, where the unscaled values stay finite.
pub fn margins_unscaled(p: &IneqPoint) -> Result<[MarginReport; 3]> {
    let trunc = Truncation::default();
    let (nu, x) = (p.nu, p.x);
    let i0 = bessel_i(nu, x, &trunc)?.value;
    let i1 = bessel_i(nu + 1.0, x, &trunc)?.value;
    let i2 = bessel_i(nu + 2.0, x, &trunc)?.value;
    let e1 = (-x).exp();

    let a1_lhs = i0 * i1 / x;
    let a1 = a1_lhs - (i1 * i1 - i0 * i2);
    let a2 = i0 - (1.0 + (2.0 * nu + 1.0) / (2.0 * x)) * i1;
    let jones = i0 - i1;
    let mk = |inequality, scale: f64, lhs: f64, m: f64| MarginReport {
        point: *p,
        inequality,
        margin: scale * m,
        relative_margin: m / lhs,
        holds: m > 0.0,
    };
    Ok([
        mk(Inequality::A1, e1 * e1, a1_lhs, a1),
        mk(Inequality::A2, e1, i0, a2),
        mk(Inequality::Jones, e1, i0, jones),
    ])
}

/// f = e^(−x) x^(−ν) I_ν and the quantities whose positivity expresses
/// that f is decreasing and log-convex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FProperties {
    pub f: f64,
    /// −f′(x) = e^(−x) x^(−ν) (I_ν − I_{ν+1}).
    pub f_decreasing_margin: f64,
    /// g g″ − (g′)² for g = x^(−ν) I_ν, times e^(−2x).
    pub log_convexity_margin: f64,
    /// Centered difference of f with the supplied step.
    pub f_prime_finite_difference: f64,
}

fn f_value(nu: f64, x: f64, trunc: &Truncation) -> Result<f64> {
    Ok(x.powf(-nu) * bessel_i_scaled(nu, x, trunc)?.value)
}

/// Evaluates f and its derived margins at `p`; `h` is only used for the
/// finite-difference derivative and must satisfy 0 < h < x/2.
pub fn f_properties(p: &IneqPoint, h: f64) -> Result<FProperties> {
    if !(h > 0.0) || h >= 0.5 * p.x {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step h = {h} must lie in (0, x/2) with x = {}",
            p.x
        )));
    }
    let trunc = Truncation::default();
    let (nu, x) = (p.nu, p.x);
    let i0 = bessel_i_scaled(nu, x, &trunc)?.value;
    let i1 = bessel_i_scaled(nu + 1.0, x, &trunc)?.value;
    let i2 = bessel_i_scaled(nu + 2.0, x, &trunc)?.value;
    let w = x.powf(-nu);

    let g = w * i0;
    let dg = w * i1;
    let d2g = w / x * i1 + w * i2;
    let fd = (f_value(nu, x + h, &trunc)? - f_value(nu, x - h, &trunc)?) / (2.0 * h);
    Ok(FProperties {
        f: g,
        f_decreasing_margin: w * (i0 - i1),
        log_convexity_margin: g * d2g - dg * dg,
        f_prime_finite_difference: fd,
    })
}

/// Sampling box and budget for [`sweep`]. Ranges are half-open, `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub nu_range: (f64, f64),
    pub x_range: (f64, f64),
    /// The sweep visits `samples_per_axis²` points.
    pub samples_per_axis: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            nu_range: (-0.5, 10.0),
            x_range: (0.0, 100.0),
            samples_per_axis: 100,
            seed: 0x5eed,
        }
    }
}

/// Width of the band next to the lower edges that boundary samples fall in.
pub const EDGE_BAND: f64 = 1e-3;

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let (nl, nh) = self.nu_range;
        let (xl, xh) = self.x_range;
        if !(nl >= -0.5) || !(nh > nl) || !nh.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ν range ({nl}, {nh}] must satisfy −1/2 ≤ lo < hi < ∞"
            )));
        }
        if !(xl >= 0.0) || !(xh > xl) || !xh.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "x range ({xl}, {xh}] must satisfy 0 ≤ lo < hi < ∞"
            )));
        }
        if self.samples_per_axis == 0 {
            return Err(Error::InvalidParameter(
                "samples_per_axis must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The deterministic list of sample points. Even indices are uniform in
    /// the box; odd indices cycle through the ν edge, the x edge and the
    /// corner, each within [`EDGE_BAND`] of the lower bound.
    pub fn points(&self) -> Result<Vec<IneqPoint>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (nl, nh) = self.nu_range;
        let (xl, xh) = self.x_range;
        // maps u ∈ [0, 1) onto (lo, lo + w]
        let pick = |rng: &mut ChaCha8Rng, lo: f64, w: f64| lo + w * (1.0 - rng.gen::<f64>());
        let n = self.samples_per_axis * self.samples_per_axis;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (nu, x) = if i % 2 == 0 {
                (pick(&mut rng, nl, nh - nl), pick(&mut rng, xl, xh - xl))
            } else {
                let nu_band = EDGE_BAND.min(nh - nl);
                let x_band = EDGE_BAND.min(xh - xl);
                match (i / 2) % 3 {
                    0 => (pick(&mut rng, nl, nu_band), pick(&mut rng, xl, xh - xl)),
                    1 => (pick(&mut rng, nl, nh - nl), pick(&mut rng, xl, x_band)),
                    _ => (pick(&mut rng, nl, nu_band), pick(&mut rng, xl, x_band)),
                }
            };
            out.push(IneqPoint::new(nu, x)?);
        }
        Ok(out)
    }
}

/// Evaluates the chosen inequalities at every sample point. Reports are
/// ordered by sample index, then by `which`. A violated inequality shows up
/// as `holds == false`; only invalid configuration or a failed Bessel
/// evaluation is an error.
pub fn sweep(cfg: &SweepConfig, which: &[Inequality]) -> Result<Vec<MarginReport>> {
    let points = cfg.points()?;
    let mut out = Vec::with_capacity(points.len() * which.len());
    for p in &points {
        let r = ratios(p)?;
        out.extend(which.iter().map(|&w| evaluate(p, &r, w)));
    }
    Ok(out)
}
