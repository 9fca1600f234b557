//! Verification suites. Every check produces [`CheckRecord`]s; a suite
//! passes when all of its records do.

use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::time::Instant;

use clap::ValueEnum;
use fs_dist_core::density::{
    bessel_operator_d, bromwich_height, density_branch_cut, density_branch_cut_at,
    density_bromwich, density_series, DensityArg, SeriesBudget,
};
use fs_dist_core::inequalities::{
    f_properties, margins_all, margins_unscaled, sweep, IneqPoint, Inequality, SweepConfig,
};
use fs_dist_core::quadrature::{integrate_finite, integrate_semi_infinite_log, QuadConfig};
use fs_dist_core::specfun::{
    bessel_i, bessel_i_scaled, bessel_i_scaled_route, digamma, exp_integral_e1_route, gamma,
    hyp_pfq, pochhammer, BesselRoute, E1Route, PfqSpec,
};
use fs_dist_core::tail::{
    asymptotic_coefficient, asymptotic_term, normalization_factor, tail_asymptotic, tail_auto,
    tail_closed_form, tail_quadrature, TailParams, TermCap,
};
use fs_dist_core::Truncation;
use serde::{Deserialize, Serialize};

use crate::{csv_writer, num, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Specfun,
    Density,
    Tail,
    Ineq,
    All,
}

impl Suite {
    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Density => "density",
            Suite::Tail => "tail",
            Suite::Ineq => "ineq",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub inputs: String,
    pub routes: String,
    pub value_a: f64,
    pub value_b: f64,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub records: Vec<CheckRecord>,
    pub passed: usize,
    pub failed: usize,
    pub wall_time_secs: f64,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv_writer(out);
        w.write_record([
            "suite",
            "check",
            "inputs",
            "routes",
            "value_a",
            "value_b",
            "discrepancy",
            "tolerance",
            "pass",
        ])?;
        for r in &self.records {
            w.write_record([
                r.suite.clone(),
                r.check.clone(),
                r.inputs.clone(),
                r.routes.clone(),
                num(r.value_a),
                num(r.value_b),
                num(r.discrepancy),
                num(r.tolerance),
                r.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Collects records for one suite.
struct Recorder {
    suite: &'static str,
    records: Vec<CheckRecord>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            records: Vec::new(),
        }
    }

    /// Records `discrepancy <= tolerance`.
    #[allow(clippy::too_many_arguments)]
    fn check(
        &mut self,
        check: &str,
        inputs: String,
        routes: &str,
        a: f64,
        b: f64,
        discrepancy: f64,
        tolerance: f64,
    ) {
        let pass = discrepancy <= tolerance;
        self.push(check, inputs, routes, a, b, discrepancy, tolerance, pass);
    }

    /// Records relative agreement of `a` with the reference `b`.
    fn rel(&mut self, check: &str, inputs: String, routes: &str, a: f64, b: f64, tolerance: f64) {
        self.check(check, inputs, routes, a, b, ((a - b) / b).abs(), tolerance);
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        check: &str,
        inputs: String,
        routes: &str,
        a: f64,
        b: f64,
        d: f64,
        tol: f64,
        pass: bool,
    ) {
        self.records.push(CheckRecord {
            suite: self.suite.to_string(),
            check: check.to_string(),
            inputs,
            routes: routes.to_string(),
            value_a: a,
            value_b: b,
            discrepancy: d,
            tolerance: tol,
            pass,
        });
    }

    /// A check that could not be evaluated at all fails with a NaN record.
    fn failure(&mut self, check: &str, inputs: String, err: impl std::fmt::Display) {
        let routes = format!("error: {err}");
        self.push(
            check,
            inputs,
            &routes,
            f64::NAN,
            f64::NAN,
            f64::NAN,
            0.0,
            false,
        );
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Additive low-discrepancy sequence in up to three dimensions, in [0, 1).
fn quasi(i: usize, dim: usize) -> f64 {
    const ALPHA: [f64; 3] = [
        0.618_033_988_749_894_9,
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_2,
    ];
    (0.5 + (i + 1) as f64 * ALPHA[dim]).fract()
}

macro_rules! attempt {
    ($rec:expr, $check:expr, $inputs:expr, $body:expr) => {
        match (|| -> fs_dist_core::Result<()> { $body })() {
            Ok(()) => {}
            Err(e) => $rec.failure($check, $inputs, e),
        }
    };
}

fn specfun_suite() -> Vec<CheckRecord> {
    let mut r = Recorder::new("specfun");
    let tr = Truncation::default();

    for nu in linspace(-0.5, 10.0, 8) {
        for x in linspace(0.1, 30.0, 8) {
            let inputs = format!("nu={};x={}", num(nu), num(x));
            attempt!(r, "bessel-recurrence", inputs.clone(), {
                let a = bessel_i(nu, x, &tr)?.value;
                let b = bessel_i(nu + 1.0, x, &tr)?.value;
                let c = bessel_i(nu + 2.0, x, &tr)?.value;
                r.rel(
                    "bessel-recurrence",
                    inputs.clone(),
                    "I(nu)-I(nu+2)|2(nu+1)/x*I(nu+1)",
                    a - c,
                    2.0 * (nu + 1.0) / x * b,
                    1e-11,
                );
                let s = bessel_i_scaled(nu, x, &tr)?.value;
                r.rel(
                    "bessel-scaling",
                    inputs.clone(),
                    "scaled|exp(-x)*plain",
                    s,
                    (-x).exp() * a,
                    1e-13,
                );
                Ok(())
            });
        }
    }
    for &nu in &[0.0, 0.7, 3.0] {
        for x in linspace(25.0, 35.0, 11) {
            let inputs = format!("nu={};x={}", num(nu), num(x));
            attempt!(r, "bessel-route-overlap", inputs.clone(), {
                let a = bessel_i_scaled_route(nu, x, BesselRoute::Asymptotic, &tr)?.value;
                let s = bessel_i_scaled_route(nu, x, BesselRoute::PowerSeries, &tr)?.value;
                r.rel(
                    "bessel-route-overlap",
                    inputs.clone(),
                    "asymptotic|power-series",
                    a,
                    s,
                    1e-11,
                );
                Ok(())
            });
        }
    }
    for x in linspace(0.1, 100.0, 25) {
        let inputs = format!("x={}", num(x));
        attempt!(r, "digamma-recurrence", inputs.clone(), {
            let d = digamma(x + 1.0)? - digamma(x)?;
            r.check(
                "digamma-recurrence",
                inputs.clone(),
                "psi(x+1)-psi(x)|1/x",
                d,
                1.0 / x,
                (d - 1.0 / x).abs(),
                1e-12,
            );
            Ok(())
        });
    }
    for z in linspace(0.3, 50.0, 25) {
        let inputs = format!("z={}", num(z));
        attempt!(r, "digamma-duplication", inputs.clone(), {
            let lhs = digamma(2.0 * z)?;
            let rhs = 0.5 * digamma(z)? + 0.5 * digamma(z + 0.5)? + LN_2;
            r.check(
                "digamma-duplication",
                inputs.clone(),
                "psi(2z)|duplication",
                lhs,
                rhs,
                (lhs - rhs).abs(),
                1e-12,
            );
            Ok(())
        });
    }
    for &a in &[0.3, 1.7, 5.5, 12.25] {
        for &k in &[0u32, 1, 5, 10, 20] {
            let inputs = format!("a={};k={k}", num(a));
            attempt!(r, "pochhammer-gamma", inputs.clone(), {
                let p = pochhammer(a, k)?;
                let g = gamma(a + k as f64)? / gamma(a)?;
                r.rel(
                    "pochhammer-gamma",
                    inputs.clone(),
                    "pochhammer|gamma-ratio",
                    p,
                    g,
                    1e-12,
                );
                Ok(())
            });
        }
    }
    for i in 0..50 {
        let q = 1 + i % 3;
        let p = (i / 3) % (q + 2);
        let num_p: Vec<f64> = (0..p).map(|j| 0.1 + 3.9 * quasi(7 * i + j, 0)).collect();
        let den_q: Vec<f64> = (0..q).map(|j| 0.5 + 4.5 * quasi(7 * i + j, 1)).collect();
        // p = q + 1 converges only for |z| < 1 and the plain sum loses digits near the edge
        let z_max = if p == q + 1 { 0.5 } else { 0.9 };
        let z = z_max * (2.0 * quasi(i, 2) - 1.0);
        let inputs = format!("num={num_p:?};den={den_q:?};z={}", num(z));
        attempt!(r, "pfq-naive", inputs.clone(), {
            let fast = hyp_pfq(&PfqSpec::new(&num_p, &den_q, z), &tr)?.value;
            let slow = naive_pfq(&num_p, &den_q, z);
            r.rel(
                "pfq-naive",
                inputs.clone(),
                "term-ratio|pochhammer-products",
                fast,
                slow,
                1e-13,
            );
            Ok(())
        });
    }
    for y in linspace(0.5, 2.0, 16) {
        let inputs = format!("y={}", num(y));
        attempt!(r, "e1-route-overlap", inputs.clone(), {
            let s = exp_integral_e1_route(y, E1Route::Series)?;
            let c = exp_integral_e1_route(y, E1Route::ContinuedFraction)?;
            r.rel(
                "e1-route-overlap",
                inputs.clone(),
                "series|continued-fraction",
                s,
                c,
                1e-13,
            );
            Ok(())
        });
    }
    r.records
}

/// Direct Pochhammer-product summation, in logs.
fn naive_pfq(num_p: &[f64], den_q: &[f64], z: f64) -> f64 {
    let ln_poch = |a: f64, l: usize| (0..l).map(|j| (a + j as f64).ln()).sum::<f64>();
    let mut sum = 0.0;
    for l in 0..1500 {
        let ln_n: f64 = num_p.iter().map(|&a| ln_poch(a, l)).sum();
        let ln_d: f64 = den_q.iter().map(|&b| ln_poch(b, l)).sum::<f64>() + ln_poch(1.0, l);
        let sign = if z < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * (ln_n - ln_d + l as f64 * z.abs().ln()).exp();
    }
    sum
}

const DENSITY_TS: [f64; 7] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];

fn density_suite() -> Vec<CheckRecord> {
    let mut r = Recorder::new("density");
    let cfg = QuadConfig::default();
    let tr = Truncation::default();

    for &t in &DENSITY_TS {
        let inputs = format!("t={}", num(t));
        attempt!(r, "route-triangle", inputs.clone(), {
            let arg = DensityArg::new(t)?;
            let b = density_branch_cut(&arg, &cfg)?.value;
            let s = density_series(&arg, &SeriesBudget::default())?.value;
            r.rel(
                "route-triangle",
                inputs.clone(),
                "series|branch-cut",
                s,
                b,
                1e-8,
            );
            let w = density_bromwich(&arg, bromwich_height(&arg), &cfg)?;
            r.check(
                "route-triangle",
                inputs.clone(),
                "bromwich|branch-cut",
                w.value,
                b,
                (w.value - b).abs(),
                1e-3,
            );
            Ok(())
        });
    }
    for &t in &[0.5, 1.0, 2.0, 5.0] {
        let inputs = format!("t={};c=2|3", num(t));
        attempt!(r, "bromwich-c-independence", inputs.clone(), {
            let a = DensityArg::with_offset(t, 2.0)?;
            let b = DensityArg::with_offset(t, 3.0)?;
            let ra = density_bromwich(&a, bromwich_height(&a), &cfg)?;
            let rb = density_bromwich(&b, bromwich_height(&b), &cfg)?;
            let tol = ra.abs_err_estimate + rb.abs_err_estimate;
            r.check(
                "bromwich-c-independence",
                inputs.clone(),
                "bromwich(c=2)|bromwich(c=3)",
                ra.value,
                rb.value,
                (ra.value - rb.value).abs(),
                tol,
            );
            Ok(())
        });
    }
    attempt!(r, "normalization", "t in [0,inf)".to_string(), {
        let inner = QuadConfig::new(1e-300, 1e-13, 2000)?;
        let outer = QuadConfig::new(1e-11, 1e-11, 2000)?;
        let f = |t: f64| {
            density_branch_cut_at(t, &inner)
                .map(|v| v.value)
                .unwrap_or(f64::NAN)
        };
        let head = integrate_finite(f, 0.0, 1.0, &outer)?;
        let tail = integrate_semi_infinite_log(f, 1.0, 2.5, &outer)?;
        let total = head.value + tail.value;
        r.check(
            "normalization",
            "t in [0,inf)".into(),
            "branch-cut integral|1",
            total,
            1.0,
            (total - 1.0).abs(),
            1e-7,
        );
        Ok(())
    });
    for i in 0..50 {
        let t = 0.01 * 5000f64.powf(i as f64 / 49.0);
        let inputs = format!("t={}", num(t));
        attempt!(r, "positivity", inputs.clone(), {
            let v = density_branch_cut(&DensityArg::new(t)?, &cfg)?.value;
            r.push(
                "positivity",
                inputs.clone(),
                "branch-cut|0",
                v,
                0.0,
                v,
                0.0,
                v > 0.0,
            );
            Ok(())
        });
    }
    for i in 0..20 {
        let n = 1 + i % 3;
        let s = 1.0 + 11.0 * quasi(i, 0);
        let order = 2.0 * n as f64 - 1.0 + s + 2.0 * quasi(i, 1);
        let t = 0.5 + 19.5 * quasi(i, 2);
        let inputs = format!("n={n};shift={};order={};t={}", num(-s), num(order), num(t));
        attempt!(r, "operator-finite-difference", inputs.clone(), {
            let g =
                |x: f64| x.powf(-s) * bessel_i(order, x, &tr).map(|v| v.value).unwrap_or(f64::NAN);
            let fd = nested_d(n, &g, t, 0.01 * t / (1.0 + t));
            let exact = bessel_operator_d(n, -s, order, t, &tr)?;
            r.rel(
                "operator-finite-difference",
                inputs.clone(),
                "nested-differences|series",
                fd,
                exact,
                1e-6,
            );
            Ok(())
        });
    }
    for &mu in &[0.0, 0.5, 1.3, 4.0, 9.5] {
        for &t in &[0.1, 1.0, 3.0, 12.0, 25.0] {
            let inputs = format!("mu={};t={}", num(mu), num(t));
            attempt!(r, "operator-identity", inputs.clone(), {
                let lhs = bessel_operator_d(1, -mu, mu, t, &tr)?;
                let rhs = t.powf(-mu - 1.0) * bessel_i(mu + 1.0, t, &tr)?.value;
                r.rel(
                    "operator-identity",
                    inputs.clone(),
                    "D[t^-mu I_mu]|t^(-mu-1) I_(mu+1)",
                    lhs,
                    rhs,
                    1e-12,
                );
                Ok(())
            });
        }
    }
    r.records
}

fn deriv(f: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

/// D^n g by nested five-point differences, D = (1/t) d/dt.
fn nested_d(n: usize, g: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    if n == 0 {
        return g(t);
    }
    let inner = |s: f64| nested_d(n - 1, g, s, h);
    deriv(&inner, t, h) / t
}

const TAIL_RHOS: [f64; 5] = [0.6, 1.0, 1.5, 2.0, 3.5];

fn fine_quad() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-16,
        rel_tol: 1e-13,
        max_subdivisions: 5000,
    }
}

fn tail_suite() -> Vec<CheckRecord> {
    let mut r = Recorder::new("tail");
    let tr = Truncation::default();
    let quad = fine_quad();

    // the band just below the switch is out of reach for ρ = 3.5: the
    // e^(−2y) remainder alone is 3e-8 there
    let band = |rho: f64| if rho < 3.25 { 8.0 } else { 10.0 };
    for &rho in &[0.6, 1.0, 1.5, 2.0, 3.0, 3.5] {
        for y in linspace(band(rho), 12.0, if rho < 3.25 { 9 } else { 5 }) {
            let inputs = format!("rho={};y={}", num(rho), num(y));
            attempt!(r, "switch-overlap", inputs.clone(), {
                let p = TailParams::new(rho, y)?;
                let c = tail_closed_form(&p, &tr)?.bare;
                let a = tail_asymptotic(&p, TermCap::Auto)?.bare;
                r.rel(
                    "switch-overlap",
                    inputs.clone(),
                    "asymptotic|closed",
                    a,
                    c,
                    1e-8,
                );
                Ok(())
            });
        }
    }
    for &rho in &TAIL_RHOS {
        for &y in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let inputs = format!("rho={};y={}", num(rho), num(y));
            attempt!(r, "closed-vs-quadrature", inputs.clone(), {
                let p = TailParams::new(rho, y)?;
                let c = tail_closed_form(&p, &tr)?;
                let q = tail_quadrature(&p, &quad)?;
                r.rel(
                    "closed-vs-quadrature",
                    inputs.clone(),
                    "closed|quad",
                    c.bare,
                    q.bare,
                    1e-9,
                );
                let ratio = c.normalized / c.bare;
                r.rel(
                    "prefactor",
                    inputs.clone(),
                    "normalized/bare|2^(rho-1)Gamma(rho)",
                    ratio,
                    normalization_factor(rho)?,
                    1e-13,
                );
                Ok(())
            });
        }
    }
    for &y in &[0.5, 1.0, 2.0] {
        let inputs = format!("rho=1.5;y={}", num(y));
        attempt!(r, "elementary-oracle", inputs.clone(), {
            let e1 = exp_integral_e1_route(
                2.0 * y,
                if 2.0 * y <= 1.0 {
                    E1Route::Series
                } else {
                    E1Route::ContinuedFraction
                },
            )?;
            let exact = (1.0 / y - (-2.0 * y).exp() / y + 2.0 * e1) / (2.0 * PI).sqrt();
            let c = tail_closed_form(&TailParams::new(1.5, y)?, &tr)?.bare;
            r.rel(
                "elementary-oracle",
                inputs.clone(),
                "closed|elementary",
                c,
                exact,
                1e-11,
            );
            Ok(())
        });
    }
    for &y in &[10.0, 20.0, 50.0] {
        for &rho in &[1.0, 2.0, 3.0] {
            let inputs = format!("rho={};y={}", num(rho), num(y));
            attempt!(r, "asymptotic-vs-quadrature", inputs.clone(), {
                let p = TailParams::new(rho, y)?;
                let q = tail_quadrature(&p, &quad)?;
                let a = tail_asymptotic(&p, TermCap::Auto)?;
                r.rel(
                    "asymptotic-vs-quadrature",
                    inputs.clone(),
                    "asymptotic|quad",
                    a.bare,
                    q.bare,
                    1e-7,
                );
                let slack = q.abs_err_estimate + 4.0 * f64::EPSILON * q.bare.abs();
                let omitted = asymptotic_term(rho, y, a.effort)?.abs();
                r.check(
                    "poincare-bound",
                    format!("{inputs};K=auto"),
                    "asymptotic|quad",
                    a.bare,
                    q.bare,
                    (a.bare - q.bare).abs(),
                    2.0 * omitted + slack,
                );
                for k in 0..=5 {
                    let f = tail_asymptotic(&p, TermCap::Fixed(k))?;
                    let omitted = asymptotic_term(rho, y, k + 1)?.abs();
                    r.check(
                        "poincare-bound",
                        format!("{inputs};K={k}"),
                        "asymptotic|quad",
                        f.bare,
                        q.bare,
                        (f.bare - q.bare).abs(),
                        2.0 * omitted + slack,
                    );
                }
                Ok(())
            });
        }
    }
    for &(rho, first_zero) in &[(1.5, 1usize), (2.5, 2)] {
        let inputs = format!("rho={};k={first_zero}..60", num(rho));
        attempt!(r, "half-integer-termination", inputs.clone(), {
            let mut largest: f64 = 0.0;
            for k in first_zero..60 {
                largest = largest.max(asymptotic_coefficient(rho, k)?.abs());
            }
            r.check(
                "half-integer-termination",
                inputs.clone(),
                "coefficients|0",
                largest,
                0.0,
                largest,
                0.0,
            );
            Ok(())
        });
    }
    for &rho in &[0.6, 1.0, 2.5] {
        let inputs = format!("rho={};y=1e-3|1e-4|1e-5", num(rho));
        attempt!(r, "logarithmic-blow-up", inputs.clone(), {
            let g = |y: f64| -> fs_dist_core::Result<f64> {
                let v = tail_closed_form(&TailParams::new(rho, y)?, &tr)?;
                Ok(v.normalized + (2.0 * y).ln())
            };
            let (a, b, c) = (g(1e-3)?, g(1e-4)?, g(1e-5)?);
            let ratio = (a - b) / (b - c);
            r.check(
                "logarithmic-blow-up",
                inputs.clone(),
                "successive differences|ratio 10",
                ratio,
                10.0,
                (ratio / 10.0 - 1.0).abs(),
                0.05,
            );
            Ok(())
        });
    }
    for &(rho, y) in &[(0.7, 0.3), (2.0, 15.0), (3.0, 60.0), (30.0, 12.0)] {
        let inputs = format!("rho={};y={}", num(rho), num(y));
        attempt!(r, "auto-vs-quadrature", inputs.clone(), {
            let p = TailParams::new(rho, y)?;
            let a = tail_auto(&p)?.bare;
            let q = tail_quadrature(&p, &quad)?.bare;
            r.rel(
                "auto-vs-quadrature",
                inputs.clone(),
                "auto|quad",
                a,
                q,
                1e-8,
            );
            Ok(())
        });
    }
    r.records
}

/// Seed of the verification sweep.
pub const VERIFY_SEED: u64 = 20_240_601;

fn ineq_suite() -> Vec<CheckRecord> {
    let mut r = Recorder::new("ineq");
    let cfg = SweepConfig {
        seed: VERIFY_SEED,
        ..SweepConfig::default()
    };
    match sweep(&cfg, &Inequality::ALL) {
        Ok(reports) => {
            for chunk in reports.chunks(3) {
                let p = chunk[0].point;
                let min_rel = chunk
                    .iter()
                    .map(|m| m.relative_margin)
                    .fold(f64::INFINITY, f64::min);
                let holds = chunk.iter().all(|m| m.holds);
                let inputs = format!("nu={};x={}", num(p.nu), num(p.x));
                r.push(
                    "sweep",
                    inputs,
                    "a1/a2/jones",
                    min_rel,
                    0.0,
                    min_rel,
                    0.0,
                    holds,
                );
            }
            // I_ν − I_{ν+1} ≥ ((2ν+1)/(2x)) I_{ν+1}, in units of I_ν
            let mut worst = f64::INFINITY;
            for chunk in reports.chunks(3) {
                let p = chunk[0].point;
                let jones = chunk[2].relative_margin;
                let bound = (2.0 * p.nu + 1.0) / (2.0 * p.x) * (1.0 - jones);
                worst = worst.min(jones - bound * (1.0 - 1e-12));
            }
            let points = format!("{} sweep points", reports.len() / 3);
            r.push(
                "implication-chain",
                points,
                "jones|a2 bound",
                worst,
                0.0,
                worst,
                0.0,
                worst >= 0.0,
            );
        }
        Err(e) => r.failure("sweep", "default".into(), e),
    }

    let mut worst_rel: f64 = 0.0;
    let mut flag_mismatch = 0;
    let mut errors = 0;
    for i in 0..200 {
        let nu = -0.49 + 10.49 * quasi(i, 0);
        let x = 0.05 + 29.95 * quasi(i, 1);
        match IneqPoint::new(nu, x).and_then(|p| Ok((margins_all(&p)?, margins_unscaled(&p)?))) {
            Ok((s, u)) => {
                for (a, b) in s.iter().zip(&u) {
                    worst_rel = worst_rel.max((a.relative_margin - b.relative_margin).abs());
                    flag_mismatch += usize::from(a.holds != b.holds);
                }
            }
            Err(_) => errors += 1,
        }
    }
    let ok = flag_mismatch == 0 && errors == 0 && worst_rel <= 1e-10;
    r.push(
        "scaled-unscaled",
        "200 points, x <= 30".into(),
        "scaled|unscaled",
        worst_rel,
        0.0,
        worst_rel,
        1e-10,
        ok,
    );

    let mut mismatches = 0;
    let mut fd_errors = 0;
    for i in 0..1000 {
        let nu = -0.5 + 10.5 * (1.0 - quasi(i, 1));
        let x = 100.0 * (1.0 - quasi(i, 2));
        let same = IneqPoint::new(nu, x).and_then(|p| {
            let fp = f_properties(&p, x * 1e-4)?;
            let a1 = margins_all(&p)?[0];
            Ok((fp.log_convexity_margin > 0.0) == a1.holds)
        });
        match same {
            Ok(true) => {}
            Ok(false) => mismatches += 1,
            Err(_) => fd_errors += 1,
        }
    }
    let bad = (mismatches + fd_errors) as f64;
    r.push(
        "f-equivalence",
        "1000 points".into(),
        "sign(gg''-g'^2)|sign(a1)",
        bad,
        0.0,
        bad,
        0.0,
        bad == 0.0,
    );

    attempt!(r, "f-derivative", "nu=1;x=2;h=1e-5".into(), {
        let fp = f_properties(&IneqPoint::new(1.0, 2.0)?, 1e-5)?;
        let analytic = -fp.f_decreasing_margin;
        r.rel(
            "f-derivative",
            "nu=1;x=2;h=1e-5".into(),
            "centered-difference|analytic",
            fp.f_prime_finite_difference,
            analytic,
            1e-7,
        );
        Ok(())
    });
    attempt!(r, "f-decreasing", "nu=0.5;x=0.1..30".into(), {
        let mut prev = f64::INFINITY;
        let mut worst = f64::INFINITY;
        for i in 1..=300 {
            let f = f_properties(&IneqPoint::new(0.5, 0.1 * i as f64)?, 0.01)?.f;
            worst = worst.min(prev - f);
            prev = f;
        }
        r.push(
            "f-decreasing",
            "nu=0.5;x=0.1..30".into(),
            "f(x_i)-f(x_i+1)|0",
            worst,
            0.0,
            worst,
            0.0,
            worst > 0.0,
        );
        Ok(())
    });
    r.records
}

/// Runs a suite. Every record is deterministic; only `wall_time_secs`
/// varies between runs.
pub fn run_verify(suite: Suite) -> VerificationReport {
    let start = Instant::now();
    let mut records = Vec::new();
    if matches!(suite, Suite::Specfun | Suite::All) {
        records.extend(specfun_suite());
    }
    if matches!(suite, Suite::Density | Suite::All) {
        records.extend(density_suite());
    }
    if matches!(suite, Suite::Tail | Suite::All) {
        records.extend(tail_suite());
    }
    if matches!(suite, Suite::Ineq | Suite::All) {
        records.extend(ineq_suite());
    }
    let passed = records.iter().filter(|r| r.pass).count();
    VerificationReport {
        suite,
        failed: records.len() - passed,
        passed,
        records,
        wall_time_secs: start.elapsed().as_secs_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quasi_points_stay_in_the_unit_interval() {
        for i in 0..1000 {
            for d in 0..3 {
                let q = quasi(i, d);
                assert!((0.0..1.0).contains(&q));
            }
        }
    }

    #[test]
    fn report_json_round_trips() {
        let report = VerificationReport {
            suite: Suite::Tail,
            records: vec![CheckRecord {
                suite: "tail".into(),
                check: "x".into(),
                inputs: "rho=1.0".into(),
                routes: "a|b".into(),
                value_a: 0.1 + 0.2,
                value_b: 1e-300,
                discrepancy: 5e-17,
                tolerance: 1e-9,
                pass: true,
            }],
            passed: 1,
            failed: 0,
            wall_time_secs: 0.25,
        };
        let text = serde_json::to_string(&report).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn specfun_suite_passes() {
        let report = run_verify(Suite::Specfun);
        let failed: Vec<_> = report.records.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn tail_suite_passes() {
        let report = run_verify(Suite::Tail);
        let failed: Vec<_> = report.records.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
