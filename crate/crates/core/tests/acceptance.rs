//! Acceptance battery: one PASS/FAIL line per criterion, non-zero exit if
//! any criterion fails.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use fs_dist_core::density::{
    bessel_operator_d, default_bromwich_height, density_branch_cut, density_branch_cut_at,
    density_bromwich, density_series, DensityArg, SeriesBudget,
};
use fs_dist_core::inequalities::{
    f_properties, margin_a1, sweep, IneqPoint, Inequality, SweepConfig,
};
use fs_dist_core::quadrature::{integrate_finite, integrate_semi_infinite_log, QuadConfig};
use fs_dist_core::specfun::{
    bessel_i, bessel_i_scaled, digamma, exp_integral_e1, gamma, pochhammer,
};
use fs_dist_core::tail::{
    asymptotic_coefficient, asymptotic_term, tail_asymptotic, tail_closed_form, tail_quadrature,
    TailParams, TermCap,
};
use fs_dist_core::{Result, Truncation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn fmt_e(x: f64) -> String {
    format!("{x:.2e}")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn fine_quad() -> QuadConfig {
    QuadConfig::new(1e-16, 1e-13, 5000).unwrap()
}

fn density_routes() -> Result<Outcome> {
    let start = Instant::now();
    let cfg = QuadConfig::default();
    let mut worst: f64 = 0.0;
    for &t in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        let arg = DensityArg::new(t)?;
        let s = density_series(&arg, &SeriesBudget::default())?.value;
        let b = density_branch_cut(&arg, &cfg)?.value;
        worst = worst.max(rel(s, b));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: worst <= 1e-8 && secs < 5.0,
        detail: format!(
            "max rel diff {} (tol 1e-8), {secs:.2} s (limit 5 s)",
            fmt_e(worst)
        ),
    })
}

fn density_bromwich_check() -> Result<Outcome> {
    let cfg = QuadConfig::default();
    let mut worst: f64 = 0.0;
    let mut c_ok = true;
    let mut worst_c = 0.0_f64;
    for &t in &[0.5, 1.0, 2.0, 5.0] {
        let b = density_branch_cut(&DensityArg::new(t)?, &cfg)?.value;
        let h = default_bromwich_height(t);
        let r2 = density_bromwich(&DensityArg::with_offset(t, 2.0)?, h, &cfg)?;
        let r3 = density_bromwich(&DensityArg::with_offset(t, 3.0)?, h, &cfg)?;
        worst = worst.max((r2.value - b).abs());
        let gap = (r2.value - r3.value).abs();
        worst_c = worst_c.max(gap);
        c_ok &= gap <= r2.abs_err_estimate + r3.abs_err_estimate;
    }
    Ok(Outcome {
        pass: worst <= 1e-3 && c_ok,
        detail: format!(
            "max abs diff {} (tol 1e-3); c=2 vs c=3 max gap {} within own estimates: {c_ok}",
            fmt_e(worst),
            fmt_e(worst_c)
        ),
    })
}

fn density_normalization() -> Result<Outcome> {
    let inner = QuadConfig::new(1e-300, 1e-13, 2000)?;
    let outer = QuadConfig::new(1e-11, 1e-11, 2000)?;
    let f = |t: f64| {
        density_branch_cut_at(t, &inner)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    let head = integrate_finite(f, 0.0, 1.0, &outer)?;
    let tail = integrate_semi_infinite_log(f, 1.0, 2.5, &outer)?;
    let total = head.value + tail.value;

    let mut positive = true;
    for i in 0..50 {
        let t = 0.01 * (5000f64).powf(i as f64 / 49.0);
        positive &= density_branch_cut(&DensityArg::new(t)?, &QuadConfig::default())?.value > 0.0;
    }
    let ok = (total - 1.0).abs() <= 1e-7 && head.converged && tail.converged;
    Ok(Outcome {
        pass: ok && positive,
        detail: format!(
            "integral {total:.12} (|err| {} vs 1e-7); positive on 50-point log grid [0.01, 50]: {positive}",
            fmt_e((total - 1.0).abs())
        ),
    })
}

fn tail_closed_form_check() -> Result<Outcome> {
    let trunc = Truncation::default();
    let quad = fine_quad();
    let mut worst: f64 = 0.0;
    for &rho in &[0.6, 1.0, 1.5, 2.0, 3.5] {
        for &y in &[0.1, 0.5, 1.0, 2.0, 5.0] {
            let p = TailParams::new(rho, y)?;
            let c = tail_closed_form(&p, &trunc)?;
            let q = tail_quadrature(&p, &quad)?;
            worst = worst.max(rel(c.bare, q.bare));
        }
    }
    let mut worst_elem: f64 = 0.0;
    for &y in &[0.5_f64, 1.0, 2.0] {
        let exact =
            (1.0 / y - (-2.0 * y).exp() / y + 2.0 * exp_integral_e1(2.0 * y)?) / (2.0 * PI).sqrt();
        let c = tail_closed_form(&TailParams::new(1.5, y)?, &trunc)?;
        worst_elem = worst_elem.max(rel(c.bare, exact));
    }
    Ok(Outcome {
        pass: worst <= 1e-9 && worst_elem <= 1e-11,
        detail: format!(
            "grid max rel diff {} (tol 1e-9); rho=3/2 elementary max rel diff {} (tol 1e-11)",
            fmt_e(worst),
            fmt_e(worst_elem)
        ),
    })
}

fn tail_asymptotic_check() -> Result<Outcome> {
    let quad = fine_quad();
    let mut worst: f64 = 0.0;
    let mut bound_ok = true;
    for &y in &[10.0, 20.0, 50.0] {
        for &rho in &[1.0, 2.0, 3.0] {
            let p = TailParams::new(rho, y)?;
            let q = tail_quadrature(&p, &quad)?;
            let a = tail_asymptotic(&p, TermCap::Auto)?;
            worst = worst.max(rel(a.bare, q.bare));
            // the comparison cannot resolve errors below the quadrature's own
            let slack = q.abs_err_estimate + 4.0 * f64::EPSILON * q.bare.abs();
            let omitted = asymptotic_term(rho, y, a.effort)?.abs();
            bound_ok &= (a.bare - q.bare).abs() <= 2.0 * omitted + slack;
            for k in 0..=5 {
                let f = tail_asymptotic(&p, TermCap::Fixed(k))?;
                let omitted = asymptotic_term(rho, y, k + 1)?.abs();
                bound_ok &= (f.bare - q.bare).abs() <= 2.0 * omitted + slack;
            }
        }
    }
    let mut terminates = true;
    for &y in &[10.0, 20.0, 50.0] {
        let a = tail_asymptotic(&TailParams::new(1.5, y)?, TermCap::Auto)?;
        terminates &= a.effort == 1;
    }
    for k in 1..40 {
        terminates &= asymptotic_coefficient(1.5, k)? == 0.0;
    }
    for k in 2..40 {
        terminates &= asymptotic_coefficient(2.5, k)? == 0.0;
    }
    Ok(Outcome {
        pass: worst <= 1e-7 && bound_ok && terminates,
        detail: format!(
            "max rel diff {} (tol 1e-7); error <= 2x first omitted term: {bound_ok}; single-term at rho=3/2: {terminates}",
            fmt_e(worst)
        ),
    })
}

fn inequality_check() -> Result<Outcome> {
    let cfg = SweepConfig {
        nu_range: (-0.5, 10.0),
        x_range: (0.0, 100.0),
        samples_per_axis: 100,
        seed: 20_240_601,
    };
    let reports = sweep(&cfg, &Inequality::ALL)?;
    let points = reports.len() / 3;
    let violations = reports.iter().filter(|r| !r.holds).count();
    let min_rel = reports
        .iter()
        .map(|r| r.relative_margin)
        .fold(f64::INFINITY, f64::min);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let nu = -0.5 + 10.5 * (1.0 - rng.gen::<f64>());
        let x = 100.0 * (1.0 - rng.gen::<f64>());
        let p = IneqPoint::new(nu, x)?;
        let fp = f_properties(&p, x * 1e-4)?;
        let a1 = margin_a1(&p)?;
        if (fp.log_convexity_margin > 0.0) != a1.holds {
            mismatches += 1;
        }
    }
    Ok(Outcome {
        pass: points == 10_000 && violations == 0 && mismatches == 0,
        detail: format!(
            "{points} points, {violations} violations (min relative margin {}); f-equivalence mismatches {mismatches}/1000",
            fmt_e(min_rel)
        ),
    })
}

/// Five-point centered derivative.
fn deriv<F: Fn(f64) -> f64>(f: &F, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

/// D^n by nesting the centered difference, D g = g′/t.
fn nested_d(n: usize, g: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    if n == 0 {
        return g(t);
    }
    let inner = |s: f64| nested_d(n - 1, g, s, h);
    deriv(&inner, t, h) / t
}

fn operator_check() -> Result<Outcome> {
    let trunc = Truncation::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let n = 1 + i % 3;
        // order + shift ≥ 2n − 1 keeps every series coefficient positive
        let s = 1.0 + 11.0 * rng.gen::<f64>();
        let shift = -s;
        let order = 2.0 * n as f64 - 1.0 + s + 2.0 * rng.gen::<f64>();
        let t = 0.5 + 19.5 * rng.gen::<f64>();
        let g = |x: f64| x.powf(shift) * bessel_i(order, x, &trunc).unwrap().value;
        // I_order grows like e^t, so the variation length is min(t, 1)
        let h = 0.01 * t / (1.0 + t);
        let fd = nested_d(n, &g, t, h);
        let exact = bessel_operator_d(n, shift, order, t, &trunc)?;
        worst = worst.max(rel(fd, exact));
    }
    let mut worst_id: f64 = 0.0;
    for &mu in &[0.0, 0.5, 1.3, 4.0, 9.5] {
        for &t in &[0.1, 1.0, 3.0, 12.0, 25.0] {
            let lhs = bessel_operator_d(1, -mu, mu, t, &trunc)?;
            let rhs = t.powf(-mu - 1.0) * bessel_i(mu + 1.0, t, &trunc)?.value;
            worst_id = worst_id.max(rel(lhs, rhs));
        }
    }
    Ok(Outcome {
        pass: worst <= 1e-6 && worst_id <= 1e-12,
        detail: format!(
            "finite-difference max rel diff {} (tol 1e-6); D[t^-mu I_mu] identity max rel diff {} (tol 1e-12)",
            fmt_e(worst),
            fmt_e(worst_id)
        ),
    })
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn identities_check() -> Result<Outcome> {
    let trunc = Truncation::default();
    let mut rec: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for nu in linspace(-0.5, 10.0, 22) {
        for x in linspace(0.1, 30.0, 40) {
            let a = bessel_i(nu, x, &trunc)?.value;
            let b = bessel_i(nu + 1.0, x, &trunc)?.value;
            let c = bessel_i(nu + 2.0, x, &trunc)?.value;
            let rhs = 2.0 * (nu + 1.0) / x * b;
            rec = rec.max(rel(a - c, rhs));
            scale = scale.max(rel(bessel_i_scaled(nu, x, &trunc)?.value, (-x).exp() * a));
        }
    }
    let mut dig: f64 = 0.0;
    for x in linspace(0.1, 100.0, 400) {
        dig = dig.max((digamma(x + 1.0)? - digamma(x)? - 1.0 / x).abs());
    }
    let mut dup: f64 = 0.0;
    for z in linspace(0.3, 50.0, 400) {
        let d = digamma(2.0 * z)? - 0.5 * digamma(z)? - 0.5 * digamma(z + 0.5)? - LN_2;
        dup = dup.max(d.abs());
    }
    let mut poch: f64 = 0.0;
    for a in linspace(0.05, 20.0, 60) {
        for k in 0..=20u32 {
            let exact = gamma(a + k as f64)? / gamma(a)?;
            poch = poch.max(rel(pochhammer(a, k)?, exact));
        }
    }
    let pass = rec <= 1e-11 && scale <= 1e-13 && dig <= 1e-12 && dup <= 1e-12 && poch <= 1e-12;
    Ok(Outcome {
        pass,
        detail: format!(
            "Bessel recurrence {} (1e-11), scaling {} (1e-13), digamma recurrence {} (1e-12), duplication {} (1e-12), Pochhammer {} (1e-12)",
            fmt_e(rec),
            fmt_e(scale),
            fmt_e(dig),
            fmt_e(dup),
            fmt_e(poch)
        ),
    })
}

type Criterion = fn() -> Result<Outcome>;

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("density: series vs branch cut", density_routes),
        (
            "density: Bromwich vs branch cut, c-invariance",
            density_bromwich_check,
        ),
        (
            "density: normalization and positivity",
            density_normalization,
        ),
        ("tail: closed form vs quadrature", tail_closed_form_check),
        ("tail: asymptotic series", tail_asymptotic_check),
        ("inequalities: sweep and f-equivalence", inequality_check),
        ("operator D vs finite differences", operator_check),
        ("special-function identities", identities_check),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} | {name} | {detail} [{:.2} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
