//! Generalized hypergeometric series
//! pFq(a_1..a_p; b_1..b_q; z) = Σ_ℓ [Π (a_i)_ℓ / Π (b_j)_ℓ] z^ℓ / ℓ!,
//! summed by the term recursion
//! t_{ℓ+1} = t_ℓ · Π(a_i + ℓ) / Π(b_j + ℓ) · z / (ℓ + 1).

use serde::{Deserialize, Serialize};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::series::{CompensatedSum, EvalResult, Method, StopRule, Truncation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfqSpec {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
    pub z: f64,
}

impl PfqSpec {
    pub fn new(numerator: &[f64], denominator: &[f64], z: f64) -> Self {
        Self {
            numerator: numerator.to_vec(),
            denominator: denominator.to_vec(),
            z,
        }
    }

    fn terminates(&self) -> bool {
        self.numerator.iter().any(|&a| a <= 0.0 && a == a.floor())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.z.is_finite()
            || self
                .numerator
                .iter()
                .chain(&self.denominator)
                .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter(
                "pFq parameters and argument must be finite".into(),
            ));
        }
        if let Some(b) = self
            .denominator
            .iter()
            .find(|&&b| b <= 0.0 && b == b.floor())
        {
            return Err(Error::InvalidParameter(format!(
                "pFq denominator parameter {b} is a non-positive integer"
            )));
        }
        let p = self.numerator.len();
        let q = self.denominator.len();
        if self.z != 0.0 && !self.terminates() {
            if p == q + 1 && self.z.abs() >= 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "{p}F{q} series needs |z| < 1, got z = {}",
                    self.z
                )));
            }
            if p > q + 1 {
                return Err(Error::InvalidParameter(format!(
                    "{p}F{q} series diverges for z = {}",
                    self.z
                )));
            }
        }
        Ok(())
    }

    fn ratio(&self, l: f64) -> f64 {
        let num: f64 = self.numerator.iter().map(|a| a + l).product();
        let den: f64 = self.denominator.iter().map(|b| b + l).product();
        num / den * self.z / (l + 1.0)
    }
}

/// Sums a pFq series under the truncation policy.
///
/// The series is only allowed to stop once its terms are shrinking, so the
/// initial growth of a large-|z| ₁F₁ or ₃F₃ is never mistaken for
/// convergence.
pub fn hyp_pfq(spec: &PfqSpec, trunc: &Truncation) -> Result<EvalResult> {
    spec.validate()?;
    trunc.validate()?;
    if spec.z == 0.0 {
        return Ok(EvalResult::new(1.0, 0.0, 1, Method::Hypergeometric));
    }
    let mut sum = CompensatedSum::default();
    sum.add(1.0);
    let mut term = 1.0_f64;
    let mut max_term = 1.0_f64;
    let mut rule = StopRule::new(trunc);
    for l in 0..trunc.max_terms {
        let next = term * spec.ratio(l as f64);
        if !next.is_finite() {
            return Err(Error::Overflow { what: "hyp_pfq" });
        }
        sum.add(next);
        max_term = max_term.max(next.abs());
        let shrinking = next.abs() <= term.abs();
        term = next;
        let stop = rule.observe(next, sum.value());
        if next == 0.0 || (stop && shrinking) {
            let value = sum.value();
            let err = next.abs() + 2.0 * f64::EPSILON * max_term * ((l + 2) as f64).sqrt();
            return Ok(EvalResult::new(value, err, l + 2, Method::Hypergeometric));
        }
    }
    Err(Error::NonConvergence {
        what: "hyp_pfq",
        terms: trunc.max_terms,
    })
}

/// Same series carried in double-double arithmetic; returns the
/// extended-precision sum alongside the rounded result.
pub(crate) fn hyp_pfq_extended(
    spec: &PfqSpec,
    trunc: &Truncation,
) -> Result<(EvalResult, DoubleDouble)> {
    spec.validate()?;
    trunc.validate()?;
    if spec.z == 0.0 {
        return Ok((
            EvalResult::new(1.0, 0.0, 1, Method::Hypergeometric),
            DoubleDouble::ONE,
        ));
    }
    let z = DoubleDouble::from_f64(spec.z);
    let mut sum = DoubleDouble::ONE;
    let mut term = DoubleDouble::ONE;
    let mut max_term = 1.0_f64;
    let mut rule = StopRule::new(trunc);
    for l in 0..trunc.max_terms {
        let lf = DoubleDouble::from_f64(l as f64);
        let mut num = DoubleDouble::ONE;
        for &a in &spec.numerator {
            num = num * (DoubleDouble::from_f64(a) + lf);
        }
        let mut den = DoubleDouble::from_f64(l as f64 + 1.0);
        for &b in &spec.denominator {
            den = den * (DoubleDouble::from_f64(b) + lf);
        }
        let next = term * num * z / den;
        let next_f = next.to_f64();
        if !next_f.is_finite() {
            return Err(Error::Overflow { what: "hyp_pfq" });
        }
        sum = sum + next;
        max_term = max_term.max(next_f.abs());
        let shrinking = next.abs().to_f64() <= term.abs().to_f64();
        term = next;
        let stop = rule.observe(next_f, sum.to_f64());
        if next_f == 0.0 || (stop && shrinking) {
            // double-double rounding is ~1e-32 per operation
            let err = next_f.abs() + 1e-31 * max_term * (l + 2) as f64;
            return Ok((
                EvalResult::new(sum.to_f64(), err, l + 2, Method::Hypergeometric),
                sum,
            ));
        }
    }
    Err(Error::NonConvergence {
        what: "hyp_pfq",
        terms: trunc.max_terms,
    })
}

pub fn hyp1f1(a: f64, b: f64, z: f64, trunc: &Truncation) -> Result<EvalResult> {
    hyp_pfq(&PfqSpec::new(&[a], &[b], z), trunc)
}

/// Gauss ₂F₁(a, b; c; z), |z| < 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, trunc: &Truncation) -> Result<EvalResult> {
    hyp_pfq(&PfqSpec::new(&[a, b], &[c], z), trunc)
}

pub fn hyp3f2(num: [f64; 3], den: [f64; 2], z: f64, trunc: &Truncation) -> Result<EvalResult> {
    hyp_pfq(&PfqSpec::new(&num, &den, z), trunc)
}

pub fn hyp3f3(num: [f64; 3], den: [f64; 3], z: f64, trunc: &Truncation) -> Result<EvalResult> {
    hyp_pfq(&PfqSpec::new(&num, &den, z), trunc)
}
