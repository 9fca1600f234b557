//! Series truncation policy and the common result record.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping policy shared by every series in the crate.
///
/// A series stops once `consecutive_small` successive terms are each below
/// `rel_tol * |partial sum|`. Hitting `max_terms` first is a
/// [`Error::NonConvergence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub consecutive_small: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 10_000,
            consecutive_small: 3,
        }
    }
}

impl Truncation {
    pub fn new(rel_tol: f64, max_terms: usize, consecutive_small: usize) -> Result<Self> {
        let t = Self {
            rel_tol,
            max_terms,
            consecutive_small,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        Self::new(
            rel_tol,
            Self::default().max_terms,
            Self::default().consecutive_small,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "truncation rel_tol must be positive and finite, got {}",
                self.rel_tol
            )));
        }
        if self.max_terms == 0 || self.consecutive_small == 0 {
            return Err(Error::InvalidParameter(
                "truncation max_terms and consecutive_small must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Which algorithm produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PowerSeries,
    Asymptotic,
    Hypergeometric,
    ContinuedFraction,
    Quadrature,
    BranchCut,
    DoubleSeries,
    Bromwich,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::PowerSeries => "power-series",
            Method::Asymptotic => "asymptotic",
            Method::Hypergeometric => "hypergeometric",
            Method::ContinuedFraction => "continued-fraction",
            Method::Quadrature => "quadrature",
            Method::BranchCut => "branch-cut",
            Method::DoubleSeries => "series",
            Method::Bromwich => "bromwich",
            Method::ClosedForm => "closed",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value with an error estimate and a record of the work spent on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub abs_err_estimate: f64,
    /// Terms summed or quadrature nodes evaluated.
    pub effort: usize,
    pub method: Method,
    /// False only for diagnostic routes that report a best effort instead of
    /// failing (the Bromwich integral).
    pub converged: bool,
}

impl EvalResult {
    pub(crate) fn new(value: f64, abs_err_estimate: f64, effort: usize, method: Method) -> Self {
        Self {
            value,
            abs_err_estimate: abs_err_estimate.abs(),
            effort,
            method,
            converged: true,
        }
    }

    pub fn rel_err_estimate(&self) -> f64 {
        if self.value == 0.0 {
            self.abs_err_estimate
        } else {
            self.abs_err_estimate / self.value.abs()
        }
    }
}

/// Tracks the consecutive-small-terms rule for one running series.
#[derive(Debug, Clone)]
pub(crate) struct StopRule {
    rel_tol: f64,
    needed: usize,
    run: usize,
}

impl StopRule {
    pub(crate) fn new(trunc: &Truncation) -> Self {
        Self {
            rel_tol: trunc.rel_tol,
            needed: trunc.consecutive_small,
            run: 0,
        }
    }

    /// Records `term` against the partial sum that already includes it and
    /// returns true once the series may stop.
    pub(crate) fn observe(&mut self, term: f64, partial_sum: f64) -> bool {
        if term.abs() <= self.rel_tol * partial_sum.abs() {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= self.needed
    }

    pub(crate) fn reset(&mut self) {
        self.run = 0;
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
