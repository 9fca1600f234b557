//! Library side of the `fs-dist` command: route dispatch, CSV tables and the
//! verification suites. `main.rs` only parses arguments and maps errors to
//! exit codes.

use std::io::Write;

use clap::ValueEnum;
use fs_dist_core::density::{
    bromwich_height, density_branch_cut, density_bromwich, density_series, DensityArg, SeriesBudget,
};
use fs_dist_core::inequalities::{sweep, Inequality, MarginReport, SweepConfig};
use fs_dist_core::quadrature::QuadConfig;
use fs_dist_core::tail::{
    tail_asymptotic, tail_auto, tail_closed_form, tail_quadrature, TailParams, TailValue, TermCap,
};
use fs_dist_core::{Method, Truncation};

pub mod verify;

pub use verify::{run_verify, CheckRecord, Suite, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid parameter: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fs_dist_core::Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad parameters, 3 for numerical failure, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Formats a float so that parsing it back gives the same bits.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityMethod {
    BranchCut,
    Series,
    Bromwich,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub t: f64,
    pub method: Method,
    pub value: f64,
    pub err_estimate: f64,
    pub effort: usize,
    /// Value minus the branch-cut value; only filled for `--method all`.
    pub discrepancy: Option<f64>,
}

/// Evaluates 𝓘(t) by the requested routes. `tol` tightens the series
/// truncation and the quadrature tolerances together.
pub fn run_density(
    t: f64,
    method: DensityMethod,
    tol: Option<f64>,
    c: Option<f64>,
) -> CliResult<Vec<DensityRow>> {
    let arg = match c {
        Some(c) => DensityArg::with_offset(t, c)?,
        None => DensityArg::new(t)?,
    };
    let (quad, budget) = match tol {
        Some(tol) => {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(CliError::Usage(format!(
                    "--tol must lie in (0, 1), got {tol}"
                )));
            }
            let budget = SeriesBudget {
                trunc: Truncation::with_rel_tol(tol)?,
                ..SeriesBudget::default()
            };
            (
                QuadConfig::new(tol, tol, QuadConfig::default().max_subdivisions)?,
                budget,
            )
        }
        None => (QuadConfig::default(), SeriesBudget::default()),
    };

    let branch = || density_branch_cut(&arg, &quad);
    let series = || density_series(&arg, &budget).map(|d| d.as_eval());
    let bromwich = || {
        let r = density_bromwich(&arg, bromwich_height(&arg), &quad)?;
        if r.converged {
            Ok(r)
        } else {
            Err(fs_dist_core::Error::NonConvergence {
                what: "Bromwich integral",
                terms: r.effort,
            })
        }
    };
    let results = match method {
        DensityMethod::BranchCut => vec![branch()?],
        DensityMethod::Series => vec![series()?],
        DensityMethod::Bromwich => vec![bromwich()?],
        DensityMethod::All => vec![branch()?, series()?, bromwich()?],
    };
    let reference = results[0].value;
    Ok(results
        .into_iter()
        .map(|r| DensityRow {
            t,
            method: r.method,
            value: r.value,
            err_estimate: r.abs_err_estimate,
            effort: r.effort,
            discrepancy: (method == DensityMethod::All).then_some(r.value - reference),
        })
        .collect())
}

/// Largest |a − b| over all pairs of rows.
pub fn max_pairwise_discrepancy(values: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

pub fn write_density_csv<W: Write>(rows: &[DensityRow], out: W) -> CliResult<()> {
    let mut w = csv_writer(out);
    let with_discrepancy = rows.iter().any(|r| r.discrepancy.is_some());
    let mut header = vec!["t", "method", "value", "err_estimate", "effort"];
    if with_discrepancy {
        header.push("discrepancy");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            num(r.t),
            r.method.as_str().to_string(),
            num(r.value),
            num(r.err_estimate),
            r.effort.to_string(),
        ];
        if with_discrepancy {
            rec.push(r.discrepancy.map(num).unwrap_or_default());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TailMethod {
    Quad,
    Closed,
    Asymptotic,
    Auto,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub rho: f64,
    pub y: f64,
    pub method: String,
    pub bare: f64,
    pub normalized: f64,
    pub err_estimate: f64,
}

fn route_name(m: Method) -> &'static str {
    match m {
        Method::Quadrature => "quad",
        Method::ClosedForm => "closed",
        other => other.as_str(),
    }
}

impl TailRow {
    fn new(p: &TailParams, label: String, v: &TailValue) -> Self {
        Self {
            rho: p.rho,
            y: p.y,
            method: label,
            bare: v.bare,
            normalized: v.normalized,
            err_estimate: v.abs_err_estimate,
        }
    }
}

/// Evaluates the integrated tail. A single route that does not apply (the
/// closed form past its cancellation limit) is an error; with `all` such
/// routes are skipped and reported in the second return value.
pub fn run_tail(rho: f64, y: f64, method: TailMethod) -> CliResult<(Vec<TailRow>, Vec<String>)> {
    let p = TailParams::new(rho, y)?;
    let trunc = Truncation::default();
    let quad = QuadConfig::default();
    let one = |m: TailMethod| -> CliResult<TailRow> {
        let v = match m {
            TailMethod::Quad => tail_quadrature(&p, &quad)?,
            TailMethod::Closed => tail_closed_form(&p, &trunc)?,
            TailMethod::Asymptotic => tail_asymptotic(&p, TermCap::Auto)?,
            TailMethod::Auto | TailMethod::All => tail_auto(&p)?,
        };
        let label = match m {
            TailMethod::Auto => format!("auto:{}", route_name(v.method)),
            _ => route_name(v.method).to_string(),
        };
        Ok(TailRow::new(&p, label, &v))
    };
    match method {
        TailMethod::All => {
            let mut rows = Vec::new();
            let mut skipped = Vec::new();
            for m in [TailMethod::Quad, TailMethod::Closed, TailMethod::Asymptotic] {
                match one(m) {
                    Ok(r) => rows.push(r),
                    Err(CliError::Core(e)) if e.is_numerical() => {
                        skipped.push(format!("{m:?}: {e}"))
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok((rows, skipped))
        }
        m => Ok((vec![one(m)?], Vec::new())),
    }
}

pub fn write_tail_csv<W: Write>(rows: &[TailRow], out: W) -> CliResult<()> {
    let mut w = csv_writer(out);
    w.write_record(["rho", "y", "method", "bare", "normalized", "err_estimate"])?;
    for r in rows {
        w.write_record([
            num(r.rho),
            num(r.y),
            r.method.clone(),
            num(r.bare),
            num(r.normalized),
            num(r.err_estimate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    A1,
    A2,
    Jones,
    All,
}

impl Which {
    pub fn inequalities(self) -> Vec<Inequality> {
        match self {
            Which::A1 => vec![Inequality::A1],
            Which::A2 => vec![Inequality::A2],
            Which::Jones => vec![Inequality::Jones],
            Which::All => Inequality::ALL.to_vec(),
        }
    }
}

pub fn run_ineq(which: Which, cfg: &SweepConfig) -> CliResult<Vec<MarginReport>> {
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(sweep(cfg, &which.inequalities())?)
}

pub fn write_ineq_csv<W: Write>(rows: &[MarginReport], out: W) -> CliResult<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "nu",
        "x",
        "inequality",
        "margin",
        "relative_margin",
        "holds",
    ])?;
    for r in rows {
        w.write_record([
            num(r.point.nu),
            num(r.point.x),
            r.inequality.as_str().to_string(),
            num(r.margin),
            num(r.relative_margin),
            r.holds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for &x in &[
            0.1,
            1.0 / 3.0,
            1e-300,
            6.02e23,
            -2.5e-17,
            100.0,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn density_all_gives_three_agreeing_rows() {
        let rows = run_density(1.0, DensityMethod::All, None, None).unwrap();
        assert_eq!(rows.len(), 3);
        let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
        assert!(max_pairwise_discrepancy(&values) < 1e-6);
        assert!(rows.iter().all(|r| r.discrepancy.is_some()));
    }

    #[test]
    fn tighter_tolerance_costs_more_series_terms() {
        let loose = run_density(1.0, DensityMethod::Series, Some(1e-6), None).unwrap();
        let tight = run_density(1.0, DensityMethod::Series, Some(1e-13), None).unwrap();
        assert!(tight[0].effort > loose[0].effort);
    }

    #[test]
    fn density_csv_layout() {
        let rows = run_density(2.0, DensityMethod::BranchCut, None, None).unwrap();
        let mut buf = Vec::new();
        write_density_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,method,value,err_estimate,effort"));
        assert!(lines.next().unwrap().starts_with("2.0,branch-cut,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn tail_all_skips_inapplicable_routes() {
        let (rows, skipped) = run_tail(2.0, 50.0, TailMethod::All).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(skipped.len(), 1);
        let err = run_tail(2.0, 50.0, TailMethod::Closed).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn tail_three_halves_value() {
        let (rows, _) = run_tail(1.5, 1.0, TailMethod::All).unwrap();
        for r in &rows[..2] {
            assert!((r.bare - 0.383_968_276_397_581_8).abs() < 1e-10);
        }
        let (auto, _) = run_tail(1.5, 1.0, TailMethod::Auto).unwrap();
        assert_eq!(auto[0].method, "auto:closed");
    }

    #[test]
    fn parameter_errors_map_to_usage_code() {
        assert_eq!(
            run_density(-1.0, DensityMethod::All, None, None)
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            run_tail(0.4, 1.0, TailMethod::Auto)
                .unwrap_err()
                .exit_code(),
            2
        );
        let bad = SweepConfig {
            nu_range: (-0.6, 1.0),
            ..SweepConfig::default()
        };
        assert_eq!(run_ineq(Which::All, &bad).unwrap_err().exit_code(), 2);
    }
}
