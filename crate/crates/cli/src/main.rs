use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fs_dist::{
    max_pairwise_discrepancy, run_density, run_ineq, run_tail, run_verify, write_density_csv,
    write_ineq_csv, write_tail_csv, CliResult, DensityMethod, Suite, TailMethod, Which,
};
use fs_dist_core::inequalities::SweepConfig;

/// Evaluates and cross-checks a generalized Feller-Spitzer density, a
/// modified-Bessel integrated tail and three modified-Bessel inequalities.
///
/// Exit codes: 0 success, 1 verification failure, 2 invalid parameters,
/// 3 numerical non-convergence, 4 I/O failure.
#[derive(Debug, Parser)]
#[command(name = "fs-dist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density value at t by one or all routes.
    Density {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value = "branch-cut")]
        method: DensityMethod,
        /// Relative tolerance for series truncation and quadrature.
        #[arg(long)]
        tol: Option<f64>,
        /// Abscissa of the Bromwich line (must exceed 1).
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Integrated tail for parameter rho from y to infinity.
    Tail {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, value_enum, default_value = "auto")]
        method: TailMethod,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sweep of inequality margins over a (nu, x) box; samples per axis.
    Ineq {
        #[arg(long, value_enum, default_value = "all")]
        which: Which,
        #[arg(long, allow_hyphen_values = true, default_value_t = -0.5)]
        nu_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 10.0)]
        nu_max: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 100.0)]
        x_max: f64,
        /// Samples per axis; the sweep visits samples² points.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Runs a verification suite and writes one CSV row per check.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the full report, including wall time, as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Runs `write` against the file at `path`, or stdout when absent.
fn emit<F>(path: Option<&Path>, write: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    match path {
        Some(p) => {
            let mut out = BufWriter::new(File::create(p)?);
            write(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Returns whether every check (or sampled inequality) passed.
fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Density {
            t,
            method,
            tol,
            c,
            csv,
        } => {
            let rows = run_density(t, method, tol, c)?;
            if rows.len() > 1 {
                let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
                eprintln!(
                    "max pairwise discrepancy: {:e}",
                    max_pairwise_discrepancy(&values)
                );
            }
            emit(csv.as_deref(), |w| write_density_csv(&rows, w))?;
            Ok(true)
        }
        Command::Tail {
            rho,
            y,
            method,
            csv,
        } => {
            let (rows, skipped) = run_tail(rho, y, method)?;
            for s in &skipped {
                eprintln!("skipped {s}");
            }
            if rows.len() > 1 {
                let values: Vec<f64> = rows.iter().map(|r| r.bare).collect();
                eprintln!(
                    "max pairwise discrepancy (bare): {:e}",
                    max_pairwise_discrepancy(&values)
                );
            }
            emit(csv.as_deref(), |w| write_tail_csv(&rows, w))?;
            Ok(true)
        }
        Command::Ineq {
            which,
            nu_min,
            nu_max,
            x_min,
            x_max,
            samples,
            seed,
            csv,
        } => {
            let cfg = SweepConfig {
                nu_range: (nu_min, nu_max),
                x_range: (x_min, x_max),
                samples_per_axis: samples,
                seed,
            };
            let reports = run_ineq(which, &cfg)?;
            let violations = reports.iter().filter(|r| !r.holds).count();
            let min_rel = reports
                .iter()
                .map(|r| r.relative_margin)
                .fold(f64::INFINITY, f64::min);
            eprintln!(
                "{} margins, {violations} violations, smallest relative margin {min_rel:e}",
                reports.len()
            );
            emit(csv.as_deref(), |w| write_ineq_csv(&reports, w))?;
            Ok(violations == 0)
        }
        Command::Verify { suite, csv, json } => {
            let report = run_verify(suite);
            for r in report.records.iter().filter(|r| !r.pass) {
                eprintln!(
                    "FAIL {}/{} [{}] {}: discrepancy {:e} > tolerance {:e}",
                    r.suite, r.check, r.inputs, r.routes, r.discrepancy, r.tolerance
                );
            }
            eprintln!(
                "suite {}: {} passed, {} failed in {:.2} s",
                suite.as_str(),
                report.passed,
                report.failed,
                report.wall_time_secs
            );
            emit(csv.as_deref(), |w| report.write_csv(w))?;
            if let Some(path) = json {
                emit(Some(&path), |w| {
                    Ok(serde_json::to_writer_pretty(w, &report)?)
                })?;
            }
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
