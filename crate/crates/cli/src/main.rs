//! `schwarzlab`: parameter sweeps and reports over `schwarzschild-lab`.
//!
//! Exit status: 0 when every check passes, 1 when a check or a numerical
//! routine fails, 2 on invalid arguments.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod table;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "schwarzlab",
    version,
    about = "Geodesic and curvature-integral sweeps on Schwarzschild metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate perpendicular geodesics and report conservation residuals.
    Geodesic {
        #[command(flatten)]
        grid: Grid,
        /// Arclength to integrate; by default until r = 1e4·max(r0, R).
        #[arg(long)]
        s_max: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Integral of −Ric(γ̇, γ̇) along each geodesic and the Ricci sign change.
    Ricci {
        #[command(flatten)]
        grid: Grid,
        /// Arclength cut-off d; by default the full ray.
        #[arg(long)]
        d: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the ODE, angular and series routes over a parameter grid.
    FrankelSweep {
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        output: Output,
    },
    /// Build the conformal metric of a profile and report φ and f_φ.
    PerturbBuild {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Number of areal sample points.
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Check the perturbation conditions and sample R(φ, u0).
    PerturbCheck {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Derivative budget; default m²/16.
        #[arg(long)]
        a: Option<f64>,
        /// B(f) budget; default m²/16.
        #[arg(long)]
        b: Option<f64>,
        /// Sample points for R, as multiples of the areal horizon unless --absolute.
        #[arg(long, value_delimiter = ',')]
        u0: Vec<f64>,
        #[arg(long)]
        absolute: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Sign of the scalar curvature of a three-dimensional profile.
    ScalScan {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Left end of the scan in u; default 1.01 times the areal horizon.
        #[arg(long)]
        lo: Option<f64>,
        /// Right end of the scan in u; default 30 m.
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Radial and tangential Bakry–Émery Ricci values of the Schwarzschild weight.
    BakryEmery {
        #[command(flatten)]
        grid: Grid,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Clone, Args)]
struct Grid {
    #[arg(long, value_delimiter = ',', default_value = "3")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    m: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    k: Vec<usize>,
    /// Start radii as multiples of the horizon radius unless --absolute.
    #[arg(long, value_delimiter = ',', conflicts_with = "u0")]
    r0: Vec<f64>,
    /// Start areal radii as multiples of the areal horizon unless --absolute.
    #[arg(long, value_delimiter = ',')]
    u0: Vec<f64>,
    #[arg(long)]
    absolute: bool,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Clone, Args)]
struct ProfileArgs {
    /// Tabulated `u f(u)` profile; the smoothed bump example when absent.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Mass of the reference Schwarzschild metric.
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    /// Smoothing width of the example's bump; default m/100.
    #[arg(long)]
    smoothing_width: Option<f64>,
    /// Horizon radius R_f of the built metric; default C_f·4^{−1/(n−2)}.
    #[arg(long)]
    horizon_radius: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a run did not succeed.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<schwarzschild_lab::Error> for Failure {
    fn from(e: schwarzschild_lab::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

/// A finished report and whether all of its checks passed.
struct Report {
    body: String,
    passed: bool,
}

fn emit(report: &Report, output: &Output) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, &report.body)?,
        None => std::io::stdout().lock().write_all(report.body.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (report, output) = match cli.command {
        Command::Geodesic { grid, s_max, output } => (commands::geodesic(&grid, s_max, output.format)?, output),
        Command::Ricci { grid, d, output } => (commands::ricci(&grid, d, output.format)?, output),
        Command::FrankelSweep { grid, output } => (commands::frankel_sweep(&grid, output.format)?, output),
        Command::PerturbBuild {
            profile,
            samples,
            output,
        } => (commands::perturb_build(&profile, samples, output.format)?, output),
        Command::PerturbCheck {
            profile,
            a,
            b,
            u0,
            absolute,
            output,
        } => (
            commands::perturb_check(&profile, a, b, &u0, absolute, output.format)?,
            output,
        ),
        Command::ScalScan {
            profile,
            lo,
            hi,
            samples,
            output,
        } => (commands::scal_scan(&profile, lo, hi, samples, output.format)?, output),
        Command::BakryEmery { grid, output } => (commands::bakry_emery(&grid, output.format)?, output),
    };
    emit(&report, &output)?;
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
