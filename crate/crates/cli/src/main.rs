//! `tricircular`: verifications and classifications for weighted
//! composition isometries of Hardy spaces on the disc and bidisc.
//!
//! Exit codes: 0 when the verdict is pass, 1 when it is fail, 2 on
//! malformed input (with a machine-readable `{"error": ...}` object).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tricircular::hardy::PNorm;
use tricircular::Complex64;
use tricircular_cli::{
    class_from_flag, csv_text, run, CliError, Outcome, RunConfig, DEFAULT_IDENTITY_TOL,
    DEFAULT_NORM_TOL,
};

#[derive(Parser)]
#[command(
    name = "tricircular",
    about = "Hardy-space composition isometries and tri-circular projections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputOpts {
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write residual rows as CSV (check, sample_index, residual).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary-quadrature H^p norm of a series file.
    Norm {
        #[arg(long)]
        series: PathBuf,
        /// Norm exponent: a real number >= 1 or "inf".
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Check that an operator spec preserves H^p norms on random samples.
    IsometryVerify {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        /// Degree of the generated sample polynomials.
        #[arg(long, default_value_t = 16)]
        max_degree: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Build the projection triple for an operator and an eigenvalue pair.
    GtcpBuild {
        #[arg(long)]
        op: PathBuf,
        /// First eigenvalue as RE,IM; defaults to e^{2πi/3}.
        #[arg(long, value_parser = parse_complex)]
        lambda1: Option<Complex64>,
        /// Second eigenvalue as RE,IM; defaults to e^{4πi/3}.
        #[arg(long, value_parser = parse_complex)]
        lambda2: Option<Complex64>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Classify the tri-circular structure of an operator spec.
    GtcpClassify {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Evaluate the Lagrange falsifier on a disc operator.
    Falsify {
        #[arg(long)]
        op: PathBuf,
        #[arg(long, value_parser = parse_complex)]
        lambda1: Option<Complex64>,
        #[arg(long, value_parser = parse_complex)]
        lambda2: Option<Complex64>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Verify the rotation automorphism form, or falsify a composition map.
    AutomorphismCheck {
        /// Rotation angle; checks f ↦ f(e^{iθ}·) on the subalgebra.
        #[arg(long, conflicts_with = "tau")]
        theta: Option<f64>,
        /// Automorphism JSON file; falsifies f ↦ f∘τ on the subalgebra.
        #[arg(long)]
        tau: Option<PathBuf>,
        /// Subalgebra: h0, neil, or h0n:N.
        #[arg(long)]
        class: String,
        /// Optional unimodular factor RE,IM; checks f ↦ α·f(e^{iθ}·).
        #[arg(long, value_parser = parse_complex, requires = "theta")]
        alpha: Option<Complex64>,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 8)]
        max_degree: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected RE,IM, got {text:?}"));
    }
    let re: f64 = parts[0].trim().parse().map_err(|e| format!("bad RE: {e}"))?;
    let im: f64 = parts[1].trim().parse().map_err(|e| format!("bad IM: {e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_p(text: &str) -> Result<PNorm, CliError> {
    if text == "inf" {
        return Ok(PNorm::Infinity);
    }
    let value: f64 = text
        .parse()
        .map_err(|e| CliError::Input(format!("bad p {text:?}: {e}")))?;
    PNorm::finite(value).map_err(|e| CliError::Input(e.to_string()))
}

fn cube_root_pair() -> (Complex64, Complex64) {
    let l = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    (l, l * l)
}

fn to_config(command: &Command) -> Result<(RunConfig, OutputOpts), CliError> {
    match command {
        Command::Norm {
            series,
            p,
            grid,
            output,
        } => Ok((
            RunConfig::Norm {
                series: series.clone(),
                p: parse_p(p)?,
                grid: *grid,
            },
            output.clone(),
        )),
        Command::IsometryVerify {
            op,
            grid,
            samples,
            seed,
            tol,
            max_degree,
            output,
        } => Ok((
            RunConfig::IsometryVerify {
                op: op.clone(),
                grid: *grid,
                samples: *samples,
                seed: *seed,
                tol: tol.unwrap_or(DEFAULT_NORM_TOL),
                max_degree: *max_degree,
            },
            output.clone(),
        )),
        Command::GtcpBuild {
            op,
            lambda1,
            lambda2,
            grid,
            samples,
            seed,
            tol,
            max_degree,
            output,
        } => {
            let defaults = cube_root_pair();
            Ok((
                RunConfig::GtcpBuild {
                    op: op.clone(),
                    lambda1: lambda1.unwrap_or(defaults.0),
                    lambda2: lambda2.unwrap_or(defaults.1),
                    grid: *grid,
                    samples: *samples,
                    seed: *seed,
                    tol: tol.unwrap_or(DEFAULT_IDENTITY_TOL),
                    max_degree: *max_degree,
                },
                output.clone(),
            ))
        }
        Command::GtcpClassify {
            op,
            grid,
            samples,
            seed,
            tol,
            output,
        } => Ok((
            RunConfig::GtcpClassify {
                op: op.clone(),
                grid: *grid,
                samples: *samples,
                seed: *seed,
                tol: tol.unwrap_or(DEFAULT_IDENTITY_TOL),
            },
            output.clone(),
        )),
        Command::Falsify {
            op,
            lambda1,
            lambda2,
            tol,
            output,
        } => {
            let defaults = cube_root_pair();
            Ok((
                RunConfig::Falsify {
                    op: op.clone(),
                    lambda1: lambda1.unwrap_or(defaults.0),
                    lambda2: lambda2.unwrap_or(defaults.1),
                    tol: tol.unwrap_or(DEFAULT_IDENTITY_TOL),
                },
                output.clone(),
            ))
        }
        Command::AutomorphismCheck {
            theta,
            tau,
            class,
            alpha,
            grid,
            samples,
            seed,
            tol,
            max_degree,
            output,
        } => {
            let class = class_from_flag(class)?;
            let config = match (theta, tau) {
                (Some(theta), None) => RunConfig::RotationCheck {
                    theta: *theta,
                    class,
                    alpha: *alpha,
                    grid: *grid,
                    samples: *samples,
                    seed: *seed,
                    tol: tol.unwrap_or(1e-10),
                    max_degree: *max_degree,
                },
                (None, Some(tau)) => RunConfig::CompositionFalsify {
                    tau: tau.clone(),
                    class,
                    tol: tol.unwrap_or(1e-10),
                },
                _ => {
                    return Err(CliError::Input(
                        "automorphism-check needs exactly one of --theta or --tau".into(),
                    ))
                }
            };
            Ok((config, output.clone()))
        }
    }
}

fn write_outputs(outcome: &Outcome, output: &OutputOpts) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&outcome.report)
        .expect("reports serialize")
        + "\n";
    print!("{text}");
    if let Some(path) = &output.out {
        std::fs::write(path, &text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &output.csv {
        std::fs::write(path, csv_text(&outcome.csv))
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, output) = match to_config(&cli.command) {
        Ok(pair) => pair,
        Err(CliError::Input(message)) => {
            println!("{}", json!({ "error": message }));
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(outcome) => {
            if write_outputs(&outcome, &output).is_err() {
                return ExitCode::from(2);
            }
            if outcome.verdict.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(message)) => {
            let error = json!({ "error": message });
            println!("{error}");
            if let Some(path) = &output.out {
                let _ = std::fs::write(path, format!("{error}\n"));
            }
            ExitCode::from(2)
        }
    }
}
