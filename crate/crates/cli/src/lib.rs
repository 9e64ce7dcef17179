//! Pipelines behind the `tricircular` binary: load series and operator
//! specs, run a named verification, and assemble a JSON report plus
//! optional CSV residual rows.
//!
//! Every report carries the tolerance, grid size, and seed that produced
//! it, so each number is re-derivable; a timestamp is the only
//! non-reproducible field.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use thiserror::Error;

use tricircular::hardy::{
    falsify_composition_automorphism, hp_norm_1d, hp_norm_2d, isometry_form_check_neil,
    rotation_automorphism_check, BoundaryGrid, PNorm, Subalgebra,
};
use tricircular::moebius::DiscAutomorphism;
use tricircular::operators::{verify_isometry_1d, verify_isometry_2d, OperatorExpr};
use tricircular::projections::{
    classify_1d, classify_2d, gtcp_from_expr, lagrange_falsifier, ClassifyParams, EigenPair,
    ProjectionError,
};
use tricircular::samples::{self, SampleClass};
use tricircular::schema::{AutomorphismFile, OperatorFile, Series1DFile, Series2DFile};
use tricircular::series::TruncatedSeries1D;
use tricircular::{Complex64, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    /// Any malformed or out-of-domain input; the binary maps this to
    /// exit code 2 with a machine-readable `{"error": ...}` object.
    #[error("{0}")]
    Input(String),
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Default tolerance for exact operator identities.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-8;
/// Default tolerance for quadrature-based norm comparisons.
pub const DEFAULT_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub enum RunConfig {
    Norm {
        series: PathBuf,
        p: PNorm,
        grid: usize,
    },
    IsometryVerify {
        op: PathBuf,
        grid: usize,
        samples: usize,
        seed: u64,
        tol: f64,
        max_degree: usize,
    },
    GtcpBuild {
        op: PathBuf,
        lambda1: Complex64,
        lambda2: Complex64,
        grid: usize,
        samples: usize,
        seed: u64,
        tol: f64,
        max_degree: usize,
    },
    GtcpClassify {
        op: PathBuf,
        grid: usize,
        samples: usize,
        seed: u64,
        tol: f64,
    },
    Falsify {
        op: PathBuf,
        lambda1: Complex64,
        lambda2: Complex64,
        tol: f64,
    },
    RotationCheck {
        theta: f64,
        class: Subalgebra,
        alpha: Option<Complex64>,
        grid: usize,
        samples: usize,
        seed: u64,
        tol: f64,
        max_degree: usize,
    },
    CompositionFalsify {
        tau: PathBuf,
        class: Subalgebra,
        tol: f64,
    },
}

#[derive(Debug, Clone)]
pub struct CsvRow {
    pub check: String,
    pub sample_index: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub report: Value,
    pub csv: Vec<CsvRow>,
}

/// Deterministic sample polynomials for a config: coefficients uniform in
/// the unit square of the complex plane, post-filtered to the subalgebra.
pub fn generate_samples(
    seed: u64,
    count: usize,
    max_degree: usize,
    class: SampleClass,
) -> Vec<TruncatedSeries1D> {
    samples::unit_square_polynomials(seed, count, max_degree, class)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| input_err(format!("cannot parse {}: {e}", path.display())))
}

fn parse_class(class: &str) -> Result<Subalgebra, CliError> {
    match class {
        "h0" => Ok(Subalgebra::H0),
        "neil" => Ok(Subalgebra::Neil),
        other => match other.strip_prefix("h0n:") {
            Some(n) => n
                .parse::<usize>()
                .map(Subalgebra::H0n)
                .map_err(|_| input_err(format!("bad class {other:?}"))),
            None => Err(input_err(format!(
                "class must be h0, neil, or h0n:N, got {other:?}"
            ))),
        },
    }
}

/// Parses `--class` values.
pub fn class_from_flag(flag: &str) -> Result<Subalgebra, CliError> {
    parse_class(flag)
}

fn grid_of(size: usize) -> Result<BoundaryGrid, CliError> {
    BoundaryGrid::new(size).map_err(input_err)
}

fn sample_class_of(class: Subalgebra) -> SampleClass {
    match class {
        Subalgebra::H0 => SampleClass::H0,
        Subalgebra::Neil => SampleClass::Neil,
        Subalgebra::H0n(n) => SampleClass::H0n(n),
    }
}

fn torus_points(per_axis: usize) -> Vec<(Complex64, Complex64)> {
    let axis: Vec<Complex64> = (0..per_axis)
        .map(|k| {
            Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / per_axis as f64)
        })
        .collect();
    let mut points = Vec::with_capacity(per_axis * per_axis);
    for &z in &axis {
        for &w in &axis {
            points.push((z, w));
        }
    }
    points
}

fn boundary_points(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / count as f64))
        .collect()
}

fn residual_rows(residuals: &BTreeMap<String, f64>) -> Vec<CsvRow> {
    residuals
        .iter()
        .map(|(check, residual)| CsvRow {
            check: check.clone(),
            sample_index: 0,
            residual: *residual,
        })
        .collect()
}

fn projection_error(e: ProjectionError) -> CliError {
    input_err(e)
}

/// Executes the configured pipeline and assembles the report envelope.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match config {
        RunConfig::Norm { series, p, grid } => run_norm(series, *p, *grid),
        RunConfig::IsometryVerify {
            op,
            grid,
            samples,
            seed,
            tol,
            max_degree,
        } => run_isometry(op, *grid, *samples, *seed, *tol, *max_degree),
        RunConfig::GtcpBuild {
            op,
            lambda1,
            lambda2,
            grid,
            samples,
            seed,
            tol,
            max_degree,
        } => run_build(op, *lambda1, *lambda2, *grid, *samples, *seed, *tol, *max_degree),
        RunConfig::GtcpClassify {
            op,
            grid,
            samples,
            seed,
            tol,
        } => run_classify(op, *grid, *samples, *seed, *tol),
        RunConfig::Falsify {
            op,
            lambda1,
            lambda2,
            tol,
        } => run_falsify(op, *lambda1, *lambda2, *tol),
        RunConfig::RotationCheck {
            theta,
            class,
            alpha,
            grid,
            samples,
            seed,
            tol,
            max_degree,
        } => run_rotation(*theta, *class, *alpha, *grid, *samples, *seed, *tol, *max_degree),
        RunConfig::CompositionFalsify { tau, class, tol } => {
            run_composition_falsify(tau, *class, *tol)
        }
    }
}

/// Wraps a payload into the common envelope. The timestamp is the only
/// field that varies between identical runs.
pub fn envelope(
    command: &str,
    verdict: Verdict,
    tolerance: f64,
    grid_size: usize,
    seed: u64,
    payload: Value,
) -> Value {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "command": command,
        "verdict": if verdict.passed() { "pass" } else { "fail" },
        "tolerance": tolerance,
        "grid_size": grid_size,
        "seed": seed,
        "timestamp_unix": timestamp,
        "report": payload,
    })
}

fn run_norm(series: &Path, p: PNorm, grid_size: usize) -> Result<Outcome, CliError> {
    let raw: Value = read_json(series)?;
    let grid = grid_of(grid_size)?;
    let (norm, kind) = if raw.get("bidegree").is_some() {
        let file: Series2DFile =
            serde_json::from_value(raw).map_err(|e| input_err(format!("bad series file: {e}")))?;
        let f = file.to_series().map_err(input_err)?;
        (
            hp_norm_2d(|z, w| f.evaluate(z, w), p, &grid, &grid),
            "bidisc",
        )
    } else {
        let file: Series1DFile =
            serde_json::from_value(raw).map_err(|e| input_err(format!("bad series file: {e}")))?;
        let f = file.to_series().map_err(input_err)?;
        (hp_norm_1d(|z| f.evaluate(z), p, &grid), "disc")
    };
    let payload = json!({ "space": kind, "p": p, "norm": norm });
    Ok(Outcome {
        verdict: Verdict::Pass,
        report: envelope("norm", Verdict::Pass, DEFAULT_NORM_TOL, grid_size, 0, payload),
        csv: vec![CsvRow {
            check: "norm".into(),
            sample_index: 0,
            residual: norm,
        }],
    })
}

fn run_isometry(
    op_path: &Path,
    grid_size: usize,
    sample_count: usize,
    seed: u64,
    tol: f64,
    max_degree: usize,
) -> Result<Outcome, CliError> {
    let file: OperatorFile = read_json(op_path)?;
    let grid = grid_of(grid_size)?;
    let (verdict, residuals, max_residual) = if file.is_bidisc() {
        let op = file.to_op_2d().map_err(input_err)?;
        let fs = samples::unit_square_polynomials_2d(seed, sample_count, (4, 4));
        let report = verify_isometry_2d(&op, &fs, &grid, &grid, tol);
        (
            Verdict::from_bool(report.pass),
            report.residuals,
            report.max_residual,
        )
    } else {
        let op = file.to_op_1d().map_err(input_err)?;
        let fs = samples::unit_square_polynomials(
            seed,
            sample_count,
            max_degree,
            SampleClass::Unrestricted,
        );
        let report = verify_isometry_1d(&op, &fs, &grid, tol);
        (
            Verdict::from_bool(report.pass),
            report.residuals,
            report.max_residual,
        )
    };
    let payload = json!({
        "max_residual": max_residual,
        "samples": residuals.len(),
    });
    let csv = residuals
        .iter()
        .enumerate()
        .map(|(i, r)| CsvRow {
            check: "isometry".into(),
            sample_index: i,
            residual: *r,
        })
        .collect();
    Ok(Outcome {
        verdict,
        report: envelope("isometry-verify", verdict, tol, grid_size, seed, payload),
        csv,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_build(
    op_path: &Path,
    lambda1: Complex64,
    lambda2: Complex64,
    grid_size: usize,
    sample_count: usize,
    seed: u64,
    tol: f64,
    max_degree: usize,
) -> Result<Outcome, CliError> {
    let file: OperatorFile = read_json(op_path)?;
    let pair = EigenPair::new(lambda1, lambda2).map_err(projection_error)?;

    let build_result = if file.is_bidisc() {
        let op = file.to_op_2d().map_err(input_err)?;
        let fs = samples::unit_square_polynomials_2d(seed, sample_count, (4, 4));
        let points = torus_points(grid_size.clamp(4, 16));
        gtcp_from_expr(&OperatorExpr::atom(op), &pair, &fs, &points, tol)
            .map(|triple| triple.residuals)
    } else {
        let op = file.to_op_1d().map_err(input_err)?;
        let fs = samples::unit_square_polynomials(
            seed,
            sample_count,
            max_degree,
            SampleClass::Unrestricted,
        );
        let points = boundary_points(grid_size);
        gtcp_from_expr(&OperatorExpr::atom(op), &pair, &fs, &points, tol)
            .map(|triple| triple.residuals)
    };

    match build_result {
        Ok(residuals) => {
            let verdict = Verdict::from_bool(residuals.values().all(|r| *r < tol));
            let payload = json!({
                "lambda1": [lambda1.re, lambda1.im],
                "lambda2": [lambda2.re, lambda2.im],
                "residuals": residuals,
            });
            let csv = residual_rows(&residuals);
            Ok(Outcome {
                verdict,
                report: envelope("gtcp-build", verdict, tol, grid_size, seed, payload),
                csv,
            })
        }
        Err(ProjectionError::AnnihilationFails { residual, tolerance }) => {
            // a well-formed operator that is simply not tri-circular: a
            // verdict, not an input error
            let payload = json!({
                "lambda1": [lambda1.re, lambda1.im],
                "lambda2": [lambda2.re, lambda2.im],
                "residuals": { "annihilation": residual },
                "note": format!("annihilating cubic fails at tolerance {tolerance:.1e}"),
            });
            Ok(Outcome {
                verdict: Verdict::Fail,
                report: envelope("gtcp-build", Verdict::Fail, tol, grid_size, seed, payload),
                csv: vec![CsvRow {
                    check: "annihilation".into(),
                    sample_index: 0,
                    residual,
                }],
            })
        }
        Err(e) => Err(projection_error(e)),
    }
}

fn run_classify(
    op_path: &Path,
    grid_size: usize,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<Outcome, CliError> {
    let file: OperatorFile = read_json(op_path)?;
    let params = ClassifyParams {
        tol,
        grid_points: grid_size,
        sample_count,
        seed,
        ..ClassifyParams::default()
    };
    let report = if file.is_bidisc() {
        let op = file.to_op_2d().map_err(input_err)?;
        classify_2d(&op, &params).map_err(projection_error)?
    } else {
        let op = file.to_op_1d().map_err(input_err)?;
        classify_1d(&op, &params).map_err(projection_error)?
    };
    let verdict = report.verdict;
    let csv = residual_rows(&report.residuals);
    let payload = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome {
        verdict,
        report: envelope("gtcp-classify", verdict, tol, grid_size, seed, payload),
        csv,
    })
}

fn run_falsify(
    op_path: &Path,
    lambda1: Complex64,
    lambda2: Complex64,
    tol: f64,
) -> Result<Outcome, CliError> {
    let file: OperatorFile = read_json(op_path)?;
    if file.is_bidisc() {
        return Err(input_err("falsify expects a disc operator (no sigma field)"));
    }
    let op = file.to_op_1d().map_err(input_err)?;
    let pair = EigenPair::new(lambda1, lambda2).map_err(projection_error)?;
    let outcome = lagrange_falsifier(&op, &pair).map_err(projection_error)?;
    let verdict = Verdict::from_bool((outcome.residual - 1.0).abs() < tol);
    let payload = json!({
        "base_point": [outcome.base_point.re, outcome.base_point.im],
        "residual": outcome.residual,
        "expected": 1.0,
    });
    Ok(Outcome {
        verdict,
        report: envelope("falsify", verdict, tol, 0, 0, payload),
        csv: vec![CsvRow {
            check: "falsifier".into(),
            sample_index: 0,
            residual: outcome.residual,
        }],
    })
}

#[allow(clippy::too_many_arguments)]
fn run_rotation(
    theta: f64,
    class: Subalgebra,
    alpha: Option<Complex64>,
    grid_size: usize,
    sample_count: usize,
    seed: u64,
    tol: f64,
    max_degree: usize,
) -> Result<Outcome, CliError> {
    let grid = grid_of(grid_size)?;
    let fs = samples::unit_square_polynomials(
        seed,
        sample_count,
        max_degree,
        sample_class_of(class),
    );
    let report = match alpha {
        Some(alpha) => {
            if (alpha.norm() - 1.0).abs() > 1e-12 {
                return Err(input_err(format!(
                    "alpha must be unimodular, got modulus {}",
                    alpha.norm()
                )));
            }
            isometry_form_check_neil(alpha, theta, &fs, &grid, tol)
        }
        None => rotation_automorphism_check(theta, &fs, class, &grid, tol),
    };
    let verdict = report.verdict;
    let csv = residual_rows(&report.residuals);
    let payload = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome {
        verdict,
        report: envelope("automorphism-check", verdict, tol, grid_size, seed, payload),
        csv,
    })
}

fn run_composition_falsify(
    tau_path: &Path,
    class: Subalgebra,
    tol: f64,
) -> Result<Outcome, CliError> {
    let file: AutomorphismFile = read_json(tau_path)?;
    let tau: DiscAutomorphism = file.to_automorphism().map_err(input_err)?;
    let report = falsify_composition_automorphism(&tau, class);
    // the two routes must agree: witness evaluation vs closed-form data
    let verdict = Verdict::from_bool((report.violation - report.predicted).abs() < tol);
    let payload = json!({
        "violation": report.violation,
        "predicted": report.predicted,
        "witness": Series1DFile::from_series(&report.witness),
    });
    Ok(Outcome {
        verdict,
        report: envelope("automorphism-check", verdict, tol, 0, 0, payload),
        csv: vec![CsvRow {
            check: "composition_falsifier".into(),
            sample_index: 0,
            residual: report.violation,
        }],
    })
}

/// Renders CSV rows with the `(check, sample_index, residual)` columns.
pub fn csv_text(rows: &[CsvRow]) -> String {
    let mut text = String::from("check,sample_index,residual\n");
    for row in rows {
        text.push_str(&format!(
            "{},{},{:.17e}\n",
            row.check, row.sample_index, row.residual
        ));
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_parsing() {
        assert_eq!(parse_class("h0").unwrap(), Subalgebra::H0);
        assert_eq!(parse_class("neil").unwrap(), Subalgebra::Neil);
        assert_eq!(parse_class("h0n:3").unwrap(), Subalgebra::H0n(3));
        assert!(parse_class("h2").is_err());
    }

    #[test]
    fn generated_samples_are_deterministic_and_filtered() {
        let a = generate_samples(0, 2, 6, SampleClass::H0);
        let b = generate_samples(0, 2, 6, SampleClass::H0);
        assert_eq!(a, b);
        assert_eq!(a[0].coeff(0), Complex64::ZERO);
        let c = generate_samples(1, 1, 6, SampleClass::Unrestricted);
        assert_ne!(a[0].coeff(1), c[0].coeff(1));
    }

    #[test]
    fn envelope_contains_provenance_fields() {
        let value = envelope("norm", Verdict::Pass, 1e-6, 512, 7, json!({"x": 1}));
        for key in ["command", "verdict", "tolerance", "grid_size", "seed", "timestamp_unix"] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
    }
}
