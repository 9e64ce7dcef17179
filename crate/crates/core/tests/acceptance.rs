//! Acceptance suite. Each test prints one pass/fail line for its criterion
//! and asserts the stated tolerances and runtime bounds.
//!
//! Two criteria encode analytically unreachable targets and are expected to
//! fail until their statements change; the assertions spell out the
//! obstruction:
//!
//! - criterion 3's sup-norm leg compares grid maxima of `|f∘τ|` and `|f|`,
//!   which differ by the grid sampling error of a maximum (about
//!   `h''·(π/M)²`, measured near 1e-3 at M = 2048), far above 1e-6;
//! - criterion 5's operator `f(z, w) ↦ f(−z, iw)` has all four fourth
//!   roots of unity in its point spectrum (eigenvalue −i on `z·w`), so no
//!   annihilating cubic exists and the closed-form family-(2) quotients
//!   are not idempotent on generic samples.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tricircular::hardy::{
    falsify_composition_automorphism, hp_norm_1d, is_inner, rotation_automorphism_check,
    BlaschkeProduct, BoundaryGrid, PNorm, Subalgebra,
};
use tricircular::moebius::DiscAutomorphism;
use tricircular::operators::{
    calibrate_alpha, verify_isometry_1d, OperatorExpr, UnimodularMonomial,
    WeightedCompositionOp1D, WeightedCompositionOp2D,
};
use tricircular::projections::{
    classify_1d, classify_2d, eigenprojection_oracle, gtcp_from_matrix, lagrange_falsifier,
    max_action, order3_projection_exprs, order4_candidate_exprs, verify_triple, ClassifyParams,
    EigenPair, Family, GtcpTriple, OracleParams,
};
use tricircular::samples;
use tricircular::series::{TruncatedSeries1D, TruncatedSeries2D};
use tricircular::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn boundary(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
        .collect()
}

fn torus_grid(per_axis: usize) -> Vec<(Complex64, Complex64)> {
    let axis = boundary(per_axis);
    let mut points = Vec::with_capacity(per_axis * per_axis);
    for &z in &axis {
        for &w in &axis {
            points.push((z, w));
        }
    }
    points
}

struct Criterion {
    name: &'static str,
    start: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            start: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, ok: bool, detail: String) {
        let tag = if ok { "ok" } else { "FAIL" };
        println!("  [{tag}] {label}: {detail}");
        if !ok {
            self.failures.push(format!("{label}: {detail}"));
        }
    }

    fn finish(mut self, runtime_limit: Duration) {
        let elapsed = self.start.elapsed();
        if elapsed > runtime_limit {
            self.failures.push(format!(
                "runtime {elapsed:.2?} exceeds the {runtime_limit:.2?} budget"
            ));
        }
        if self.failures.is_empty() {
            println!("{}: pass ({elapsed:.2?})", self.name);
        } else {
            println!("{}: FAIL ({elapsed:.2?})", self.name);
            panic!("{}: {}", self.name, self.failures.join("; "));
        }
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

#[test]
fn criterion_01_projection_formulas_match_spectral_oracle() {
    let mut criterion = Criterion::new("criterion 1 (matrix oracle equivalence, 200 cases)");
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let n = 3 + case % 4;
        // unimodular pair separated from 1 and from each other
        let (lambda1, lambda2) = loop {
            let phi1 = 0.3 + rng.random::<f64>() * (TAU - 0.6);
            let phi2 = 0.3 + rng.random::<f64>() * (TAU - 0.6);
            if (phi1 - phi2).abs() > 0.3 {
                break (
                    Complex64::from_polar(1.0, phi1),
                    Complex64::from_polar(1.0, phi2),
                );
            }
        };
        let pair = EigenPair::new(lambda1, lambda2).unwrap();
        let choices = [Complex64::ONE, lambda1, lambda2];

        // eigenvector basis with condition at most 4 (well inside 100)
        let raw = DMatrix::from_fn(n, n, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let q = raw.qr().q();
        let d = DVector::from_iterator(n, (0..n).map(|_| c(0.5 + 1.5 * rng.random::<f64>(), 0.0)));
        let basis = &q * DMatrix::from_diagonal(&d);
        let basis_inv = basis.clone().lu().try_inverse().expect("well conditioned");
        let eigenvalues =
            DVector::from_iterator(n, (0..n).map(|_| choices[rng.random_range(0..3)]));
        let t = &basis * DMatrix::from_diagonal(&eigenvalues) * &basis_inv;

        let (p_f, q_f, r_f) = gtcp_from_matrix(&t, &pair, 1e-8).expect("cubic annihilates");
        let (p_o, q_o, r_o) = eigenprojection_oracle(&t, &pair, &OracleParams::default())
            .expect("spectrum is {1, λ1, λ2} by construction");
        worst = worst
            .max(max_abs(&(p_f - p_o)))
            .max(max_abs(&(q_f - q_o)))
            .max(max_abs(&(r_f - r_o)));
    }
    criterion.check(
        "entrywise agreement",
        worst < 1e-9,
        format!("max difference {worst:.3e} (tolerance 1e-9)"),
    );
    criterion.finish(Duration::from_secs(5));
}

#[test]
fn criterion_02_order_three_realization_on_the_disc() {
    let mut criterion = Criterion::new("criterion 2 (order-3 realization, disc)");
    let tau = DiscAutomorphism::elliptic_of_order(3, c(0.4, 0.0)).unwrap();
    let p = PNorm::Finite(4.0);
    let alpha = calibrate_alpha(&tau, 3, p).unwrap();
    let op = WeightedCompositionOp1D::new(alpha, tau, p).unwrap();
    let fs = samples::unit_square_polynomials(1002, 20, 16, samples::SampleClass::Unrestricted);
    let points = boundary(32);

    let t = OperatorExpr::atom(op);
    let cube_minus_identity = OperatorExpr::sum(
        OperatorExpr::power(t.clone(), 3),
        OperatorExpr::scale(-Complex64::ONE, OperatorExpr::Identity),
    );
    let power_residual = max_action(&cube_minus_identity, &fs, &points);
    criterion.check(
        "T^3 = I pointwise",
        power_residual < 1e-8,
        format!("residual {power_residual:.3e} (tolerance 1e-8)"),
    );

    let ([p_expr, q_expr, r_expr], pair) = order3_projection_exprs(&op);
    let triple = GtcpTriple {
        p: p_expr,
        q: q_expr,
        r: r_expr,
        pair,
        residuals: BTreeMap::new(),
    };
    let report = verify_triple(&triple, &t, &fs, &points, 1e-8);
    criterion.check(
        "eleven triple residuals",
        report.verdict.passed(),
        format!("max residual {:.3e} (tolerance 1e-8)", report.max_residual()),
    );

    let classification = classify_1d(&op, &ClassifyParams::default()).unwrap();
    criterion.check(
        "classification",
        classification.family == Family::Order3 && classification.verdict.passed(),
        format!("family {}", classification.family),
    );
    criterion.finish(Duration::from_secs(10));
}

#[test]
fn criterion_03_isometry_lattice() {
    let mut criterion = Criterion::new("criterion 3 (isometry verification lattice)");
    let grid = BoundaryGrid::new(2048).unwrap();
    let fs = samples::bounded_zero_polynomials(1003, 50, 16, 0.8);
    let lattice_a = [c(0.0, 0.0), c(0.3, 0.0), c(0.5, 0.2)];
    let lattice_theta = [0.0, 1.1];
    let lattice_p = [
        PNorm::Finite(1.0),
        PNorm::Finite(3.0),
        PNorm::Finite(4.0),
        PNorm::Infinity,
    ];
    for p in lattice_p {
        let mut worst: f64 = 0.0;
        for a in lattice_a {
            for theta in lattice_theta {
                let tau = DiscAutomorphism::new(theta, a).unwrap();
                let op = WeightedCompositionOp1D::new(Complex64::ONE, tau, p).unwrap();
                let report = verify_isometry_1d(&op, &fs, &grid, 1e-6);
                worst = worst.max(report.max_residual);
            }
        }
        let label = match p {
            PNorm::Finite(v) => format!("p = {v}"),
            PNorm::Infinity => "p = inf (grid-sup sampling error dominates)".into(),
        };
        criterion.check(
            &label,
            worst < 1e-6,
            format!("max residual {worst:.3e} (tolerance 1e-6)"),
        );
    }

    // negative control: weight exponent forced to zero at p = 1
    let f = TruncatedSeries1D::new(vec![Complex64::ONE, Complex64::ONE]);
    let tau = DiscAutomorphism::new(0.0, c(0.5, 0.0)).unwrap();
    let corrupted = |z: Complex64| f.evaluate(tau.evaluate(z).unwrap());
    let deviation = (hp_norm_1d(corrupted, PNorm::Finite(1.0), &grid)
        - hp_norm_1d(|z| f.evaluate(z), PNorm::Finite(1.0), &grid))
    .abs();
    criterion.check(
        "corrupted-weight control",
        deviation > 1e-2,
        format!("norm deviation {deviation:.3e} (must exceed 1e-2)"),
    );
    criterion.finish(Duration::from_secs(30));
}

#[test]
fn criterion_04_falsifier_sharpness() {
    let mut criterion = Criterion::new("criterion 4 (falsifier sharpness)");
    let pair = EigenPair::cube_roots();
    let symbols = [
        ("order 4", DiscAutomorphism::elliptic_of_order(4, c(0.2, 0.0)).unwrap()),
        ("order 5", DiscAutomorphism::elliptic_of_order(5, c(0.3, 0.0)).unwrap()),
        ("aperiodic", DiscAutomorphism::new(1.0, c(0.3, 0.0)).unwrap()),
    ];
    assert_eq!(
        symbols[2].1.order_up_to(4, 1e-9),
        None,
        "the aperiodic symbol must have no order up to 4"
    );
    for (label, tau) in symbols {
        let op = WeightedCompositionOp1D::new(Complex64::ONE, tau, PNorm::Finite(4.0)).unwrap();
        let outcome = lagrange_falsifier(&op, &pair).unwrap();
        criterion.check(
            label,
            (outcome.residual - 1.0).abs() < 1e-8,
            format!("residual {:.12} (must equal 1 within 1e-8)", outcome.residual),
        );
    }
    criterion.finish(Duration::from_secs(10));
}

#[test]
fn criterion_05_family_two_construction_on_the_bidisc() {
    let mut criterion = Criterion::new("criterion 5 (family-(2) construction, bidisc)");
    let tau = DiscAutomorphism::rotation(std::f64::consts::PI);
    let sigma = UnimodularMonomial::new(Complex64::I, 0).unwrap();
    let p = PNorm::Infinity;
    // calibrate the weight along the symbol's own period
    let alpha = calibrate_alpha(&tau, 2, p).unwrap();
    let op = WeightedCompositionOp2D::new(alpha, tau, sigma, p).unwrap();
    let fs = samples::unit_square_polynomials_2d(1005, 10, (3, 4));
    let points = torus_grid(16);
    let t = OperatorExpr::atom(op);

    let fourth_minus_identity = OperatorExpr::sum(
        OperatorExpr::power(t.clone(), 4),
        OperatorExpr::scale(-Complex64::ONE, OperatorExpr::Identity),
    );
    let fourth = max_action(&fourth_minus_identity, &fs, &points);
    criterion.check(
        "T^4 = I pointwise",
        fourth < 1e-8,
        format!("residual {fourth:.3e} (tolerance 1e-8)"),
    );

    let square = OperatorExpr::power(t.clone(), 2);
    let mut flip_residual: f64 = 0.0;
    for sample in &fs {
        let eval = |(z, w): (Complex64, Complex64)| sample.evaluate(z, w);
        for &(z, w) in &points {
            let lhs = square.apply(&eval, (z, w)).unwrap();
            flip_residual = flip_residual.max((lhs - sample.evaluate(z, -w)).norm());
        }
    }
    criterion.check(
        "T^2 f(z, w) = f(z, -w)",
        flip_residual < 1e-10,
        format!("residual {flip_residual:.3e} (tolerance 1e-10)"),
    );

    let candidates = order4_candidate_exprs(&op);
    let (family, [p_expr, q_expr, r_expr], pair) = candidates
        .into_iter()
        .find(|(family, ..)| matches!(family, Family::Order4PmQiR { plus_i: true }))
        .expect("the +i branch of family (2) is among the candidates");

    // structural identity that does hold: R extracts the odd-in-w part
    let g = samples::unit_square_polynomials(1006, 3, 3, samples::SampleClass::Unrestricted);
    let mut odd_part: f64 = 0.0;
    for g1 in &g {
        // g(z) as a bidisc function constant in w, and w·g(z)
        let even_sample = TruncatedSeries2D::new(
            g1.coeffs().iter().map(|&cz| vec![cz]).collect(),
        );
        let wg = TruncatedSeries2D::new(
            g1.coeffs()
                .iter()
                .map(|&cz| vec![Complex64::ZERO, cz])
                .collect(),
        );
        for &(z, w) in points.iter().step_by(7) {
            let eval_wg = |(zz, ww): (Complex64, Complex64)| wg.evaluate(zz, ww);
            let kept = r_expr.apply(&eval_wg, (z, w)).unwrap();
            odd_part = odd_part.max((kept - wg.evaluate(z, w)).norm());
            let eval_even = |(zz, ww): (Complex64, Complex64)| even_sample.evaluate(zz, ww);
            let killed = r_expr.apply(&eval_even, (z, w)).unwrap();
            odd_part = odd_part.max(killed.norm());
        }
    }
    criterion.check(
        "R = (I - T^2)/2 extracts the odd-in-w part",
        odd_part < 1e-10,
        format!("residual {odd_part:.3e} (tolerance 1e-10)"),
    );

    let triple = GtcpTriple {
        p: p_expr.clone(),
        q: q_expr.clone(),
        r: r_expr.clone(),
        pair,
        residuals: BTreeMap::new(),
    };
    let report = verify_triple(&triple, &t, &fs, &points, 1e-8);
    criterion.check(
        "reconstruction P - Q + iR = T",
        report.residuals["reconstruction"] < 1e-8,
        format!("residual {:.3e}", report.residuals["reconstruction"]),
    );
    criterion.check(
        "eleven triple residuals",
        report.verdict.passed(),
        format!(
            "p_idempotent {:.3e}, pq {:.3e} (tolerance 1e-8); the operator has eigenvalue -i \
             on z·w, so the family-(2) quotients cannot be idempotent",
            report.residuals["p_idempotent"], report.residuals["pq"]
        ),
    );

    match classify_2d(&op, &ClassifyParams::default()) {
        Ok(report) => criterion.check(
            "classification tag",
            matches!(report.family, Family::Order4PmQiR { .. }),
            format!("family {}", report.family),
        ),
        Err(err) => criterion.check(
            "classification tag",
            false,
            format!("classifier refused: {err}"),
        ),
    }
    criterion.check(
        "family label",
        format!("{family}") == "Order4_PmQ_iR",
        format!("candidate label {family}"),
    );
    criterion.finish(Duration::from_secs(10));
}

#[test]
fn criterion_06_order_three_family_on_the_bidisc() {
    let mut criterion = Criterion::new("criterion 6 (order-3 family, bidisc)");
    let tau = DiscAutomorphism::elliptic_of_order(3, c(0.3, 0.0)).unwrap();
    let p = PNorm::Finite(4.0);
    let alpha = calibrate_alpha(&tau, 3, p).unwrap();
    let sigma = UnimodularMonomial::new(Complex64::ONE, 0).unwrap();
    let op = WeightedCompositionOp2D::new(alpha, tau, sigma, p).unwrap();
    let report = classify_2d(&op, &ClassifyParams::default()).unwrap();
    let max_triple_residual = report
        .residuals
        .iter()
        .filter(|(k, _)| !k.starts_with("t"))
        .map(|(_, v)| *v)
        .fold(0.0, f64::max);
    criterion.check(
        "classification",
        report.family == Family::Order3 && report.verdict.passed(),
        format!("family {}", report.family),
    );
    criterion.check(
        "residuals",
        max_triple_residual < 1e-8,
        format!("max residual {max_triple_residual:.3e} (tolerance 1e-8)"),
    );
    criterion.finish(Duration::from_secs(10));
}

#[test]
fn criterion_07_degenerate_cases() {
    let mut criterion = Criterion::new("criterion 7 (degenerate cases)");

    let identity_op = WeightedCompositionOp1D::new(
        Complex64::ONE,
        DiscAutomorphism::identity(),
        PNorm::Infinity,
    )
    .unwrap();
    let report = classify_1d(&identity_op, &ClassifyParams::default()).unwrap();
    let (p_action, q_action, r_action) = (
        report.residuals["p_action"],
        report.residuals["q_action"],
        report.residuals["r_action"],
    );
    criterion.check(
        "T = I yields Q = R = 0",
        matches!(&report.family, Family::Degenerate(r) if r.contains("Q, R"))
            && q_action < 1e-8
            && r_action < 1e-8
            && p_action > 1e-4,
        format!("actions P {p_action:.3e}, Q {q_action:.3e}, R {r_action:.3e}"),
    );

    let tau = DiscAutomorphism::rotation(std::f64::consts::PI);
    let p = PNorm::Finite(4.0);
    let alpha = calibrate_alpha(&tau, 2, p).unwrap();
    let op = WeightedCompositionOp1D::new(alpha, tau, p).unwrap();
    let report = classify_1d(&op, &ClassifyParams::default()).unwrap();
    let (p_action, q_action, r_action) = (
        report.residuals["p_action"],
        report.residuals["q_action"],
        report.residuals["r_action"],
    );
    criterion.check(
        "T^2 = I yields R = 0 at (λ1, λ2) = (-1, i)",
        matches!(&report.family, Family::Degenerate(r) if r.ends_with("R"))
            && r_action < 1e-8
            && p_action > 1e-4
            && q_action > 1e-4,
        format!("actions P {p_action:.3e}, Q {q_action:.3e}, R {r_action:.3e}"),
    );
    // both margins sit at least two orders from the 1e-6 zero threshold
    criterion.check(
        "threshold margins",
        r_action < 1e-8 && q_action > 1e-4,
        format!("vanishing {r_action:.3e} vs surviving {q_action:.3e}"),
    );
    criterion.finish(Duration::from_secs(10));
}

#[test]
fn criterion_08_automorphism_results() {
    let mut criterion = Criterion::new("criterion 8 (rotation automorphisms and falsifiers)");
    let grid = BoundaryGrid::new(256).unwrap();
    for theta in [0.0, TAU / 3.0, 1.7] {
        for (label, class, sample_class) in [
            ("H0", Subalgebra::H0, samples::SampleClass::H0),
            ("Neil", Subalgebra::Neil, samples::SampleClass::Neil),
        ] {
            let fs = samples::unit_square_polynomials(1008, 10, 8, sample_class);
            let report = rotation_automorphism_check(theta, &fs, class, &grid, 1e-10);
            criterion.check(
                &format!("rotation θ = {theta:.4} on {label}"),
                report.verdict.passed(),
                format!("max residual {:.3e} (tolerance 1e-10)", report.max_residual()),
            );
        }
    }

    for a in [c(0.2, 0.0), c(0.5, 0.0), c(0.0, 0.7)] {
        let tau = DiscAutomorphism::new(0.9, a).unwrap();
        let h0 = falsify_composition_automorphism(&tau, Subalgebra::H0);
        criterion.check(
            &format!("H0 falsifier at a = {a}"),
            (h0.violation - a.norm()).abs() < 1e-12,
            format!("violation {:.15} vs |a| = {:.15}", h0.violation, a.norm()),
        );
        let neil = falsify_composition_automorphism(&tau, Subalgebra::Neil);
        let oracle = tau.evaluate(Complex64::ZERO).unwrap().norm()
            * tau.derivative_at(Complex64::ZERO).unwrap().norm();
        criterion.check(
            &format!("Neil falsifier at a = {a}"),
            (neil.violation - oracle).abs() < 1e-10,
            format!("violation {:.15} vs |τ(0)τ'(0)| = {:.15}", neil.violation, oracle),
        );
    }
    criterion.finish(Duration::from_secs(10));
}

#[test]
fn criterion_09_inner_preservation() {
    let mut criterion = Criterion::new("criterion 9 (inner functions stay inner)");
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let grid = BoundaryGrid::new(512).unwrap();
    fn random_disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
        let r = radius * rng.random::<f64>().sqrt();
        Complex64::from_polar(r, TAU * rng.random::<f64>())
    }
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let zeros: Vec<Complex64> = (0..5).map(|_| random_disc(&mut rng, 0.8)).collect();
        let blaschke = BlaschkeProduct::new(zeros, Complex64::ONE).unwrap();
        for _ in 0..5 {
            let theta = TAU * rng.random::<f64>();
            let tau = DiscAutomorphism::new(theta, random_disc(&mut rng, 0.7)).unwrap();
            let report = is_inner(
                |z| blaschke.evaluate(tau.evaluate(z).unwrap()),
                &grid,
                1e-10,
            );
            worst = worst.max(report.max_deviation);
            if !report.is_inner {
                break;
            }
        }
    }
    criterion.check(
        "max boundary deviation",
        worst < 1e-10,
        format!("{worst:.3e} (tolerance 1e-10)"),
    );
    criterion.finish(Duration::from_secs(10));
}

#[test]
fn criterion_10_norm_anchor() {
    let mut criterion = Criterion::new("criterion 10 (norm anchor ‖1+z‖₄)");
    let grid = BoundaryGrid::new(512).unwrap();
    let norm = hp_norm_1d(
        |z| Complex64::ONE + z,
        PNorm::Finite(4.0),
        &grid,
    );
    let expected = 6.0f64.powf(0.25);
    criterion.check(
        "quadrature against the closed form",
        (norm - expected).abs() < 1e-10,
        format!("{norm:.15} vs 6^(1/4) = {expected:.15}"),
    );
    criterion.finish(Duration::from_secs(5));
}
