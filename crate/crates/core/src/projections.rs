//! Generalized tri-circular projections: construction from isometries,
//! independent spectral verification on matrices, classification on the
//! disc and bidisc, and the Lagrange-polynomial falsifier.
//!
//! An isometry `T` decomposes as `P + λ₁Q + λ₂R` with complementary
//! projections exactly when the cubic
//! `T³ − (1+a)T² + (a+b)T − bI` annihilates, where `a = λ₁ + λ₂` and
//! `b = λ₁λ₂`; the projections are then quotients of the linear factors.
//! On weighted composition operators the only realizable case with three
//! distinct eigenvalues is the order-3 family; everything else is either
//! degenerate or refuted by the falsifier.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::Serialize;
use thiserror::Error;


use crate::operators::{
    materialize_1d, Evaluable, OperatorExpr, PointOperator, WeightedCompositionOp1D,
    WeightedCompositionOp2D,
};
use crate::report::{CheckReport, Verdict};
use crate::samples;
use crate::series::{lagrange_polynomial, TruncatedSeries1D};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("eigenvalue pair is invalid: {0}")]
    InvalidEigenPair(String),
    #[error("annihilating cubic has residual {residual:.3e}, above tolerance {tolerance:.1e}; \
             the operator is not a tri-circular combination for this pair")]
    AnnihilationFails { residual: f64, tolerance: f64 },
    #[error("matrix spectrum does not match {{1, λ1, λ2}}: {0}")]
    SpectrumMismatch(String),
    #[error("no base point with a well-separated four-point orbit found")]
    OrbitDegenerate,
    #[error("the classification excludes p = 2")]
    PEqualsTwo,
    #[error("symbol has finite order {order} <= 3, the falsifier needs four distinct orbit points")]
    LowOrderSymbol { order: u32 },
    #[error("minimal power is 4 but no closed-form family verifies; \
             the input is outside the classified structure")]
    NoFamilyMatches,
}

/// Distinct unimodular eigenvalues `λ₁, λ₂ ∉ {1}` with the derived
/// combinations `a = λ₁ + λ₂` and `b = λ₁λ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    lambda1: Complex64,
    lambda2: Complex64,
}

impl EigenPair {
    pub fn new(lambda1: Complex64, lambda2: Complex64) -> Result<Self, ProjectionError> {
        for (name, l) in [("λ1", lambda1), ("λ2", lambda2)] {
            if (l.norm() - 1.0).abs() > 1e-12 {
                return Err(ProjectionError::InvalidEigenPair(format!(
                    "{name} has modulus {}",
                    l.norm()
                )));
            }
            if (l - Complex64::ONE).norm() <= 1e-9 {
                return Err(ProjectionError::InvalidEigenPair(format!("{name} equals 1")));
            }
        }
        if (lambda1 - lambda2).norm() <= 1e-9 {
            return Err(ProjectionError::InvalidEigenPair(
                "λ1 and λ2 coincide".into(),
            ));
        }
        Ok(Self { lambda1, lambda2 })
    }

    /// The fixed cube-root convention `(e^{2πi/3}, e^{4πi/3})`.
    pub fn cube_roots() -> Self {
        let l = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        Self {
            lambda1: l,
            lambda2: l * l,
        }
    }

    /// Conventional pair used when probing degenerate inputs.
    pub fn degenerate_probe() -> Self {
        Self {
            lambda1: -Complex64::ONE,
            lambda2: Complex64::I,
        }
    }

    pub fn lambda1(&self) -> Complex64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> Complex64 {
        self.lambda2
    }

    pub fn a(&self) -> Complex64 {
        self.lambda1 + self.lambda2
    }

    pub fn b(&self) -> Complex64 {
        self.lambda1 * self.lambda2
    }
}

/// `T³ − (1+a)T² + (a+b)T − bI` as an expression over any base expression.
pub fn annihilation_expr<A: Clone>(t: &OperatorExpr<A>, pair: &EigenPair) -> OperatorExpr<A> {
    let a = pair.a();
    let b = pair.b();
    OperatorExpr::sum(
        OperatorExpr::sum(
            OperatorExpr::power(t.clone(), 3),
            OperatorExpr::scale(-(Complex64::ONE + a), OperatorExpr::power(t.clone(), 2)),
        ),
        OperatorExpr::sum(
            OperatorExpr::scale(a + b, t.clone()),
            OperatorExpr::scale(-b, OperatorExpr::Identity),
        ),
    )
}

/// The three quotient projections
/// `P = (T − λ₁I)(T − λ₂I)/((1 − λ₁)(1 − λ₂))`,
/// `Q = (T − I)(T − λ₂I)/((λ₁ − 1)(λ₁ − λ₂))`,
/// `R = (T − I)(T − λ₁I)/((λ₂ − 1)(λ₂ − λ₁))`.
pub fn quotient_projection_exprs<A: Clone>(
    t: &OperatorExpr<A>,
    pair: &EigenPair,
) -> [OperatorExpr<A>; 3] {
    let one = Complex64::ONE;
    let (l1, l2) = (pair.lambda1(), pair.lambda2());
    let linear = |lambda: Complex64| {
        OperatorExpr::sum(
            t.clone(),
            OperatorExpr::scale(-lambda, OperatorExpr::Identity),
        )
    };
    let quotient = |la: Complex64, lb: Complex64, denom: Complex64| {
        OperatorExpr::scale(
            one / denom,
            OperatorExpr::compose(linear(la), linear(lb)),
        )
    };
    [
        quotient(l1, l2, (one - l1) * (one - l2)),
        quotient(one, l2, (l1 - one) * (l1 - l2)),
        quotient(one, l1, (l2 - one) * (l2 - l1)),
    ]
}

/// Largest pointwise action `|(expr f)(x)|` over the sample set.
pub fn max_action<A, S>(expr: &OperatorExpr<A>, samples: &[S], points: &[A::Point]) -> f64
where
    A: PointOperator,
    S: Evaluable<A::Point>,
{
    let mut max: f64 = 0.0;
    for sample in samples {
        let eval = |x: A::Point| sample.value_at(x);
        for &x in points {
            let v = expr
                .apply(&eval, x)
                .expect("verification expressions stay within the depth bound");
            max = max.max(v.norm());
        }
    }
    max
}

/// Max over samples and grid points of the annihilating cubic's action.
pub fn annihilation_residual<A, S>(
    t: &OperatorExpr<A>,
    pair: &EigenPair,
    samples: &[S],
    points: &[A::Point],
) -> f64
where
    A: PointOperator + Clone,
    S: Evaluable<A::Point>,
{
    max_action(&annihilation_expr(t, pair), samples, points)
}

/// A projection triple with its eigenvalue pair and verification residuals.
#[derive(Debug, Clone)]
pub struct GtcpTriple<A> {
    pub p: OperatorExpr<A>,
    pub q: OperatorExpr<A>,
    pub r: OperatorExpr<A>,
    pub pair: EigenPair,
    pub residuals: BTreeMap<String, f64>,
}

/// The eleven defining residuals: three idempotents, six mutual products,
/// completeness, and reconstruction of `T`.
pub fn verify_triple<A, S>(
    triple: &GtcpTriple<A>,
    t: &OperatorExpr<A>,
    samples: &[S],
    points: &[A::Point],
    tol: f64,
) -> CheckReport
where
    A: PointOperator + Clone,
    S: Evaluable<A::Point>,
{
    let residuals = triple_residuals(&triple.p, &triple.q, &triple.r, &triple.pair, t, samples, points);
    CheckReport::from_residuals("gtcp_triple", residuals, tol, points.len())
}

fn triple_residuals<A, S>(
    p: &OperatorExpr<A>,
    q: &OperatorExpr<A>,
    r: &OperatorExpr<A>,
    pair: &EigenPair,
    t: &OperatorExpr<A>,
    samples: &[S],
    points: &[A::Point],
) -> BTreeMap<String, f64>
where
    A: PointOperator + Clone,
    S: Evaluable<A::Point>,
{
    let minus = |a: &OperatorExpr<A>, b: &OperatorExpr<A>| {
        OperatorExpr::sum(
            a.clone(),
            OperatorExpr::scale(-Complex64::ONE, b.clone()),
        )
    };
    let product = |a: &OperatorExpr<A>, b: &OperatorExpr<A>| {
        OperatorExpr::compose(a.clone(), b.clone())
    };
    let mut residuals = BTreeMap::new();
    let mut put = |name: &str, expr: OperatorExpr<A>| {
        residuals.insert(name.to_string(), max_action(&expr, samples, points));
    };
    put("p_idempotent", minus(&product(p, p), p));
    put("q_idempotent", minus(&product(q, q), q));
    put("r_idempotent", minus(&product(r, r), r));
    put("pq", product(p, q));
    put("qp", product(q, p));
    put("pr", product(p, r));
    put("rp", product(r, p));
    put("qr", product(q, r));
    put("rq", product(r, q));
    let sum = OperatorExpr::sum(OperatorExpr::sum(p.clone(), q.clone()), r.clone());
    put("completeness", minus(&sum, &OperatorExpr::Identity));
    let recombined = OperatorExpr::sum(
        p.clone(),
        OperatorExpr::sum(
            OperatorExpr::scale(pair.lambda1(), q.clone()),
            OperatorExpr::scale(pair.lambda2(), r.clone()),
        ),
    );
    put("reconstruction", minus(&recombined, t));
    residuals
}

/// Builds the quotient triple and validates the annihilating cubic first.
pub fn gtcp_from_expr<A, S>(
    t: &OperatorExpr<A>,
    pair: &EigenPair,
    samples: &[S],
    points: &[A::Point],
    tol: f64,
) -> Result<GtcpTriple<A>, ProjectionError>
where
    A: PointOperator + Clone,
    S: Evaluable<A::Point>,
{
    let residual = annihilation_residual(t, pair, samples, points);
    if !(residual < tol) {
        return Err(ProjectionError::AnnihilationFails {
            residual,
            tolerance: tol,
        });
    }
    let [p, q, r] = quotient_projection_exprs(t, pair);
    let mut residuals = triple_residuals(&p, &q, &r, pair, t, samples, points);
    residuals.insert("annihilation".into(), residual);
    Ok(GtcpTriple {
        p,
        q,
        r,
        pair: *pair,
        residuals,
    })
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Matrix-mode quotient projections plus the annihilation residual.
pub fn matrix_projection_triple(
    t: &DMatrix<Complex64>,
    pair: &EigenPair,
) -> (DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>, f64) {
    let n = t.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let one = Complex64::ONE;
    let (l1, l2) = (pair.lambda1(), pair.lambda2());
    let f1 = t - &id * l1;
    let f2 = t - &id * l2;
    let f0 = t - &id;
    let p = (&f1 * &f2) / ((one - l1) * (one - l2));
    let q = (&f0 * &f2) / ((l1 - one) * (l1 - l2));
    let r = (&f0 * &f1) / ((l2 - one) * (l2 - l1));
    let annihilation = max_abs(&(&f0 * &f1 * &f2));
    (p, q, r, annihilation)
}

/// Matrix-mode construction, rejecting operators the cubic does not kill.
pub fn gtcp_from_matrix(
    t: &DMatrix<Complex64>,
    pair: &EigenPair,
    tol: f64,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>), ProjectionError> {
    let (p, q, r, annihilation) = matrix_projection_triple(t, pair);
    if !(annihilation < tol) {
        return Err(ProjectionError::AnnihilationFails {
            residual: annihilation,
            tolerance: tol,
        });
    }
    Ok((p, q, r))
}

#[derive(Debug, Clone, Copy)]
pub struct OracleParams {
    /// Bound on the minimal-polynomial residual, relative to the matrix scale.
    pub spectrum_tol: f64,
    /// Singular values below this fraction of the largest count as zero.
    pub rank_tol: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            spectrum_tol: 1e-6,
            rank_tol: 1e-6,
        }
    }
}

fn nullspace(m: &DMatrix<Complex64>, rank_tol: f64) -> Vec<DVector<Complex64>> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let threshold = rank_tol * sigma_max.max(1.0);
    let mut basis = Vec::new();
    for (i, sigma) in svd.singular_values.iter().enumerate() {
        if *sigma < threshold {
            basis.push(v_t.row(i).adjoint());
        }
    }
    basis
}

/// Spectral projections of `t` onto the eigenvalues `{1, λ₁, λ₂}`, computed
/// from eigenvector bases (nullspaces of `t − λI`) and the inverse of the
/// assembled basis matrix. Independent of the quotient formulas.
pub fn eigenprojection_oracle(
    t: &DMatrix<Complex64>,
    pair: &EigenPair,
    params: &OracleParams,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>, DMatrix<Complex64>), ProjectionError> {
    let n = t.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let (.., annihilation) = matrix_projection_triple(t, pair);
    let scale = max_abs(t).max(1.0);
    if annihilation > params.spectrum_tol * scale.powi(3) {
        return Err(ProjectionError::SpectrumMismatch(format!(
            "minimal-polynomial residual {annihilation:.3e}"
        )));
    }

    let eigenvalues = [Complex64::ONE, pair.lambda1(), pair.lambda2()];
    let mut bases: Vec<Vec<DVector<Complex64>>> = Vec::with_capacity(3);
    let mut total = 0;
    for lambda in eigenvalues {
        let basis = nullspace(&(t - &id * lambda), params.rank_tol);
        total += basis.len();
        bases.push(basis);
    }
    if total != n {
        return Err(ProjectionError::SpectrumMismatch(format!(
            "eigenspace dimensions sum to {total}, expected {n}"
        )));
    }

    let mut v = DMatrix::<Complex64>::zeros(n, n);
    let mut col = 0;
    let mut ranges = Vec::with_capacity(3);
    for basis in &bases {
        let start = col;
        for vector in basis {
            v.set_column(col, vector);
            col += 1;
        }
        ranges.push(start..col);
    }
    let v_inv = v
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| ProjectionError::SpectrumMismatch("eigenvector basis is singular".into()))?;

    let mut projections = Vec::with_capacity(3);
    for range in ranges {
        if range.is_empty() {
            projections.push(DMatrix::zeros(n, n));
            continue;
        }
        let cols = v.columns(range.start, range.len());
        let rows = v_inv.rows(range.start, range.len());
        projections.push(&cols * &rows);
    }
    let r = projections.pop().expect("three projections");
    let q = projections.pop().expect("three projections");
    let p = projections.pop().expect("three projections");
    Ok((p, q, r))
}

/// Result of the falsifier: the chosen base point and the residual of the
/// annihilating cubic on the associated Lagrange polynomial, which equals
/// `|λ₁λ₂| = 1` whenever the symbol has no order up to 3.
#[derive(Debug, Clone, Copy)]
pub struct FalsifierOutcome {
    pub base_point: Complex64,
    pub residual: f64,
}

const FALSIFIER_SEED: u64 = 0x4c61_6772;
const ORBIT_SEPARATION: f64 = 0.05;
const FALSIFIER_TRIALS: usize = 256;

/// Evaluates the annihilating cubic at `z₀` on a Lagrange polynomial that
/// is 1 at `z₀` and 0 on the next three orbit points. Only the `−b·L(z₀)`
/// term survives, so the residual is 1 for every admissible pair.
pub fn lagrange_falsifier(
    op: &WeightedCompositionOp1D,
    pair: &EigenPair,
) -> Result<FalsifierOutcome, ProjectionError> {
    if let Some(order) = op.tau().order_up_to(3, 1e-9) {
        return Err(ProjectionError::LowOrderSymbol { order });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(FALSIFIER_SEED);
    for _ in 0..FALSIFIER_TRIALS {
        let radius = 0.6 * rng.random::<f64>().sqrt();
        let z0 = Complex64::from_polar(radius, std::f64::consts::TAU * rng.random::<f64>());
        let mut orbit = [z0; 4];
        for i in 1..4 {
            orbit[i] = op.tau().eval_on_disc(orbit[i - 1]);
        }
        let separated = (0..4).all(|i| {
            (i + 1..4).all(|j| (orbit[i] - orbit[j]).norm() >= ORBIT_SEPARATION)
        });
        if !separated {
            continue;
        }
        let values = [
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ZERO,
        ];
        let witness = lagrange_polynomial(&orbit, &values)
            .expect("orbit points are separated by construction");
        let cubic = annihilation_expr(&OperatorExpr::atom(*op), pair);
        let eval = |z: Complex64| witness.evaluate(z);
        let value = cubic
            .apply(&eval, z0)
            .expect("cubic stays within the depth bound");
        return Ok(FalsifierOutcome {
            base_point: z0,
            residual: value.norm(),
        });
    }
    Err(ProjectionError::OrbitDegenerate)
}

/// Structural family of a classified isometry.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `T = P + λQ + λ²R`, `T³ = I`, `λ` a primitive cube root of unity.
    Order3,
    /// `T = P − Q ± iR`, `T⁴ = I`.
    Order4PmQiR { plus_i: bool },
    /// `T = P ± iQ − R`, `T⁴ = I`.
    Order4PiQmR { plus_i: bool },
    /// `T = P ± iQ ∓ iR`, `T⁴ = I`.
    Order4PiQmiR { lambda1_is_i: bool },
    Degenerate(String),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Order3 => write!(f, "Order3"),
            Family::Order4PmQiR { .. } => write!(f, "Order4_PmQ_iR"),
            Family::Order4PiQmR { .. } => write!(f, "Order4_P_iQ_mR"),
            Family::Order4PiQmiR { .. } => write!(f, "Order4_P_iQ_miR"),
            Family::Degenerate(reason) => write!(f, "Degenerate({reason})"),
        }
    }
}

/// Classification outcome with the eigenvalue assignment, the verified
/// power, and every residual that went into the decision.
#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub family: Family,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub verified_power: Option<u32>,
    pub residuals: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

impl Serialize for ClassificationReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ClassificationReport", 6)?;
        s.serialize_field("family", &self.family.to_string())?;
        s.serialize_field("lambda1", &[self.lambda1.re, self.lambda1.im])?;
        s.serialize_field("lambda2", &[self.lambda2.re, self.lambda2.im])?;
        s.serialize_field("verified_power", &self.verified_power)?;
        s.serialize_field("residuals", &self.residuals)?;
        s.serialize_field(
            "verdict",
            match self.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            },
        )?;
        s.end()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyParams {
    /// Tolerance for operator identities.
    pub tol: f64,
    /// Boundary points per variable.
    pub grid_points: usize,
    pub sample_count: usize,
    pub sample_degree: usize,
    pub seed: u64,
    /// Degree of the matrix cross-check in the disc classifier; `None`
    /// skips it. Off-center symbols need headroom: the agreement floor
    /// scales like the symbol's interior contraction rate to this power.
    pub matrix_degree: Option<usize>,
    /// Actions below this count as the zero operator; the margin to the
    /// tolerance separates true cancellation from noise.
    pub zero_threshold: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            grid_points: 32,
            sample_count: 5,
            sample_degree: 8,
            seed: 0x6774_6370,
            matrix_degree: Some(48),
            zero_threshold: 1e-6,
        }
    }
}

fn boundary_points(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / count as f64))
        .collect()
}

/// Smallest `n ≤ 4` with `T^n = I` on the samples, together with the
/// measured residuals per power.
fn minimal_power<A, S>(
    t: &OperatorExpr<A>,
    samples: &[S],
    points: &[A::Point],
    tol: f64,
    residuals: &mut BTreeMap<String, f64>,
) -> Option<u32>
where
    A: PointOperator + Clone,
    S: Evaluable<A::Point>,
{
    for n in 1..=4u32 {
        let expr = OperatorExpr::sum(
            OperatorExpr::power(t.clone(), n),
            OperatorExpr::scale(-Complex64::ONE, OperatorExpr::Identity),
        );
        let residual = max_action(&expr, samples, points);
        residuals.insert(format!("t{n}_minus_i"), residual);
        if residual < tol {
            return Some(n);
        }
    }
    None
}

/// Linear combination `c₀I + c₁T + c₂T²` over the atom.
fn quadratic<A: Clone>(atom: &A, c: [Complex64; 3]) -> OperatorExpr<A> {
    OperatorExpr::polynomial_in_atom(atom, &c)
}

/// The order-3 projections `(I + T + T²)/3`, `(I + λ²T + λT²)/3`,
/// `(I + λT + λ²T²)/3` with the fixed cube-root pair.
pub fn order3_projection_exprs<A: Clone>(atom: &A) -> ([OperatorExpr<A>; 3], EigenPair) {
    let pair = EigenPair::cube_roots();
    let l = pair.lambda1();
    let third = Complex64::new(1.0 / 3.0, 0.0);
    let p = quadratic(atom, [third, third, third]);
    let q = quadratic(atom, [third, third * l * l, third * l]);
    let r = quadratic(atom, [third, third * l, third * l * l]);
    ([p, q, r], pair)
}

/// Closed-form candidates for the three order-4 families, both signs.
pub fn order4_candidate_exprs<A: Clone>(atom: &A) -> Vec<(Family, [OperatorExpr<A>; 3], EigenPair)> {
    let one = Complex64::ONE;
    let i = Complex64::I;
    let quarter = Complex64::new(0.25, 0.0);
    let half = Complex64::new(0.5, 0.0);
    let mut candidates = Vec::with_capacity(6);
    for sign in [1.0f64, -1.0] {
        let si = i * sign;
        // P = ¼((1±i)T² + 2T + (1∓i)I), Q = ¼((1∓i)T² − 2T + (1±i)I)
        let sharp = quadratic(
            atom,
            [quarter * (one - si), quarter * 2.0, quarter * (one + si)],
        );
        let flat = quadratic(
            atom,
            [quarter * (one + si), -quarter * 2.0, quarter * (one - si)],
        );
        let mean = quadratic(atom, [half, Complex64::ZERO, -half]); // ½(I − T²)
        candidates.push((
            Family::Order4PmQiR { plus_i: sign > 0.0 },
            [sharp.clone(), flat.clone(), mean.clone()],
            EigenPair::new(-one, si).expect("valid pair"),
        ));
        candidates.push((
            Family::Order4PiQmR { plus_i: sign > 0.0 },
            [sharp, mean.clone(), flat],
            EigenPair::new(si, -one).expect("valid pair"),
        ));
        // P = ½(I + T²), Q = ¼((−1±i)T² ∓ 2iT + (1±i)I), R the mirror
        let even = quadratic(atom, [half, Complex64::ZERO, half]);
        let q = quadratic(
            atom,
            [quarter * (one + si), -quarter * 2.0 * si, quarter * (si - one)],
        );
        let r = quadratic(
            atom,
            [quarter * (one - si), quarter * 2.0 * si, quarter * (-si - one)],
        );
        candidates.push((
            Family::Order4PiQmiR {
                lambda1_is_i: sign > 0.0,
            },
            [even, q, r],
            EigenPair::new(si, -si).expect("valid pair"),
        ));
    }
    candidates
}

struct DegenerateOutcome {
    reason: String,
    verdict: Verdict,
}

/// Probes a degenerate input against the quotient formulas at the
/// conventional pair and names the vanishing projections, requiring two
/// orders of magnitude between vanishing and surviving actions.
fn degenerate_report<A, S>(
    atom: &A,
    n: u32,
    samples: &[S],
    points: &[A::Point],
    params: &ClassifyParams,
    residuals: &mut BTreeMap<String, f64>,
) -> DegenerateOutcome
where
    A: PointOperator + Clone,
    S: Evaluable<A::Point>,
{
    let pair = EigenPair::degenerate_probe();
    let t = OperatorExpr::atom(atom.clone());
    let [p, q, r] = quotient_projection_exprs(&t, &pair);
    let actions = [
        ("p", max_action(&p, samples, points)),
        ("q", max_action(&q, samples, points)),
        ("r", max_action(&r, samples, points)),
    ];
    let mut vanishing = Vec::new();
    let mut margins_ok = true;
    for (name, action) in actions {
        residuals.insert(format!("{name}_action"), action);
        if action < params.zero_threshold {
            vanishing.push(name.to_uppercase());
            if action > params.zero_threshold / 100.0 {
                margins_ok = false;
            }
        } else if action < params.zero_threshold * 100.0 {
            margins_ok = false;
        }
    }
    let reason = match n {
        1 => format!("T = I; vanishing projections: {}", vanishing.join(", ")),
        _ => format!(
            "T^{n} = I; vanishing projections at (λ1, λ2) = (-1, i): {}",
            vanishing.join(", ")
        ),
    };
    DegenerateOutcome {
        reason,
        verdict: Verdict::from_bool(margins_ok && !vanishing.is_empty()),
    }
}

/// Disc classifier. Detects the minimal power `n ≤ 4`, returns the order-3
/// triple when `n = 3`, names the vanishing projections when `n ∈ {1, 2}`,
/// and attaches the falsifier residual when no tri-circular structure can
/// exist. Pointwise boundary evaluation is authoritative; the materialized
/// matrix cross-checks the projections on low-degree monomials at interior
/// points, the regime where truncation is controlled. A truncated
/// composition-operator matrix is not spectrally clean as a whole, so the
/// eigenprojection oracle is reserved for matrices that actually satisfy
/// its spectrum precondition.
pub fn classify_1d(
    op: &WeightedCompositionOp1D,
    params: &ClassifyParams,
) -> Result<ClassificationReport, ProjectionError> {
    if op.p().is_two() {
        return Err(ProjectionError::PEqualsTwo);
    }
    let sample_set = samples::unit_square_polynomials(
        params.seed,
        params.sample_count,
        params.sample_degree,
        samples::SampleClass::Unrestricted,
    );
    let points = boundary_points(params.grid_points);
    let t = OperatorExpr::atom(*op);
    let mut residuals = BTreeMap::new();
    let n = minimal_power(&t, &sample_set, &points, params.tol, &mut residuals);

    match n {
        Some(3) => {
            let ([p, q, r], pair) = order3_projection_exprs(op);
            let mut triple_res =
                triple_residuals(&p, &q, &r, &pair, &t, &sample_set, &points);
            let verdict = Verdict::from_bool(triple_res.values().all(|v| *v < params.tol));
            residuals.append(&mut triple_res);
            if let Some(degree) = params.matrix_degree {
                residuals.insert(
                    "matrix_pointwise".into(),
                    matrix_pointwise_deviation(&[&p, &q, &r], degree),
                );
            }
            Ok(ClassificationReport {
                family: Family::Order3,
                lambda1: pair.lambda1(),
                lambda2: pair.lambda2(),
                verified_power: Some(3),
                residuals,
                verdict,
            })
        }
        Some(n @ (1 | 2)) => {
            let outcome =
                degenerate_report(op, n, &sample_set, &points, params, &mut residuals);
            let pair = EigenPair::degenerate_probe();
            Ok(ClassificationReport {
                family: Family::Degenerate(outcome.reason),
                lambda1: pair.lambda1(),
                lambda2: pair.lambda2(),
                verified_power: Some(n),
                residuals,
                verdict: outcome.verdict,
            })
        }
        Some(n) => {
            // order 4: no annihilating cubic survives on the disc
            let falsifier = lagrange_falsifier(op, &EigenPair::cube_roots())?;
            residuals.insert("falsifier".into(), falsifier.residual);
            let pair = EigenPair::cube_roots();
            Ok(ClassificationReport {
                family: Family::Degenerate(format!(
                    "T^{n} = I but no annihilating cubic exists; falsifier residual ~ 1"
                )),
                lambda1: pair.lambda1(),
                lambda2: pair.lambda2(),
                verified_power: Some(n),
                residuals,
                verdict: Verdict::from_bool((falsifier.residual - 1.0).abs() < 1e-6),
            })
        }
        None => {
            let falsifier = lagrange_falsifier(op, &EigenPair::cube_roots())?;
            residuals.insert("falsifier".into(), falsifier.residual);
            let pair = EigenPair::cube_roots();
            Ok(ClassificationReport {
                family: Family::Degenerate(
                    "no finite order up to 4; falsifier residual ~ 1 excludes a tri-circular \
                     structure"
                        .into(),
                ),
                lambda1: pair.lambda1(),
                lambda2: pair.lambda2(),
                verified_power: None,
                residuals,
                verdict: Verdict::from_bool((falsifier.residual - 1.0).abs() < 1e-6),
            })
        }
    }
}

/// Deviation between the materialized-matrix route and the pointwise route
/// for the given expressions, measured on monomials of degree up to
/// `degree/2` at interior points, where the truncation tail is negligible.
fn matrix_pointwise_deviation(
    exprs: &[&OperatorExpr<WeightedCompositionOp1D>],
    degree: usize,
) -> f64 {
    let interior: Vec<Complex64> = (0..16)
        .map(|k| Complex64::from_polar(0.25, std::f64::consts::TAU * k as f64 / 16.0))
        .collect();
    let mut worst: f64 = 0.0;
    for expr in exprs {
        let (matrix, _tail) = materialize_1d(expr, degree);
        for j in 0..=degree / 2 {
            let column = TruncatedSeries1D::new(matrix.column(j).iter().copied().collect());
            let monomial = TruncatedSeries1D::monomial(j);
            let eval = |z: Complex64| monomial.evaluate(z);
            for &z in &interior {
                let pointwise = expr
                    .apply(&eval, z)
                    .expect("projection expressions stay within the depth bound");
                worst = worst.max((column.evaluate(z) - pointwise).norm());
            }
        }
    }
    worst
}

/// Bidisc classifier. `n = 3` yields the order-3 family; `n = 4` tries the
/// closed-form candidates of each order-4 family and keeps the one whose
/// projections are nonzero idempotents reproducing `T`; degenerate inputs
/// are named as on the disc.
pub fn classify_2d(
    op: &WeightedCompositionOp2D,
    params: &ClassifyParams,
) -> Result<ClassificationReport, ProjectionError> {
    if op.p().is_two() {
        return Err(ProjectionError::PEqualsTwo);
    }
    let sample_set = samples::unit_square_polynomials_2d(
        params.seed,
        params.sample_count,
        (params.sample_degree.min(4), params.sample_degree.min(4)),
    );
    let per_axis = params.grid_points.min(16).max(4);
    let zs = boundary_points(per_axis);
    let ws = boundary_points(per_axis);
    let mut points = Vec::with_capacity(per_axis * per_axis);
    for &z in &zs {
        for &w in &ws {
            points.push((z, w));
        }
    }
    let t = OperatorExpr::atom(*op);
    let mut residuals = BTreeMap::new();
    let n = minimal_power(&t, &sample_set, &points, params.tol, &mut residuals);

    match n {
        Some(3) => {
            let ([p, q, r], pair) = order3_projection_exprs(op);
            let mut triple_res =
                triple_residuals(&p, &q, &r, &pair, &t, &sample_set, &points);
            let verdict = Verdict::from_bool(triple_res.values().all(|v| *v < params.tol));
            residuals.append(&mut triple_res);
            Ok(ClassificationReport {
                family: Family::Order3,
                lambda1: pair.lambda1(),
                lambda2: pair.lambda2(),
                verified_power: Some(3),
                residuals,
                verdict,
            })
        }
        Some(4) => {
            for (family, [p, q, r], pair) in order4_candidate_exprs(op) {
                let actions = [
                    max_action(&p, &sample_set, &points),
                    max_action(&q, &sample_set, &points),
                    max_action(&r, &sample_set, &points),
                ];
                if actions.iter().any(|a| *a <= params.zero_threshold) {
                    continue;
                }
                let triple_res =
                    triple_residuals(&p, &q, &r, &pair, &t, &sample_set, &points);
                if triple_res.values().all(|v| *v < params.tol) {
                    let mut residuals = residuals.clone();
                    for (k, v) in triple_res {
                        residuals.insert(k, v);
                    }
                    return Ok(ClassificationReport {
                        family,
                        lambda1: pair.lambda1(),
                        lambda2: pair.lambda2(),
                        verified_power: Some(4),
                        residuals,
                        verdict: Verdict::Pass,
                    });
                }
            }
            Err(ProjectionError::NoFamilyMatches)
        }
        Some(n @ (1 | 2)) => {
            let outcome =
                degenerate_report(op, n, &sample_set, &points, params, &mut residuals);
            let pair = EigenPair::degenerate_probe();
            Ok(ClassificationReport {
                family: Family::Degenerate(outcome.reason),
                lambda1: pair.lambda1(),
                lambda2: pair.lambda2(),
                verified_power: Some(n),
                residuals,
                verdict: outcome.verdict,
            })
        }
        Some(_) => unreachable!("power search is capped at 4"),
        None => {
            let pair = EigenPair::cube_roots();
            Ok(ClassificationReport {
                family: Family::Degenerate(
                    "no finite order up to 4; no tri-circular structure".into(),
                ),
                lambda1: pair.lambda1(),
                lambda2: pair.lambda2(),
                verified_power: None,
                residuals,
                verdict: Verdict::Pass,
            })
        }
    }
}
