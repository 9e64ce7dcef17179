//! Weighted composition operators on the disc and bidisc, an operator
//! expression algebra over them, matrix materialization on the monomial
//! basis, and isometry verification.
//!
//! The surjective isometries of `H^p` are `f ↦ α·(τ')^{1/p}·f∘τ` for finite
//! `p` and `f ↦ α·f∘τ` at `p = ∞`. On the bidisc the symbol also twists the
//! second variable by a unimodular factor: `f(τ(z), w·σ(z))`. Atoms evaluate
//! boundary points to boundary points, so pointwise identities on the circle
//! carry no truncation error.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::hardy::{hp_norm_1d, hp_norm_2d, BoundaryGrid, PNorm};
use crate::moebius::DiscAutomorphism;
use crate::series::{TruncatedSeries1D, TruncatedSeries2D};

/// Default bound on the composition depth of an operator expression.
pub const MAX_COMPOSITION_DEPTH: u32 = 8;

/// Extra coefficients carried while materializing matrix columns, so the
/// discarded tail can be measured.
const TAIL_WINDOW: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("alpha must be unimodular, got modulus {0}")]
    NotUnimodular(f64),
    #[error("expression composition depth {depth} exceeds the bound {bound}")]
    DepthExceeded { depth: u32, bound: u32 },
    #[error("symbol does not have order {0} up to tolerance")]
    NotFiniteOrder(u32),
}

/// `σ(z) = c·z^k` with `|c| = 1`; unimodular on the circle by structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnimodularMonomial {
    c: Complex64,
    k: u32,
}

impl UnimodularMonomial {
    pub fn new(c: Complex64, k: u32) -> Result<Self, OperatorError> {
        if (c.norm() - 1.0).abs() > 1e-12 {
            return Err(OperatorError::NotUnimodular(c.norm()));
        }
        Ok(Self { c, k })
    }

    pub fn one() -> Self {
        Self {
            c: Complex64::ONE,
            k: 0,
        }
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.c * z.powu(self.k)
    }
}

/// `(Tf)(z) = α·(τ'(z))^{1/p}·f(τ(z))`, with weight 1 at `p = ∞`.
///
/// The weight uses the canonical branch
/// `e^{iθ/p}(1 − |a|²)^{1/p}(1 − āz)^{−2/p}` with the principal logarithm of
/// `1 − āz`; that factor has positive real part on the closed disc, so the
/// branch is global and stable under composition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedCompositionOp1D {
    alpha: Complex64,
    tau: DiscAutomorphism,
    p: PNorm,
}

impl WeightedCompositionOp1D {
    pub fn new(alpha: Complex64, tau: DiscAutomorphism, p: PNorm) -> Result<Self, OperatorError> {
        if (alpha.norm() - 1.0).abs() > 1e-12 {
            return Err(OperatorError::NotUnimodular(alpha.norm()));
        }
        Ok(Self { alpha, tau, p })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn tau(&self) -> &DiscAutomorphism {
        &self.tau
    }

    pub fn p(&self) -> PNorm {
        self.p
    }

    /// The weight `(τ'(z))^{1/p}` on the canonical branch.
    pub fn weight(&self, z: Complex64) -> Complex64 {
        weight_at(&self.tau, self.p, z)
    }

    /// Coefficients of the weight through `degree`.
    pub fn weight_series(&self, degree: usize) -> TruncatedSeries1D {
        match self.p {
            PNorm::Infinity => TruncatedSeries1D::one().truncated(degree),
            PNorm::Finite(p) => {
                let a = self.tau.a();
                let scalar = (Complex64::new(0.0, self.tau.theta())
                    + Complex64::new((1.0 - a.norm_sqr()).ln(), 0.0))
                .unscale(p)
                .exp();
                let linear = TruncatedSeries1D::new(vec![Complex64::ONE, -a.conj()])
                    .truncated(degree);
                linear
                    .fractional_power(-2.0 / p)
                    .expect("1 - āz has constant term 1")
                    .scaled(scalar)
            }
        }
    }
}

fn weight_at(tau: &DiscAutomorphism, p: PNorm, z: Complex64) -> Complex64 {
    match p {
        PNorm::Infinity => Complex64::ONE,
        PNorm::Finite(p) => {
            let a = tau.a();
            let denom = Complex64::ONE - a.conj() * z;
            let log = Complex64::new(0.0, tau.theta())
                + Complex64::new((1.0 - a.norm_sqr()).ln(), 0.0)
                - 2.0 * denom.ln();
            (log / p).exp()
        }
    }
}

/// `(Tf)(z, w) = α·(τ'(z))^{1/p}·f(τ(z), w·σ(z))`, weight 1 at `p = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedCompositionOp2D {
    alpha: Complex64,
    tau: DiscAutomorphism,
    sigma: UnimodularMonomial,
    p: PNorm,
}

impl WeightedCompositionOp2D {
    pub fn new(
        alpha: Complex64,
        tau: DiscAutomorphism,
        sigma: UnimodularMonomial,
        p: PNorm,
    ) -> Result<Self, OperatorError> {
        if (alpha.norm() - 1.0).abs() > 1e-12 {
            return Err(OperatorError::NotUnimodular(alpha.norm()));
        }
        Ok(Self {
            alpha,
            tau,
            sigma,
            p,
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn tau(&self) -> &DiscAutomorphism {
        &self.tau
    }

    pub fn sigma(&self) -> &UnimodularMonomial {
        &self.sigma
    }

    pub fn p(&self) -> PNorm {
        self.p
    }

    pub fn weight(&self, z: Complex64) -> Complex64 {
        weight_at(&self.tau, self.p, z)
    }
}

/// Anything that acts pointwise on evaluable functions.
pub trait PointOperator {
    type Point: Copy;
    fn apply_at(&self, f: &dyn Fn(Self::Point) -> Complex64, x: Self::Point) -> Complex64;
}

/// Function samples that operator expressions can act on.
pub trait Evaluable<P> {
    fn value_at(&self, x: P) -> Complex64;
}

impl Evaluable<Complex64> for TruncatedSeries1D {
    fn value_at(&self, z: Complex64) -> Complex64 {
        self.evaluate(z)
    }
}

impl Evaluable<(Complex64, Complex64)> for TruncatedSeries2D {
    fn value_at(&self, (z, w): (Complex64, Complex64)) -> Complex64 {
        self.evaluate(z, w)
    }
}

impl PointOperator for WeightedCompositionOp1D {
    type Point = Complex64;
    fn apply_at(&self, f: &dyn Fn(Complex64) -> Complex64, z: Complex64) -> Complex64 {
        self.alpha * self.weight(z) * f(self.tau.eval_on_disc(z))
    }
}

impl PointOperator for WeightedCompositionOp2D {
    type Point = (Complex64, Complex64);
    fn apply_at(
        &self,
        f: &dyn Fn((Complex64, Complex64)) -> Complex64,
        (z, w): (Complex64, Complex64),
    ) -> Complex64 {
        self.alpha * self.weight(z) * f((self.tau.eval_on_disc(z), w * self.sigma.evaluate(z)))
    }
}

/// Linear combinations, compositions, and powers of one operator atom.
/// `Power(e, 0)` is the identity.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorExpr<A> {
    Identity,
    Atom(A),
    Scale(Complex64, Box<OperatorExpr<A>>),
    Sum(Box<OperatorExpr<A>>, Box<OperatorExpr<A>>),
    Compose(Box<OperatorExpr<A>>, Box<OperatorExpr<A>>),
    Power(Box<OperatorExpr<A>>, u32),
}

impl<A> OperatorExpr<A> {
    pub fn atom(op: A) -> Self {
        OperatorExpr::Atom(op)
    }

    pub fn scale(c: Complex64, e: Self) -> Self {
        OperatorExpr::Scale(c, Box::new(e))
    }

    pub fn sum(a: Self, b: Self) -> Self {
        OperatorExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn compose(a: Self, b: Self) -> Self {
        OperatorExpr::Compose(Box::new(a), Box::new(b))
    }

    pub fn power(e: Self, n: u32) -> Self {
        OperatorExpr::Power(Box::new(e), n)
    }

    /// Linear combination `Σ c_i·T^i` with `c_0` on the identity.
    pub fn polynomial_in_atom(op: &A, coefficients: &[Complex64]) -> Self
    where
        A: Clone,
    {
        let mut acc: Option<Self> = None;
        for (i, c) in coefficients.iter().enumerate() {
            let term = match i {
                0 => OperatorExpr::Identity,
                1 => OperatorExpr::atom(op.clone()),
                n => OperatorExpr::power(OperatorExpr::atom(op.clone()), n as u32),
            };
            let term = OperatorExpr::scale(*c, term);
            acc = Some(match acc {
                None => term,
                Some(sum) => OperatorExpr::sum(sum, term),
            });
        }
        acc.expect("at least one coefficient")
    }

    /// Nesting depth counted in atom applications.
    pub fn composition_depth(&self) -> u32 {
        match self {
            OperatorExpr::Identity => 0,
            OperatorExpr::Atom(_) => 1,
            OperatorExpr::Scale(_, e) => e.composition_depth(),
            OperatorExpr::Sum(a, b) => a.composition_depth().max(b.composition_depth()),
            OperatorExpr::Compose(a, b) => a.composition_depth() + b.composition_depth(),
            OperatorExpr::Power(e, n) => e.composition_depth() * n,
        }
    }
}

impl<A: PointOperator> OperatorExpr<A> {
    /// Pointwise application `(expr f)(x)` with the default depth bound.
    pub fn apply(
        &self,
        f: &dyn Fn(A::Point) -> Complex64,
        x: A::Point,
    ) -> Result<Complex64, OperatorError> {
        self.apply_bounded(f, x, MAX_COMPOSITION_DEPTH)
    }

    pub fn apply_bounded(
        &self,
        f: &dyn Fn(A::Point) -> Complex64,
        x: A::Point,
        bound: u32,
    ) -> Result<Complex64, OperatorError> {
        let depth = self.composition_depth();
        if depth > bound {
            return Err(OperatorError::DepthExceeded { depth, bound });
        }
        Ok(self.apply_rec(f, x))
    }

    fn apply_rec(&self, f: &dyn Fn(A::Point) -> Complex64, x: A::Point) -> Complex64 {
        match self {
            OperatorExpr::Identity => f(x),
            OperatorExpr::Atom(op) => op.apply_at(f, x),
            OperatorExpr::Scale(c, e) => c * e.apply_rec(f, x),
            OperatorExpr::Sum(a, b) => a.apply_rec(f, x) + b.apply_rec(f, x),
            OperatorExpr::Compose(a, b) => {
                let g = |y: A::Point| b.apply_rec(f, y);
                a.apply_rec(&g, x)
            }
            OperatorExpr::Power(e, n) => Self::apply_power(e, *n, f, x),
        }
    }

    fn apply_power(
        e: &OperatorExpr<A>,
        n: u32,
        f: &dyn Fn(A::Point) -> Complex64,
        x: A::Point,
    ) -> Complex64 {
        if n == 0 {
            return f(x);
        }
        let g = |y: A::Point| Self::apply_power(e, n - 1, f, y);
        e.apply_rec(&g, x)
    }
}

/// Serialization of the expression shape as nested arrays:
/// `["sum", a, b]`, `["compose", a, b]`, `["pow", e, n]`,
/// `["scale", [re, im], e]`, `["atom"]`, `["id"]`.
impl<A> OperatorExpr<A> {
    pub fn shape_to_value(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        match self {
            OperatorExpr::Identity => json!(["id"]),
            OperatorExpr::Atom(_) => json!(["atom"]),
            OperatorExpr::Scale(c, e) => {
                Value::Array(vec![json!("scale"), json!([c.re, c.im]), e.shape_to_value()])
            }
            OperatorExpr::Sum(a, b) => {
                Value::Array(vec![json!("sum"), a.shape_to_value(), b.shape_to_value()])
            }
            OperatorExpr::Compose(a, b) => {
                Value::Array(vec![json!("compose"), a.shape_to_value(), b.shape_to_value()])
            }
            OperatorExpr::Power(e, n) => {
                Value::Array(vec![json!("pow"), e.shape_to_value(), json!(n)])
            }
        }
    }

    /// Rebuilds an expression from its shape, instancing every `["atom"]`
    /// with a clone of `atom`.
    pub fn shape_from_value(value: &serde_json::Value, atom: &A) -> Result<Self, String>
    where
        A: Clone,
    {
        let arr = value.as_array().ok_or("expression node must be an array")?;
        let tag = arr
            .first()
            .and_then(|t| t.as_str())
            .ok_or("expression node must start with a tag string")?;
        let expect_len = |n: usize| {
            if arr.len() != n {
                Err(format!("node {tag:?} expects {n} entries, got {}", arr.len()))
            } else {
                Ok(())
            }
        };
        match tag {
            "id" => {
                expect_len(1)?;
                Ok(OperatorExpr::Identity)
            }
            "atom" => {
                expect_len(1)?;
                Ok(OperatorExpr::Atom(atom.clone()))
            }
            "scale" => {
                expect_len(3)?;
                let pair = arr[1]
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or("scale factor must be [re, im]")?;
                let c = Complex64::new(
                    pair[0].as_f64().ok_or("re must be a number")?,
                    pair[1].as_f64().ok_or("im must be a number")?,
                );
                Ok(OperatorExpr::scale(c, Self::shape_from_value(&arr[2], atom)?))
            }
            "sum" => {
                expect_len(3)?;
                Ok(OperatorExpr::sum(
                    Self::shape_from_value(&arr[1], atom)?,
                    Self::shape_from_value(&arr[2], atom)?,
                ))
            }
            "compose" => {
                expect_len(3)?;
                Ok(OperatorExpr::compose(
                    Self::shape_from_value(&arr[1], atom)?,
                    Self::shape_from_value(&arr[2], atom)?,
                ))
            }
            "pow" => {
                expect_len(3)?;
                let n = arr[2].as_u64().ok_or("power must be a nonnegative integer")?;
                Ok(OperatorExpr::power(
                    Self::shape_from_value(&arr[1], atom)?,
                    n as u32,
                ))
            }
            other => Err(format!("unknown expression tag {other:?}")),
        }
    }
}

/// Product `α^n·τ₀(z)·τ₁(z)·…·(τ'∘τ^{n−1}(z))^{1/p}`, each factor on the
/// canonical branch. This is the weight attached to the `n`-th iterate.
pub fn iterated_weight(op: &WeightedCompositionOp1D, n: u32, z: Complex64) -> Complex64 {
    let mut acc = Complex64::ONE;
    let mut point = z;
    for _ in 0..n {
        acc *= op.alpha() * op.weight(point);
        point = op.tau().eval_on_disc(point);
    }
    acc
}

/// The unimodular constant picked up by the weight along one closed orbit
/// of a finite-order symbol; constant in `z` because a continuous logarithm
/// of `(τ^{∘n})' ≡ 1` is constant on the connected disc.
pub fn branch_constant(tau: &DiscAutomorphism, n: u32, p: PNorm) -> Complex64 {
    let mut acc = Complex64::ONE;
    let mut point = Complex64::ZERO;
    for _ in 0..n {
        acc *= weight_at(tau, p, point);
        point = tau.eval_on_disc(point);
    }
    acc
}

/// The principal `n`-th root of the inverse branch constant. With this
/// `α`, the operator built on a symbol of order `n` satisfies `T^n = I`.
pub fn calibrate_alpha(
    tau: &DiscAutomorphism,
    n: u32,
    p: PNorm,
) -> Result<Complex64, OperatorError> {
    if tau.order_up_to(n, 1e-9) != Some(n) {
        return Err(OperatorError::NotFiniteOrder(n));
    }
    let omega = branch_constant(tau, n, p);
    let alpha = (-omega.ln() / n as f64).exp();
    Ok(alpha / alpha.norm())
}

/// Matrix of an expression on the monomial basis `1, z, …, z^degree`,
/// along with the largest coefficient magnitude discarded by truncation
/// while materializing atom columns.
pub fn materialize_1d(
    expr: &OperatorExpr<WeightedCompositionOp1D>,
    degree: usize,
) -> (DMatrix<Complex64>, f64) {
    match expr {
        OperatorExpr::Identity => (DMatrix::identity(degree + 1, degree + 1), 0.0),
        OperatorExpr::Atom(op) => atom_matrix_1d(op, degree, 0),
        OperatorExpr::Scale(c, e) => {
            let (m, tail) = materialize_1d(e, degree);
            (m * *c, tail)
        }
        OperatorExpr::Sum(a, b) => {
            let (ma, ta) = materialize_1d(a, degree);
            let (mb, tb) = materialize_1d(b, degree);
            (ma + mb, ta.max(tb))
        }
        OperatorExpr::Compose(a, b) => {
            let (ma, ta) = materialize_1d(a, degree);
            let (mb, tb) = materialize_1d(b, degree);
            (ma * mb, ta.max(tb))
        }
        OperatorExpr::Power(e, n) => {
            let (m, tail) = materialize_1d(e, degree);
            let mut acc = DMatrix::identity(degree + 1, degree + 1);
            for _ in 0..*n {
                acc = &acc * &m;
            }
            (acc, tail)
        }
    }
}

/// Column `j` holds the coefficients of `T(z^j·z^{shift·j…})`; see
/// `materialize_2d` for the role of `monomial_shift`.
fn atom_matrix_1d(
    op: &WeightedCompositionOp1D,
    degree: usize,
    monomial_shift: usize,
) -> (DMatrix<Complex64>, f64) {
    let working = degree + TAIL_WINDOW;
    let tau_series = op.tau().to_series(working);
    let mut column = op
        .weight_series(working)
        .scaled(op.alpha());
    if monomial_shift > 0 {
        column = column.multiply_truncated(&TruncatedSeries1D::monomial(monomial_shift), working);
    }
    let mut matrix = DMatrix::zeros(degree + 1, degree + 1);
    let mut tail: f64 = 0.0;
    for j in 0..=degree {
        if j > 0 {
            column = column.multiply_truncated(&tau_series, working);
        }
        for i in 0..=degree {
            matrix[(i, j)] = column.coeff(i);
        }
        for k in degree + 1..=working {
            tail = tail.max(column.coeff(k).norm());
        }
    }
    (matrix, tail)
}

/// Block-diagonal matrix of a bidisc expression: the second variable's
/// degree is preserved by every atom, so the matrix splits into one block
/// per `w`-degree `0..=degree_w`, each acting on `z`-coefficients.
pub fn materialize_2d(
    expr: &OperatorExpr<WeightedCompositionOp2D>,
    degree_z: usize,
    degree_w: usize,
) -> (Vec<DMatrix<Complex64>>, f64) {
    match expr {
        OperatorExpr::Identity => (
            vec![DMatrix::identity(degree_z + 1, degree_z + 1); degree_w + 1],
            0.0,
        ),
        OperatorExpr::Atom(op) => {
            let mut blocks = Vec::with_capacity(degree_w + 1);
            let mut tail: f64 = 0.0;
            for l in 0..=degree_w {
                // T(z^j w^l) = α c^l · weight(z) τ(z)^j z^{kl} · w^l
                let equivalent = WeightedCompositionOp1D::new(Complex64::ONE, *op.tau(), op.p())
                    .expect("unit alpha");
                let (mut block, t) =
                    atom_matrix_1d(&equivalent, degree_z, (op.sigma().k() as usize) * l);
                block *= op.alpha() * op.sigma().c().powu(l as u32);
                blocks.push(block);
                tail = tail.max(t);
            }
            (blocks, tail)
        }
        OperatorExpr::Scale(c, e) => {
            let (blocks, tail) = materialize_2d(e, degree_z, degree_w);
            (blocks.into_iter().map(|b| b * *c).collect(), tail)
        }
        OperatorExpr::Sum(a, b) => {
            let (ba, ta) = materialize_2d(a, degree_z, degree_w);
            let (bb, tb) = materialize_2d(b, degree_z, degree_w);
            (
                ba.into_iter().zip(bb).map(|(x, y)| x + y).collect(),
                ta.max(tb),
            )
        }
        OperatorExpr::Compose(a, b) => {
            let (ba, ta) = materialize_2d(a, degree_z, degree_w);
            let (bb, tb) = materialize_2d(b, degree_z, degree_w);
            (
                ba.into_iter().zip(bb).map(|(x, y)| x * y).collect(),
                ta.max(tb),
            )
        }
        OperatorExpr::Power(e, n) => {
            let (blocks, tail) = materialize_2d(e, degree_z, degree_w);
            let identity = DMatrix::identity(degree_z + 1, degree_z + 1);
            let powered = blocks
                .into_iter()
                .map(|b| {
                    let mut acc = identity.clone();
                    for _ in 0..*n {
                        acc = &acc * &b;
                    }
                    acc
                })
                .collect();
            (powered, tail)
        }
    }
}

/// Norm-preservation report for one operator over a sample set.
#[derive(Debug, Clone)]
pub struct IsometryReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub pass: bool,
}

fn isometry_report(residuals: Vec<f64>, tol: f64) -> IsometryReport {
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    IsometryReport {
        residuals,
        max_residual,
        pass: max_residual < tol,
    }
}

/// Max over samples of `|‖Tf‖_p − ‖f‖_p|` on the grid.
pub fn verify_isometry_1d(
    op: &WeightedCompositionOp1D,
    samples: &[TruncatedSeries1D],
    grid: &BoundaryGrid,
    tol: f64,
) -> IsometryReport {
    let residuals = samples
        .iter()
        .map(|f| {
            let eval = |z: Complex64| f.evaluate(z);
            let image = |z: Complex64| op.apply_at(&eval, z);
            (hp_norm_1d(image, op.p(), grid) - hp_norm_1d(&eval, op.p(), grid)).abs()
        })
        .collect();
    isometry_report(residuals, tol)
}

/// Bidisc variant of [`verify_isometry_1d`], one grid per variable.
pub fn verify_isometry_2d(
    op: &WeightedCompositionOp2D,
    samples: &[TruncatedSeries2D],
    grid_z: &BoundaryGrid,
    grid_w: &BoundaryGrid,
    tol: f64,
) -> IsometryReport {
    let residuals = samples
        .iter()
        .map(|f| {
            let eval = |(z, w): (Complex64, Complex64)| f.evaluate(z, w);
            let image = |(z, w): (Complex64, Complex64)| op.apply_at(&eval, (z, w));
            let n_image = hp_norm_2d(|z, w| image((z, w)), op.p(), grid_z, grid_w);
            let n_sample = hp_norm_2d(|z, w| eval((z, w)), op.p(), grid_z, grid_w);
            (n_image - n_sample).abs()
        })
        .collect();
    isometry_report(residuals, tol)
}
