//! Truncated power-series arithmetic over the complex numbers, in one and
//! two variables.
//!
//! A [`TruncatedSeries1D`] of degree `N` stores the coefficients `c_0..c_N`
//! of an analytic function on the disc and forgets everything above `z^N`.
//! Binary operations truncate to the larger input degree unless an explicit
//! output degree is given, so shapes stay predictable when series are packed
//! into matrices.

use num_complex::Complex64;
use thiserror::Error;

/// Constant terms smaller than this are treated as vanishing by `log`-type
/// operations.
pub const NONVANISHING_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    /// `log`/`pow` need a nonvanishing constant term to pick a branch.
    #[error("constant term modulus {modulus:.3e} is below tolerance {tol:.3e}")]
    VanishingConstantTerm { modulus: f64, tol: f64 },
    /// Interpolation nodes must be pairwise distinct.
    #[error("interpolation nodes {i} and {j} coincide within tolerance")]
    DuplicateNodes { i: usize, j: usize },
}

/// Coefficients `c_0..c_N` of a polynomial (or truncated analytic function)
/// in one complex variable.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries1D {
    coeffs: Vec<Complex64>,
}

impl TruncatedSeries1D {
    /// Builds a series from its coefficient list; an empty list is the zero
    /// series of degree 0.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero(0);
        }
        Self { coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![Complex64::ZERO; degree + 1],
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::ONE)
    }

    /// The monomial `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex64::ZERO; k + 1];
        coeffs[k] = Complex64::ONE;
        Self { coeffs }
    }

    /// The identity series `z`.
    pub fn identity() -> Self {
        Self::monomial(1)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero above the truncation degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn truncated(&self, degree: usize) -> Self {
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().take(degree + 1).copied().collect();
        coeffs.resize(degree + 1, Complex64::ZERO);
        Self { coeffs }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Sum, truncated to the larger input degree.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.degree().max(other.degree());
        let mut coeffs = vec![Complex64::ZERO; n + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeff(k) + other.coeff(k);
        }
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-Complex64::ONE))
    }

    /// Cauchy product truncated to the larger input degree.
    pub fn multiply(&self, other: &Self) -> Self {
        self.multiply_truncated(other, self.degree().max(other.degree()))
    }

    /// Cauchy product truncated to an explicit output degree.
    pub fn multiply_truncated(&self, other: &Self, out_degree: usize) -> Self {
        let mut coeffs = vec![Complex64::ZERO; out_degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > out_degree {
                break;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j > out_degree {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self { coeffs }
    }

    /// Coefficients of `self ∘ inner` through `out_degree`, by accumulating
    /// powers of `inner`. Always defined; accuracy degrades when
    /// `|inner(0)|` is not small.
    pub fn compose(&self, inner: &Self, out_degree: usize) -> Self {
        let mut acc = Self::zero(out_degree);
        acc.coeffs[0] = self.coeff(0);
        let mut power = Self::one().truncated(out_degree);
        for k in 1..=self.degree() {
            power = power.multiply_truncated(inner, out_degree);
            let ck = self.coeff(k);
            for (dst, src) in acc.coeffs.iter_mut().zip(power.coeffs.iter()) {
                *dst += ck * src;
            }
        }
        acc
    }

    /// Termwise derivative; the degree drops by one (constants map to the
    /// zero series of degree 0).
    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..=self.degree())
            .map(|k| self.coeff(k) * (k as f64))
            .collect();
        Self { coeffs }
    }

    /// `j`-th derivative at the origin, `f^(j)(0) = j! c_j`.
    pub fn derivative_at_origin(&self, j: usize) -> Complex64 {
        let factorial: f64 = (1..=j).map(|m| m as f64).product();
        self.coeff(j) * factorial
    }

    /// Formal logarithm with the principal branch at the constant term.
    pub fn log_series(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeff(0);
        if a0.norm() <= NONVANISHING_TOL {
            return Err(SeriesError::VanishingConstantTerm {
                modulus: a0.norm(),
                tol: NONVANISHING_TOL,
            });
        }
        let n = self.degree();
        let mut out = vec![Complex64::ZERO; n + 1];
        out[0] = a0.ln();
        for m in 0..n {
            // from h·(log h)' = h'
            let mut s = self.coeff(m + 1) * ((m + 1) as f64);
            for j in 1..=m {
                s -= self.coeff(j) * ((m - j + 1) as f64) * out[m - j + 1];
            }
            out[m + 1] = s / (a0 * ((m + 1) as f64));
        }
        Ok(Self { coeffs: out })
    }

    /// Formal exponential, inverse of [`log_series`](Self::log_series)
    /// within truncation tolerance.
    pub fn exp_series(&self) -> Self {
        let n = self.degree();
        let mut out = vec![Complex64::ZERO; n + 1];
        out[0] = self.coeff(0).exp();
        for m in 0..n {
            // from (exp h)' = h'·exp h
            let mut s = Complex64::ZERO;
            for j in 0..=m {
                s += self.coeff(j + 1) * ((j + 1) as f64) * out[m - j];
            }
            out[m + 1] = s / ((m + 1) as f64);
        }
        Self { coeffs: out }
    }

    /// `self^exponent = exp(exponent · log self)` on the principal branch at
    /// the constant term.
    pub fn fractional_power(&self, exponent: f64) -> Result<Self, SeriesError> {
        let log = self.log_series()?;
        Ok(log.scaled(Complex64::new(exponent, 0.0)).exp_series())
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Coefficients of `α·f(e^{iθ}z)`: each `c_k` picks up `α e^{ikθ}`.
    pub fn rotated(&self, theta: f64, alpha: Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| alpha * Complex64::from_polar(1.0, theta * k as f64) * c)
            .collect();
        Self { coeffs }
    }
}

/// The unique polynomial of degree `< nodes.len()` interpolating
/// `values[j]` at `nodes[j]`, built through Newton divided differences.
pub fn lagrange_polynomial(
    nodes: &[Complex64],
    values: &[Complex64],
) -> Result<TruncatedSeries1D, SeriesError> {
    assert_eq!(nodes.len(), values.len(), "one value per node");
    assert!(!nodes.is_empty(), "at least one node");
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if (nodes[i] - nodes[j]).norm() <= NONVANISHING_TOL {
                return Err(SeriesError::DuplicateNodes { i, j });
            }
        }
    }
    let n = nodes.len();
    let mut dd: Vec<Complex64> = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
        }
    }
    // Horner in the Newton basis, expanded to monomial coefficients.
    let mut poly = TruncatedSeries1D::constant(dd[n - 1]);
    for k in (0..n - 1).rev() {
        let factor = TruncatedSeries1D::new(vec![-nodes[k], Complex64::ONE]);
        poly = poly.multiply_truncated(&factor, poly.degree() + 1);
        poly.coeffs[0] += dd[k];
    }
    Ok(poly.truncated(n.max(1) - 1))
}

/// Coefficient matrix `c_{nm}`, `0 ≤ n ≤ N`, `0 ≤ m ≤ M`, of a polynomial
/// in two complex variables, row-major in the first variable.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries2D {
    coeffs: Vec<Vec<Complex64>>,
}

impl TruncatedSeries2D {
    /// Builds a bidegree-(N, M) series; all rows must share one length.
    pub fn new(coeffs: Vec<Vec<Complex64>>) -> Self {
        assert!(!coeffs.is_empty(), "at least one row");
        let width = coeffs[0].len();
        assert!(width > 0, "at least one column");
        assert!(
            coeffs.iter().all(|row| row.len() == width),
            "coefficient matrix must be rectangular"
        );
        Self { coeffs }
    }

    pub fn zero(bidegree: (usize, usize)) -> Self {
        Self {
            coeffs: vec![vec![Complex64::ZERO; bidegree.1 + 1]; bidegree.0 + 1],
        }
    }

    /// The monomial `z^n w^m`.
    pub fn monomial(n: usize, m: usize) -> Self {
        let mut s = Self::zero((n, m));
        s.coeffs[n][m] = Complex64::ONE;
        s
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.coeffs.len() - 1, self.coeffs[0].len() - 1)
    }

    pub fn coeff(&self, n: usize, m: usize) -> Complex64 {
        self.coeffs
            .get(n)
            .and_then(|row| row.get(m))
            .copied()
            .unwrap_or(Complex64::ZERO)
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    /// Nested Horner over both variables.
    pub fn evaluate(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for row in self.coeffs.iter().rev() {
            let mut inner = Complex64::ZERO;
            for c in row.iter().rev() {
                inner = inner * w + c;
            }
            acc = acc * z + inner;
        }
        acc
    }
}
