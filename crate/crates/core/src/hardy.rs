//! Boundary quadrature for Hardy-space norms, inner-function and
//! subalgebra membership tests, finite Blaschke products, and the
//! rotation-form automorphism checks.
//!
//! Norms are computed on equispaced boundary grids. The equal-weight rule
//! is spectrally accurate for trigonometric-polynomial integrands and the
//! grid density is the accuracy knob for everything else.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::moebius::DiscAutomorphism;
use crate::report::CheckReport;
use crate::series::TruncatedSeries1D;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("norm exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
    #[error("boundary grid needs at least 8 points, got {0}")]
    GridTooSmall(usize),
    #[error("Blaschke zero {index} has modulus {modulus}, too close to the circle")]
    ZeroTooCloseToCircle { index: usize, modulus: f64 },
    #[error("factor must be unimodular, got modulus {0}")]
    NotUnimodular(f64),
}

/// The exponent of an `H^p` norm: a finite `p ≥ 1` or the sup norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    pub fn finite(p: f64) -> Result<Self, HardyError> {
        if !(p >= 1.0) {
            return Err(HardyError::InvalidExponent(p));
        }
        Ok(PNorm::Finite(p))
    }

    /// Whether the exponent is 2 up to the classification margin. The norm
    /// machinery accepts p = 2; only the projection classifiers reject it.
    pub fn is_two(&self) -> bool {
        matches!(self, PNorm::Finite(p) if (p - 2.0).abs() <= 1e-9)
    }
}

/// The `M`-th roots of unity, `M ≥ 8`.
#[derive(Debug, Clone)]
pub struct BoundaryGrid {
    points: Vec<Complex64>,
}

impl BoundaryGrid {
    pub fn new(size: usize) -> Result<Self, HardyError> {
        if size < 8 {
            return Err(HardyError::GridTooSmall(size));
        }
        let points = (0..size)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / size as f64))
            .collect();
        Ok(Self { points })
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }
}

/// Equal-weight approximation of `((1/2π)∫|f|^p dt)^{1/p}` on the grid;
/// the grid maximum of `|f|` for the sup norm.
pub fn hp_norm_1d(f: impl Fn(Complex64) -> Complex64, p: PNorm, grid: &BoundaryGrid) -> f64 {
    match p {
        PNorm::Infinity => grid
            .points()
            .iter()
            .map(|&z| f(z).norm())
            .fold(0.0, f64::max),
        PNorm::Finite(p) => {
            let sum: f64 = grid.points().iter().map(|&z| f(z).norm().powf(p)).sum();
            (sum / grid.size() as f64).powf(1.0 / p)
        }
    }
}

/// Double-grid quadrature of the torus boundary integral.
pub fn hp_norm_2d(
    f: impl Fn(Complex64, Complex64) -> Complex64,
    p: PNorm,
    grid_z: &BoundaryGrid,
    grid_w: &BoundaryGrid,
) -> f64 {
    match p {
        PNorm::Infinity => {
            let mut max: f64 = 0.0;
            for &z in grid_z.points() {
                for &w in grid_w.points() {
                    max = max.max(f(z, w).norm());
                }
            }
            max
        }
        PNorm::Finite(p) => {
            let mut sum = 0.0;
            for &z in grid_z.points() {
                for &w in grid_w.points() {
                    sum += f(z, w).norm().powf(p);
                }
            }
            (sum / (grid_z.size() * grid_w.size()) as f64).powf(1.0 / p)
        }
    }
}

/// A finite Blaschke product: a unimodular constant times factors
/// `(z − a_i)/(1 − ā_i z)` with zeros strictly inside the disc.
#[derive(Debug, Clone)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    unimodular_factor: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>, unimodular_factor: Complex64) -> Result<Self, HardyError> {
        for (index, zero) in zeros.iter().enumerate() {
            if zero.norm() >= 1.0 - 1e-9 {
                return Err(HardyError::ZeroTooCloseToCircle {
                    index,
                    modulus: zero.norm(),
                });
            }
        }
        if (unimodular_factor.norm() - 1.0).abs() > 1e-12 {
            return Err(HardyError::NotUnimodular(unimodular_factor.norm()));
        }
        Ok(Self {
            zeros,
            unimodular_factor,
        })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = self.unimodular_factor;
        for a in &self.zeros {
            acc *= (z - a) / (Complex64::ONE - a.conj() * z);
        }
        acc
    }
}

/// Result of an inner-function test; the deviation is reported whether or
/// not the verdict is positive.
#[derive(Debug, Clone, Copy)]
pub struct InnerReport {
    pub is_inner: bool,
    pub max_deviation: f64,
}

/// True iff `||f| − 1|` stays below `tol` on the grid.
pub fn is_inner(
    f: impl Fn(Complex64) -> Complex64,
    grid: &BoundaryGrid,
    tol: f64,
) -> InnerReport {
    let max_deviation = grid
        .points()
        .iter()
        .map(|&z| (f(z).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    InnerReport {
        is_inner: max_deviation < tol,
        max_deviation,
    }
}

/// The closed subalgebras of bounded analytic functions cut out by
/// vanishing conditions at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subalgebra {
    /// `f(0) = 0`.
    H0,
    /// `f'(0) = 0` (the Neil algebra).
    Neil,
    /// `f^{(j)}(0) = 0` for `j = 0, 1, …, n`.
    H0n(usize),
}

impl Subalgebra {
    /// Indices of the derivatives that must vanish at the origin.
    fn constrained_orders(&self) -> Vec<usize> {
        match self {
            Subalgebra::H0 => vec![0],
            Subalgebra::Neil => vec![1],
            Subalgebra::H0n(n) => (0..=*n).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MembershipReport {
    pub belongs: bool,
    /// The largest constrained derivative value `f^{(j)}(0)`.
    pub witness: Complex64,
}

/// Membership is decided from series coefficients, `f^{(j)}(0) = j!·c_j`,
/// comparing `|f^{(j)}(0)| < tol·j!` for each constrained order.
pub fn membership(f: &TruncatedSeries1D, class: Subalgebra, tol: f64) -> MembershipReport {
    let mut belongs = true;
    let mut witness = Complex64::ZERO;
    let mut worst = -1.0;
    for j in class.constrained_orders() {
        let offense = f.coeff(j).norm();
        if offense >= tol {
            belongs = false;
        }
        if offense > worst {
            worst = offense;
            witness = f.derivative_at_origin(j);
        }
    }
    MembershipReport { belongs, witness }
}

/// Verifies that `Tf = f(e^{iθ}·)` is multiplicative, norm preserving, and
/// maps the given subalgebra into itself on every sample.
///
/// Norm preservation is checked by two routes: the boundary modulus of the
/// coefficient-rotated series against direct substitution into `f`. For a
/// rotation these agree exactly, so the residual isolates implementation
/// error rather than grid-sampling error.
pub fn rotation_automorphism_check(
    theta: f64,
    samples: &[TruncatedSeries1D],
    class: Subalgebra,
    grid: &BoundaryGrid,
    tol: f64,
) -> CheckReport {
    let rotation = Complex64::from_polar(1.0, theta);
    let images: Vec<TruncatedSeries1D> = samples
        .iter()
        .map(|f| f.rotated(theta, Complex64::ONE))
        .collect();

    let mut multiplicative: f64 = 0.0;
    for i in 0..samples.len() {
        for j in i..samples.len() {
            // full-degree product so truncation does not pollute the residual
            let product =
                samples[i].multiply_truncated(&samples[j], samples[i].degree() + samples[j].degree());
            let t_product = product.rotated(theta, Complex64::ONE);
            for &z in grid.points() {
                let lhs = t_product.evaluate(z);
                let rhs = images[i].evaluate(z) * images[j].evaluate(z);
                multiplicative = multiplicative.max((lhs - rhs).norm());
            }
        }
    }

    let mut norm_preservation: f64 = 0.0;
    let mut class_preservation: f64 = 0.0;
    for (f, tf) in samples.iter().zip(images.iter()) {
        for &z in grid.points() {
            let transported = f.evaluate(rotation * z).norm();
            norm_preservation = norm_preservation.max((tf.evaluate(z).norm() - transported).abs());
        }
        // same normalized quantity membership compares against tol
        let image_offense = class
            .constrained_orders()
            .iter()
            .map(|&j| tf.coeff(j).norm())
            .fold(0.0, f64::max);
        class_preservation = class_preservation.max(image_offense);
    }

    let mut residuals = BTreeMap::new();
    residuals.insert("multiplicative".into(), multiplicative);
    residuals.insert("norm_preservation".into(), norm_preservation);
    residuals.insert("class_preservation".into(), class_preservation);
    CheckReport::from_residuals("rotation_automorphism", residuals, tol, grid.size())
}

/// Witness and violation magnitude showing that `f ↦ f∘τ` leaves the
/// subalgebra whenever `τ(0) ≠ 0`.
#[derive(Debug, Clone)]
pub struct FalsificationReport {
    pub witness: TruncatedSeries1D,
    /// The violated vanishing condition, evaluated on the witness.
    pub violation: f64,
    /// The same quantity from the closed-form Möbius data.
    pub predicted: f64,
}

/// For `H0` the witness is `z` and the violation is `|(f∘τ)(0)| = |τ(0)|`;
/// for the Neil algebra the witness is `z²/2` and the violation is
/// `|(f∘τ)'(0)| = |τ(0)·τ'(0)|`. Rotations (`τ(0) = 0`) violate nothing.
pub fn falsify_composition_automorphism(
    tau: &DiscAutomorphism,
    class: Subalgebra,
) -> FalsificationReport {
    let tau0 = tau.eval_on_disc(Complex64::ZERO);
    match class {
        Subalgebra::H0 => {
            let witness = TruncatedSeries1D::identity();
            FalsificationReport {
                violation: witness.evaluate(tau0).norm(),
                predicted: tau0.norm(),
                witness,
            }
        }
        Subalgebra::Neil => {
            let witness = TruncatedSeries1D::monomial(2).scaled(Complex64::new(0.5, 0.0));
            // (f∘τ)'(0) = f'(τ(0))·τ'(0)
            let violation = (witness.derivative().evaluate(tau0)
                * tau.derivative_on_disc(Complex64::ZERO))
            .norm();
            FalsificationReport {
                violation,
                predicted: tau0.norm() * tau.derivative_on_disc(Complex64::ZERO).norm(),
                witness,
            }
        }
        Subalgebra::H0n(n) => {
            let scale = Complex64::new(1.0 / (n as f64 + 1.0), 0.0);
            let witness = TruncatedSeries1D::monomial(n + 1).scaled(scale);
            FalsificationReport {
                violation: witness.evaluate(tau0).norm(),
                predicted: tau0.norm().powi(n as i32 + 1) / (n as f64 + 1.0),
                witness,
            }
        }
    }
}

/// Verifies the isometry form `f ↦ α·f(e^{iθ}·)` on the Neil algebra:
/// norm preservation (series route against substitution route) and that
/// Neil samples stay in the Neil class.
pub fn isometry_form_check_neil(
    alpha: Complex64,
    theta: f64,
    samples: &[TruncatedSeries1D],
    grid: &BoundaryGrid,
    tol: f64,
) -> CheckReport {
    assert!(
        (alpha.norm() - 1.0).abs() <= 1e-12,
        "alpha must be unimodular"
    );
    let rotation = Complex64::from_polar(1.0, theta);
    let mut norm_preservation: f64 = 0.0;
    let mut class_preservation: f64 = 0.0;
    for f in samples {
        let image = f.rotated(theta, alpha);
        for &z in grid.points() {
            let transported = f.evaluate(rotation * z).norm();
            norm_preservation = norm_preservation.max((image.evaluate(z).norm() - transported).abs());
        }
        class_preservation = class_preservation.max(image.coeff(1).norm());
    }
    let mut residuals = BTreeMap::new();
    residuals.insert("norm_preservation".into(), norm_preservation);
    residuals.insert("class_preservation".into(), class_preservation);
    CheckReport::from_residuals("neil_isometry_form", residuals, tol, grid.size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::c64;

    fn grid(m: usize) -> BoundaryGrid {
        BoundaryGrid::new(m).unwrap()
    }

    #[test]
    fn rejects_small_grid_and_bad_p() {
        assert!(matches!(BoundaryGrid::new(4), Err(HardyError::GridTooSmall(4))));
        assert!(PNorm::finite(0.5).is_err());
        assert!(PNorm::finite(f64::NAN).is_err());
    }

    #[test]
    fn norm_of_constants_and_monomials_is_one() {
        let g = grid(64);
        for p in [PNorm::Finite(1.0), PNorm::Finite(3.0), PNorm::Infinity] {
            assert!((hp_norm_1d(|_| Complex64::ONE, p, &g) - 1.0).abs() < 1e-13);
            assert!((hp_norm_1d(|z| z.powu(5), p, &g) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn norm_anchor_one_plus_z() {
        // mean of |1+e^{it}|^4 = (2+2cos t)^2 over the circle is 6
        let g = grid(512);
        let n = hp_norm_1d(|z| Complex64::ONE + z, PNorm::Finite(4.0), &g);
        assert!((n - 6.0f64.powf(0.25)).abs() < 1e-10, "got {n}");
    }

    #[test]
    fn norm_2d_examples() {
        let g = grid(256);
        assert!((hp_norm_2d(|_, _| Complex64::ONE, PNorm::Finite(3.0), &g, &g) - 1.0).abs() < 1e-13);
        assert!(
            (hp_norm_2d(|z, w| z.powu(2) * w.powu(3), PNorm::Finite(1.0), &g, &g) - 1.0).abs()
                < 1e-13
        );
        let n = hp_norm_2d(
            |z, w| (Complex64::ONE + z) * (Complex64::ONE + w),
            PNorm::Finite(4.0),
            &g,
            &g,
        );
        assert!((n - 6.0f64.sqrt()).abs() < 1e-9, "got {n}");
    }

    #[test]
    fn blaschke_factor_is_inner() {
        let b = BlaschkeProduct::new(vec![c64(0.5, 0.0)], Complex64::ONE).unwrap();
        let report = is_inner(|z| b.evaluate(z), &grid(256), 1e-10);
        assert!(report.is_inner);
        assert!(report.max_deviation < 1e-12);
    }

    #[test]
    fn half_z_is_not_inner() {
        let report = is_inner(|z| z * 0.5, &grid(64), 1e-10);
        assert!(!report.is_inner);
        assert!((report.max_deviation - 0.5).abs() < 1e-14);
    }

    #[test]
    fn composed_blaschke_stays_inner() {
        let b = BlaschkeProduct::new(
            vec![
                c64(0.5, 0.0),
                c64(-0.3, 0.4),
                c64(0.1, -0.6),
                c64(0.0, 0.7),
                c64(-0.45, -0.2),
            ],
            Complex64::I,
        )
        .unwrap();
        let tau = DiscAutomorphism::new(1.3, c64(0.4, -0.25)).unwrap();
        let report = is_inner(|z| b.evaluate(tau.eval_on_disc(z)), &grid(512), 1e-10);
        assert!(report.is_inner, "deviation {}", report.max_deviation);
    }

    #[test]
    fn blaschke_rejects_boundary_zero() {
        assert!(BlaschkeProduct::new(vec![c64(1.0, 0.0)], Complex64::ONE).is_err());
        assert!(BlaschkeProduct::new(vec![], c64(0.5, 0.0)).is_err());
    }

    #[test]
    fn membership_examples() {
        let z2 = TruncatedSeries1D::monomial(2);
        assert!(membership(&z2, Subalgebra::H0, 1e-12).belongs);
        assert!(membership(&z2, Subalgebra::Neil, 1e-12).belongs);

        let z = TruncatedSeries1D::identity();
        assert!(membership(&z, Subalgebra::H0, 1e-12).belongs);
        let neil = membership(&z, Subalgebra::Neil, 1e-12);
        assert!(!neil.belongs);
        assert!((neil.witness - Complex64::ONE).norm() < 1e-15);

        let z3 = TruncatedSeries1D::monomial(3);
        assert!(membership(&z3, Subalgebra::H0n(2), 1e-12).belongs);
        assert!(!membership(&z3, Subalgebra::H0n(3), 1e-12).belongs);
    }

    #[test]
    fn rotation_check_identity_angle() {
        let samples = vec![TruncatedSeries1D::monomial(2), TruncatedSeries1D::monomial(3)];
        let report =
            rotation_automorphism_check(0.0, &samples, Subalgebra::H0, &grid(64), 1e-12);
        assert!(report.verdict.passed());
        assert!(report.max_residual() < 1e-15);
    }

    #[test]
    fn rotation_check_third_turn_on_neil_samples() {
        let z2 = TruncatedSeries1D::monomial(2);
        let f = TruncatedSeries1D::monomial(3).add(&TruncatedSeries1D::monomial(5));
        let report = rotation_automorphism_check(
            TAU / 3.0,
            &[z2, f],
            Subalgebra::Neil,
            &grid(64),
            1e-12,
        );
        assert!(report.verdict.passed(), "residuals {:?}", report.residuals);
    }

    #[test]
    fn multiplicativity_residual_small() {
        let report = rotation_automorphism_check(
            1.7,
            &[TruncatedSeries1D::monomial(2), TruncatedSeries1D::monomial(3)],
            Subalgebra::H0,
            &grid(64),
            1e-12,
        );
        assert!(report.residuals["multiplicative"] < 1e-12);
    }

    #[test]
    fn falsifier_on_identity_reports_zero() {
        let id = DiscAutomorphism::identity();
        for class in [Subalgebra::H0, Subalgebra::Neil] {
            let report = falsify_composition_automorphism(&id, class);
            assert_eq!(report.violation, 0.0);
        }
    }

    #[test]
    fn falsifier_h0_violation_is_mobius_parameter() {
        let tau = DiscAutomorphism::new(0.0, c64(0.5, 0.0)).unwrap();
        let report = falsify_composition_automorphism(&tau, Subalgebra::H0);
        assert!((report.violation - 0.5).abs() < 1e-12);
        assert!((report.violation - report.predicted).abs() < 1e-14);
    }

    #[test]
    fn falsifier_neil_violation_matches_derivative_product() {
        let tau = DiscAutomorphism::new(0.0, c64(0.5, 0.0)).unwrap();
        let report = falsify_composition_automorphism(&tau, Subalgebra::Neil);
        let expected = tau.eval_on_disc(Complex64::ZERO).norm()
            * tau.derivative_on_disc(Complex64::ZERO).norm();
        assert!((report.violation - expected).abs() < 1e-12);
    }

    #[test]
    fn neil_isometry_form_examples() {
        let g = grid(64);
        let report = isometry_form_check_neil(
            Complex64::ONE,
            0.0,
            &[TruncatedSeries1D::monomial(2)],
            &g,
            1e-12,
        );
        assert_eq!(report.max_residual(), 0.0);

        let report = isometry_form_check_neil(
            Complex64::I,
            std::f64::consts::FRAC_PI_2,
            &[TruncatedSeries1D::monomial(2)],
            &g,
            1e-12,
        );
        assert!(report.verdict.passed());
    }

    #[test]
    fn neil_isometry_form_on_random_samples() {
        let samples =
            crate::samples::unit_square_polynomials(13, 10, 8, crate::samples::SampleClass::Neil);
        let report = isometry_form_check_neil(
            -Complex64::ONE,
            2.0 * std::f64::consts::PI / 5.0,
            &samples,
            &grid(128),
            1e-10,
        );
        assert!(report.verdict.passed(), "residuals {:?}", report.residuals);
        assert!(report.max_residual() < 1e-10);
    }
}
