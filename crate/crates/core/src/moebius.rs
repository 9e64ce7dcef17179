//! The group of disc automorphisms in `(θ, a)` normal form.
//!
//! Every biholomorphic self-map of the unit disc is
//! `τ(z) = e^{iθ}(z − a)/(1 − āz)` for a unique rotation angle
//! `θ ∈ [0, 2π)` and a unique `a` strictly inside the disc. Composition and
//! inversion extract the composite's normal form through evaluation rather
//! than matrix representatives, which keeps the parameters unique.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::series::TruncatedSeries1D;

/// Margin keeping the Möbius parameter strictly inside the disc.
pub const PARAM_MARGIN: f64 = 1e-9;

/// Denominators `1 − āz` smaller than this indicate evaluation next to the
/// pole at `1/ā`, which lies outside the closed disc.
pub const POLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("Möbius parameter must satisfy |a| < 1 - {margin:.1e}, got |a| = {modulus}")]
    InvalidParameter { modulus: f64, margin: f64 },
    #[error("evaluation point is within {tol:.1e} of the pole at 1/ā")]
    PoleProximity { tol: f64 },
    #[error("elliptic order must be at least 1, got {order}")]
    InvalidOrder { order: u32 },
}

/// A disc automorphism `τ(z) = e^{iθ}(z − a)/(1 − āz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscAutomorphism {
    theta: f64,
    a: Complex64,
}

impl DiscAutomorphism {
    pub fn new(theta: f64, a: Complex64) -> Result<Self, MoebiusError> {
        if a.norm() >= 1.0 - PARAM_MARGIN {
            return Err(MoebiusError::InvalidParameter {
                modulus: a.norm(),
                margin: PARAM_MARGIN,
            });
        }
        Ok(Self {
            theta: theta.rem_euclid(TAU),
            a,
        })
    }

    pub fn identity() -> Self {
        Self {
            theta: 0.0,
            a: Complex64::ZERO,
        }
    }

    /// The rotation `z ↦ e^{iθ}z`.
    pub fn rotation(theta: f64) -> Self {
        Self {
            theta: theta.rem_euclid(TAU),
            a: Complex64::ZERO,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, MoebiusError> {
        let denom = Complex64::ONE - self.a.conj() * z;
        if denom.norm() <= POLE_TOL {
            return Err(MoebiusError::PoleProximity { tol: POLE_TOL });
        }
        Ok(Complex64::from_polar(1.0, self.theta) * (z - self.a) / denom)
    }

    /// `τ'(z) = e^{iθ}(1 − |a|²)/(1 − āz)²`.
    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64, MoebiusError> {
        let denom = Complex64::ONE - self.a.conj() * z;
        if denom.norm() <= POLE_TOL {
            return Err(MoebiusError::PoleProximity { tol: POLE_TOL });
        }
        Ok(Complex64::from_polar(1.0, self.theta) * (1.0 - self.a.norm_sqr()) / (denom * denom))
    }

    /// Evaluation on the closed disc, where the pole cannot be hit.
    pub(crate) fn eval_on_disc(&self, z: Complex64) -> Complex64 {
        self.evaluate(z)
            .expect("no pole of a disc automorphism on the closed disc")
    }

    pub(crate) fn derivative_on_disc(&self, z: Complex64) -> Complex64 {
        self.derivative_at(z)
            .expect("no pole of a disc automorphism on the closed disc")
    }

    /// Composite `self ∘ other` in normal form. The parameter of the
    /// composite is `a' = (self ∘ other)^{-1}(0) = other^{-1}(self.a)` and
    /// the angle is `arg((self ∘ other)'(a') (1 − |a'|²))`.
    pub fn compose(&self, other: &Self) -> Self {
        let a_new = other.inverse().eval_on_disc(self.a);
        let deriv = self.derivative_on_disc(self.a) * other.derivative_on_disc(a_new);
        let theta_new = (deriv * (1.0 - a_new.norm_sqr())).arg();
        Self::new(theta_new, a_new).expect("composite of disc automorphisms stays in the disc")
    }

    /// Inverse in normal form: `(θ, a) ↦ (−θ, −e^{iθ}a)`.
    pub fn inverse(&self) -> Self {
        let a_new = -Complex64::from_polar(1.0, self.theta) * self.a;
        Self::new(-self.theta, a_new).expect("inverse parameter stays in the disc")
    }

    /// Smallest `n ≤ n_max` with `τ^{∘n} = id` on 32 boundary samples,
    /// or `None`. Agreement on infinitely many points would force equality
    /// of analytic maps, so a sampled check at tight tolerance is decisive.
    pub fn order_up_to(&self, n_max: u32, tol: f64) -> Option<u32> {
        const SAMPLES: usize = 32;
        let points: Vec<Complex64> = (0..SAMPLES)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / SAMPLES as f64))
            .collect();
        let mut iterates = points.clone();
        for n in 1..=n_max {
            let mut max_dev: f64 = 0.0;
            for (it, start) in iterates.iter_mut().zip(points.iter()) {
                *it = self.eval_on_disc(*it);
                max_dev = max_dev.max((*it - start).norm());
            }
            if max_dev < tol {
                return Some(n);
            }
        }
        None
    }

    /// The elliptic automorphism `φ_a ∘ ρ_{2π/n} ∘ φ_a` of order exactly
    /// `n`, fixing `a`. The conjugating factor is the standard involution
    /// `φ_a(z) = (a − z)/(1 − āz)`, which is its own inverse.
    pub fn elliptic_of_order(n: u32, a: Complex64) -> Result<Self, MoebiusError> {
        if n < 1 {
            return Err(MoebiusError::InvalidOrder { order: n });
        }
        let involution = Self::new(std::f64::consts::PI, a)?;
        let rotation = Self::rotation(TAU / n as f64);
        Ok(involution.compose(&rotation.compose(&involution)))
    }

    /// Taylor coefficients at the origin, from the geometric expansion of
    /// `(1 − āz)^{-1}`. The tail beyond `degree` is bounded by
    /// `|a|^{degree+1}/(1 − |a|)` on the closed disc.
    pub fn to_series(&self, degree: usize) -> TruncatedSeries1D {
        let phase = Complex64::from_polar(1.0, self.theta);
        let mut coeffs = vec![Complex64::ZERO; degree + 1];
        coeffs[0] = -phase * self.a;
        let mut abar_pow = Complex64::ONE;
        for c in coeffs.iter_mut().skip(1) {
            *c = phase * abar_pow * (1.0 - self.a.norm_sqr());
            abar_pow *= self.a.conj();
        }
        TruncatedSeries1D::new(coeffs)
    }
}
