//! Deterministic sample-polynomial generation.
//!
//! Two families: coefficients drawn uniformly from the unit square of the
//! complex plane (the CLI's generator), and polynomials with zeros bounded
//! away from the unit circle. The latter keep boundary quadrature spectrally
//! exact at odd exponents, where near-circle zeros would slow convergence.
//! The same seed always reproduces the same output bit for bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::series::{TruncatedSeries1D, TruncatedSeries2D};

/// Subalgebra filter applied after generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleClass {
    Unrestricted,
    /// zero the constant coefficient
    H0,
    /// zero the linear coefficient
    Neil,
    /// zero coefficients 0..=n
    H0n(usize),
}

impl SampleClass {
    fn apply(&self, coeffs: &mut [Complex64]) {
        match self {
            SampleClass::Unrestricted => {}
            SampleClass::H0 => coeffs[0] = Complex64::ZERO,
            SampleClass::Neil => {
                if coeffs.len() > 1 {
                    coeffs[1] = Complex64::ZERO;
                }
            }
            SampleClass::H0n(n) => {
                for c in coeffs.iter_mut().take(n + 1) {
                    *c = Complex64::ZERO;
                }
            }
        }
    }
}

fn unit_square(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random::<f64>(), rng.random::<f64>())
}

/// Polynomials of degree `max_degree` with coefficients uniform in the unit
/// square, post-filtered to the requested subalgebra.
pub fn unit_square_polynomials(
    seed: u64,
    count: usize,
    max_degree: usize,
    class: SampleClass,
) -> Vec<TruncatedSeries1D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut coeffs: Vec<Complex64> =
                (0..=max_degree).map(|_| unit_square(&mut rng)).collect();
            class.apply(&mut coeffs);
            TruncatedSeries1D::new(coeffs)
        })
        .collect()
}

/// Two-variable polynomials of the given bidegree with unit-square
/// coefficients.
pub fn unit_square_polynomials_2d(
    seed: u64,
    count: usize,
    bidegree: (usize, usize),
) -> Vec<TruncatedSeries2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            TruncatedSeries2D::new(
                (0..=bidegree.0)
                    .map(|_| (0..=bidegree.1).map(|_| unit_square(&mut rng)).collect())
                    .collect(),
            )
        })
        .collect()
}

fn disc_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

fn poly_from_zeros(zeros: &[Complex64], lead: Complex64) -> TruncatedSeries1D {
    let mut coeffs = vec![lead];
    for zero in zeros {
        let mut next = vec![Complex64::ZERO; coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= zero * c;
        }
        coeffs = next;
    }
    TruncatedSeries1D::new(coeffs)
}

/// Monic-up-to-scale polynomials whose zeros all lie in
/// `|z| ≤ max_zero_modulus < 1`.
pub fn bounded_zero_polynomials(
    seed: u64,
    count: usize,
    degree: usize,
    max_zero_modulus: f64,
) -> Vec<TruncatedSeries1D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let zeros: Vec<Complex64> = (0..degree)
                .map(|_| disc_point(&mut rng, max_zero_modulus))
                .collect();
            let lead = Complex64::from_polar(
                0.5 + rng.random::<f64>(),
                std::f64::consts::TAU * rng.random::<f64>(),
            );
            poly_from_zeros(&zeros, lead)
        })
        .collect()
}

/// Products `g(z)·h(w)` of bounded-zero polynomials, for torus quadrature.
pub fn bounded_zero_polynomials_2d(
    seed: u64,
    count: usize,
    bidegree: (usize, usize),
    max_zero_modulus: f64,
) -> Vec<TruncatedSeries2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let g = {
                let zeros: Vec<Complex64> = (0..bidegree.0)
                    .map(|_| disc_point(&mut rng, max_zero_modulus))
                    .collect();
                poly_from_zeros(&zeros, Complex64::ONE)
            };
            let h = {
                let zeros: Vec<Complex64> = (0..bidegree.1)
                    .map(|_| disc_point(&mut rng, max_zero_modulus))
                    .collect();
                poly_from_zeros(&zeros, Complex64::ONE)
            };
            TruncatedSeries2D::new(
                (0..=bidegree.0)
                    .map(|n| (0..=bidegree.1).map(|m| g.coeff(n) * h.coeff(m)).collect())
                    .collect(),
            )
        })
        .collect()
}
