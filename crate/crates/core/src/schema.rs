//! JSON file formats: series, automorphisms, and operator specs.
//!
//! Complex numbers are stored as `[re, im]` pairs throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hardy::PNorm;
use crate::moebius::{DiscAutomorphism, MoebiusError};
use crate::operators::{UnimodularMonomial, WeightedCompositionOp1D, WeightedCompositionOp2D};
use crate::series::{TruncatedSeries1D, TruncatedSeries2D};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("coeffs has {got} entries but degree {degree} requires {want}")]
    CoefficientCount { degree: usize, got: usize, want: usize },
    #[error("coefficient matrix shape does not match bidegree {0:?}")]
    CoefficientShape((usize, usize)),
    #[error("p must be a real number >= 1 or \"inf\", got {0}")]
    InvalidP(String),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error("{0}")]
    Operator(String),
}

pub fn complex_to_pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

pub fn pair_to_complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `{"degree": N, "coeffs": [[re, im], ...]}` with `N + 1` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Series1DFile {
    pub degree: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl Series1DFile {
    pub fn from_series(s: &TruncatedSeries1D) -> Self {
        Self {
            degree: s.degree(),
            coeffs: s.coeffs().iter().map(|c| complex_to_pair(*c)).collect(),
        }
    }

    pub fn to_series(&self) -> Result<TruncatedSeries1D, SchemaError> {
        if self.coeffs.len() != self.degree + 1 {
            return Err(SchemaError::CoefficientCount {
                degree: self.degree,
                got: self.coeffs.len(),
                want: self.degree + 1,
            });
        }
        Ok(TruncatedSeries1D::new(
            self.coeffs.iter().map(|p| pair_to_complex(*p)).collect(),
        ))
    }
}

/// `{"bidegree": [N, M], "coeffs": [[[re, im], ...], ...]}` row-major in the
/// first variable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Series2DFile {
    pub bidegree: [usize; 2],
    pub coeffs: Vec<Vec<[f64; 2]>>,
}

impl Series2DFile {
    pub fn from_series(s: &TruncatedSeries2D) -> Self {
        Self {
            bidegree: [s.bidegree().0, s.bidegree().1],
            coeffs: s
                .rows()
                .iter()
                .map(|row| row.iter().map(|c| complex_to_pair(*c)).collect())
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<TruncatedSeries2D, SchemaError> {
        let want = (self.bidegree[0], self.bidegree[1]);
        if self.coeffs.len() != want.0 + 1
            || self.coeffs.iter().any(|row| row.len() != want.1 + 1)
        {
            return Err(SchemaError::CoefficientShape(want));
        }
        Ok(TruncatedSeries2D::new(
            self.coeffs
                .iter()
                .map(|row| row.iter().map(|p| pair_to_complex(*p)).collect())
                .collect(),
        ))
    }
}

/// `{"theta": real, "a": [re, im]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutomorphismFile {
    pub theta: f64,
    pub a: [f64; 2],
}

impl AutomorphismFile {
    pub fn from_automorphism(tau: &DiscAutomorphism) -> Self {
        Self {
            theta: tau.theta(),
            a: complex_to_pair(tau.a()),
        }
    }

    pub fn to_automorphism(&self) -> Result<DiscAutomorphism, SchemaError> {
        Ok(DiscAutomorphism::new(self.theta, pair_to_complex(self.a))?)
    }
}

/// Untagged `number | "inf"` form of the norm exponent.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum PValue {
    Number(f64),
    Symbol(String),
}

impl Serialize for PNorm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            PNorm::Finite(p) => serializer.serialize_f64(*p),
            PNorm::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match PValue::deserialize(deserializer)? {
            PValue::Number(p) => {
                PNorm::finite(p).map_err(|_| serde::de::Error::custom("p must be >= 1"))
            }
            PValue::Symbol(s) if s == "inf" => Ok(PNorm::Infinity),
            PValue::Symbol(s) => Err(serde::de::Error::custom(format!(
                "p must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// `{"c": [re, im], "k": int}` describing `σ(z) = c·z^k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaFile {
    pub c: [f64; 2],
    pub k: u32,
}

/// Operator spec. The `sigma` field marks the bidisc variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorFile {
    pub alpha: [f64; 2],
    pub tau: AutomorphismFile,
    pub p: PNorm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<SigmaFile>,
}

impl OperatorFile {
    pub fn from_op_1d(op: &WeightedCompositionOp1D) -> Self {
        Self {
            alpha: complex_to_pair(op.alpha()),
            tau: AutomorphismFile::from_automorphism(op.tau()),
            p: op.p(),
            sigma: None,
        }
    }

    pub fn from_op_2d(op: &WeightedCompositionOp2D) -> Self {
        Self {
            alpha: complex_to_pair(op.alpha()),
            tau: AutomorphismFile::from_automorphism(op.tau()),
            p: op.p(),
            sigma: Some(SigmaFile {
                c: complex_to_pair(op.sigma().c()),
                k: op.sigma().k(),
            }),
        }
    }

    pub fn is_bidisc(&self) -> bool {
        self.sigma.is_some()
    }

    pub fn to_op_1d(&self) -> Result<WeightedCompositionOp1D, SchemaError> {
        WeightedCompositionOp1D::new(
            pair_to_complex(self.alpha),
            self.tau.to_automorphism()?,
            self.p,
        )
        .map_err(|e| SchemaError::Operator(e.to_string()))
    }

    pub fn to_op_2d(&self) -> Result<WeightedCompositionOp2D, SchemaError> {
        let sigma = self
            .sigma
            .as_ref()
            .ok_or_else(|| SchemaError::Operator("missing sigma field".into()))?;
        let sigma = UnimodularMonomial::new(pair_to_complex(sigma.c), sigma.k)
            .map_err(|e| SchemaError::Operator(e.to_string()))?;
        WeightedCompositionOp2D::new(
            pair_to_complex(self.alpha),
            self.tau.to_automorphism()?,
            sigma,
            self.p,
        )
        .map_err(|e| SchemaError::Operator(e.to_string()))
    }
}
