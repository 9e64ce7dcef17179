//! Report objects shared by the verification routines and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::schema::Series1DFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Outcome of one named verification: residuals by check name, an optional
/// witness series, and the verdict at the stated tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Series1DFile>,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub grid_size: usize,
}

impl CheckReport {
    /// Verdict is pass exactly when every residual is below `tolerance`.
    pub fn from_residuals(
        check: impl Into<String>,
        residuals: BTreeMap<String, f64>,
        tolerance: f64,
        grid_size: usize,
    ) -> Self {
        let pass = residuals.values().all(|r| *r < tolerance);
        Self {
            check: check.into(),
            residuals,
            witness: None,
            verdict: Verdict::from_bool(pass),
            tolerance,
            grid_size,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.values().copied().fold(0.0, f64::max)
    }
}
