//! Numerical tolerances shared by every comparison in the crate.

use serde::{Deserialize, Serialize};

/// Tolerances that travel with every floating-point comparison.
///
/// All fields are public so callers can override individual thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceContext {
    /// Absolute threshold: coefficient cleanup and pivot checks.
    pub abs: f64,
    /// Relative threshold for coefficientwise identities.
    pub rel: f64,
    /// Points closer than this are treated as one point of higher multiplicity.
    pub cluster: f64,
    /// Acceptance threshold for derived identities (divisions, factorizations,
    /// normal-form reconstructions), measured relative to coefficient scale.
    pub verify: f64,
}

impl Default for ToleranceContext {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-8,
            cluster: 1e-6,
            verify: 1e-6,
        }
    }
}

impl ToleranceContext {
    /// Same context with every threshold replaced by `tol` except the clustering radius.
    pub fn uniform(tol: f64) -> Self {
        Self {
            abs: tol,
            rel: tol,
            verify: tol,
            ..Self::default()
        }
    }

    pub fn with_verify(mut self, verify: f64) -> Self {
        self.verify = verify;
        self
    }

    /// `|a - b| <= abs + rel * max(|a|, |b|)`
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs + self.rel * a.abs().max(b.abs())
    }
}
