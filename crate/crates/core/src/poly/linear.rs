use serde::{Deserialize, Serialize};

use super::{Poly, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// An affine map `σ(z) = a·z + b` with `a ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    pub a: C64,
    pub b: C64,
}

impl Default for LinearMap {
    fn default() -> Self {
        Self::identity()
    }
}

impl LinearMap {
    pub fn new(a: C64, b: C64) -> Self {
        LinearMap { a, b }
    }

    /// Like [`LinearMap::new`] but rejects `a = 0`.
    pub fn checked(a: C64, b: C64) -> Result<Self> {
        if a == ZERO || !a.is_finite() || !b.is_finite() {
            return Err(Error::Invalid("linear map needs a finite nonzero slope".into()));
        }
        Ok(LinearMap { a, b })
    }

    pub fn identity() -> Self {
        LinearMap { a: ONE, b: ZERO }
    }

    pub fn scaling(a: C64) -> Self {
        LinearMap { a, b: ZERO }
    }

    pub fn translation(b: C64) -> Self {
        LinearMap { a: ONE, b }
    }

    pub fn apply(&self, z: C64) -> C64 {
        self.a * z + self.b
    }

    pub fn inverse(&self) -> Self {
        let ia = self.a.inv();
        LinearMap { a: ia, b: -self.b * ia }
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &LinearMap) -> Self {
        LinearMap {
            a: self.a * other.a,
            b: self.a * other.b + self.b,
        }
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(vec![self.b, self.a])
    }

    pub fn distance(&self, other: &LinearMap) -> f64 {
        (self.a - other.a).norm().max((self.b - other.b).norm())
    }
}
