//! Truncated expansions at infinity `ρz + a₀ + a₁z⁻¹ + … + a_N z⁻ᴺ`.
//!
//! Internally a tail series is handled through `w = 1/z`: `h(z) = U(w)/w`
//! with `U(w) = ρ + a₀w + a₁w² + …`, so composition and inversion reduce to
//! truncated power-series arithmetic.

mod boettcher;
pub(crate) mod ps;

pub use boettcher::{
    boettcher, conjugacy_residual, deck, deck_commutator_residual, deck_power_residual,
    default_order, invariance_residual, series_scale,
};

use serde::{Deserialize, Serialize};

use crate::poly::{C64, ONE, ZERO};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailSeries {
    pub rho: C64,
    /// `a₀, a₁, …, a_N`
    pub coeffs: Vec<C64>,
    pub order: usize,
}

impl TailSeries {
    pub fn new(rho: C64, mut coeffs: Vec<C64>, order: usize) -> Self {
        coeffs.resize(order + 1, ZERO);
        TailSeries { rho, coeffs, order }
    }

    pub fn identity(order: usize) -> Self {
        Self::new(ONE, vec![], order)
    }

    pub fn rotation(rho: C64, order: usize) -> Self {
        Self::new(rho, vec![], order)
    }

    /// `U(w) = ρ + a₀w + … + a_N w^{N+1}`, length `N + 2`.
    pub(crate) fn to_u(&self) -> Vec<C64> {
        let mut u = Vec::with_capacity(self.order + 2);
        u.push(self.rho);
        u.extend_from_slice(&self.coeffs);
        u
    }

    pub(crate) fn from_u(u: &[C64], order: usize) -> Self {
        let rho = u.first().copied().unwrap_or(ZERO);
        let coeffs = u.iter().skip(1).take(order + 1).copied().collect();
        Self::new(rho, coeffs, order)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.rho * s,
            self.coeffs.iter().map(|&c| c * s).collect(),
            self.order,
        )
    }

    /// Numerical value at a point far enough out for the tail to make sense.
    pub fn eval(&self, z: C64) -> C64 {
        let w = z.inv();
        let tail = self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * w + c);
        self.rho * z + tail
    }

    /// `self ∘ other`, truncated to the smaller order.
    pub fn compose(&self, other: &TailSeries) -> TailSeries {
        let order = self.order.min(other.order);
        compose_parts(self.rho, &self.coeffs, other, order)
    }

    /// Compositional inverse by fixed-point iteration
    /// `g ← (z − a₀ − Σ aₖ g⁻ᵏ)/ρ`, one order gained per sweep.
    pub fn invert(&self) -> TailSeries {
        let order = self.order;
        let irho = self.rho.inv();
        let mut g = TailSeries::rotation(irho, order);
        for _ in 0..order + 2 {
            let t = compose_parts(ZERO, &self.coeffs, &g, order);
            g = TailSeries::new(
                irho,
                t.coeffs.iter().map(|&c| -c * irho).collect(),
                order,
            );
        }
        g
    }

    /// `self` composed with itself `k` times (`k = 0` is the identity).
    pub fn iterate(&self, k: usize) -> TailSeries {
        let mut out = TailSeries::identity(self.order);
        for _ in 0..k {
            out = self.compose(&out);
        }
        out
    }

    /// Coefficient distance after the rescaling `z = Rζ`: the coefficient of
    /// `z⁻ᵏ` is weighted by `R^{-k-1}`.
    pub fn weighted_distance(&self, other: &TailSeries, radius: f64) -> f64 {
        let n = self.order.min(other.order);
        let mut worst = (self.rho - other.rho).norm();
        let mut w = 1.0 / radius;
        for k in 0..=n {
            worst = worst.max((self.coeffs[k] - other.coeffs[k]).norm() * w);
            w /= radius;
        }
        worst
    }

    /// Plain coefficient distance (`R = 1`).
    pub fn distance(&self, other: &TailSeries) -> f64 {
        self.weighted_distance(other, 1.0)
    }
}

/// `(ρ₁ z + a₀ + Σ aₖ z⁻ᵏ) ∘ h₂` through order `order`.
fn compose_parts(rho1: C64, a: &[C64], h2: &TailSeries, order: usize) -> TailSeries {
    let len = order + 2;
    let mut u2 = h2.to_u();
    u2.resize(len, ZERO);
    // 1/h₂(z) = w·V(w) with V = 1/U₂
    let v = ps::inv(&u2, len);
    // result U(w) = ρ₁U₂(w) + a₀w + Σₖ aₖ w^{k+1} Vᵏ
    let mut out: Vec<C64> = u2.iter().map(|&c| c * rho1).collect();
    if let Some(&a0) = a.first() {
        out[1] += a0;
    }
    let mut vk = vec![ZERO; len];
    vk[0] = ONE;
    for (k, &ak) in a.iter().enumerate().skip(1) {
        if k + 1 >= len {
            break;
        }
        vk = ps::mul(&vk, &v, len);
        if ak == ZERO {
            continue;
        }
        for i in 0..len - k - 1 {
            out[i + k + 1] += ak * vk[i];
        }
    }
    TailSeries::from_u(&out, order)
}
