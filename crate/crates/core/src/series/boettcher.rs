use num_integer::Integer;

use super::{ps, TailSeries};
use crate::error::{Error, Result};
use crate::poly::{Poly, C64, ONE, ZERO};
use crate::tolerance::ToleranceContext;

/// `2·max(degrees) + 16`
pub fn default_order(degrees: &[usize]) -> usize {
    2 * degrees.iter().copied().max().unwrap_or(0) + 16
}

/// Radius `R` used to weigh tail coefficients: `2·max(1, root radius of p)`.
///
/// In the coordinate `ζ = z/R` the monic-normalized polynomial has
/// coefficients of modulus at most one, so residuals become comparable
/// across scales.
pub fn series_scale(p: &Poly) -> f64 {
    2.0 * p.root_radius().max(1.0)
}

/// `P(z)/zᵈ` as a power series in `w = 1/z`.
fn reversed(p: &Poly, len: usize) -> Vec<C64> {
    let d = p.degree();
    let mut out = vec![ZERO; len.max(d + 1)];
    for (i, o) in out.iter_mut().take(d + 1).enumerate() {
        *o = p.coeff(d - i);
    }
    out.truncate(len);
    out
}

/// `1/P(z) = wᵈ / Ṗ(w)`
fn reciprocal(pdot: &[C64], d: usize, len: usize) -> Vec<C64> {
    let inv = ps::inv(pdot, len);
    let mut s = vec![ZERO; len];
    if d < len {
        s[d..].copy_from_slice(&inv[..len - d]);
    }
    s
}

/// Conjugacy defect `Ṗ(w)·U(1/P) − α·U(w)ᵈ`, one entry per power of `w`.
fn defect(pdot: &[C64], s: &[C64], u: &[C64], alpha: C64, d: usize, len: usize) -> Vec<C64> {
    let lhs = ps::mul(pdot, &ps::substitute(u, s, len), len);
    let rhs = ps::pow(u, d, len);
    lhs.iter().zip(&rhs).map(|(&l, &r)| l - alpha * r).collect()
}

/// Böttcher series `B(z) = z + b₀ + b₁z⁻¹ + … + b_N z⁻ᴺ` with
/// `B∘P = α·Bᵈ` through order `N`, `α` the leading coefficient of `P`.
///
/// Coefficients are found one at a time: the coefficient of `w^{j+1}` in
/// the defect is linear in `b_j` with pivot `α·d`.
pub fn boettcher(p: &Poly, order: usize, tol: &ToleranceContext) -> Result<TailSeries> {
    let d = p.degree();
    if d < 2 {
        return Err(Error::Degenerate("Böttcher series needs degree at least 2".into()));
    }
    let alpha = p.leading();
    let pivot = alpha * d as f64;
    if pivot.norm() < tol.abs {
        return Err(Error::IllConditioned {
            pivot: pivot.norm(),
            step: 0,
        });
    }
    let len = order + 2;
    let pdot = reversed(p, len);
    let s = reciprocal(&pdot, d, len);
    let mut u = vec![ZERO; len];
    u[0] = ONE;
    // Only powers of s up to w^{len-1} matter; s = O(w^d).
    for j in 0..=order {
        let e = defect(&pdot, &s, &u, alpha, d, j + 2);
        u[j + 1] = e[j + 1] / pivot;
    }
    Ok(TailSeries::from_u(&u, order))
}

/// Weighted defect of `B∘P = α·Bᵈ` through order `N` (see [`series_scale`]).
pub fn conjugacy_residual(p: &Poly, b: &TailSeries) -> f64 {
    let d = p.degree();
    let alpha = p.leading();
    let len = b.order + 2;
    let pdot = reversed(p, len);
    let s = reciprocal(&pdot, d, len);
    let e = defect(&pdot, &s, &b.to_u(), alpha, d, len);
    weighted_max(&e, series_scale(p)) / alpha.norm()
}

fn weighted_max(e: &[C64], radius: f64) -> f64 {
    let mut w = 1.0;
    let mut worst: f64 = 0.0;
    for c in e {
        worst = worst.max(c.norm() * w);
        w /= radius;
    }
    worst
}

/// Deck transformation `δ_P = B⁻¹∘(θ_d·B)` with `θ_d = e^{2πi/d}`.
pub fn deck(p: &Poly, order: usize, tol: &ToleranceContext) -> Result<TailSeries> {
    let b = boettcher(p, order, tol)?;
    let d = p.degree();
    let angle = std::f64::consts::TAU / d as f64;
    let theta = C64::new(angle.cos(), angle.sin());
    let mut delta = b.invert().compose(&b.scale(theta));
    delta.rho = theta;
    Ok(delta)
}

/// Weighted defect of `P∘δ = P` as an expansion at infinity.
pub fn invariance_residual(p: &Poly, delta: &TailSeries) -> f64 {
    let d = p.degree();
    let len = delta.order + 2;
    let v = delta.to_u();
    let mut diff = vec![ZERO; len];
    let mut vk = vec![ZERO; len];
    vk[0] = ONE;
    for k in 0..=d {
        if k > 0 {
            vk = ps::mul(&vk, &v, len);
        }
        let pk = p.coeff(k);
        let shift = d - k;
        for i in 0..len.saturating_sub(shift) {
            let unit = if i == 0 { ONE } else { ZERO };
            diff[i + shift] += pk * (vk[i] - unit);
        }
    }
    weighted_max(&diff, series_scale(p)) / p.leading().norm()
}

fn pair_scale(f: &Poly, g: &Poly) -> f64 {
    series_scale(f).max(series_scale(g))
}

/// Weighted distance between `δ_f∘δ_g` and `δ_g∘δ_f`.
pub fn deck_commutator_residual(f: &Poly, g: &Poly, order: usize, tol: &ToleranceContext) -> Result<f64> {
    let df = deck(f, order, tol)?;
    let dg = deck(g, order, tol)?;
    Ok(df
        .compose(&dg)
        .weighted_distance(&dg.compose(&df), pair_scale(f, g)))
}

/// Weighted distance between `δ_f^{d/m}` and `δ_g^{d′/m}`, `m = gcd(d, d′)`.
pub fn deck_power_residual(f: &Poly, g: &Poly, order: usize, tol: &ToleranceContext) -> Result<f64> {
    let (d, dd) = (f.degree(), g.degree());
    let m = d.gcd(&dd);
    let df = deck(f, order, tol)?;
    let dg = deck(g, order, tol)?;
    Ok(df
        .iterate(d / m)
        .weighted_distance(&dg.iterate(dd / m), pair_scale(f, g)))
}
