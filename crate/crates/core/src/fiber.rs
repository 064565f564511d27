//! Fibers, the common right factor of a pair, and the composite `Φ`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{left_divide_with_residual, LinearMap, PointMultiset, Poly, C64, ONE, ZERO};
use crate::series::{deck, deck_power_residual, default_order, ps};
use crate::tolerance::ToleranceContext;

/// `P⁻¹(P(z))` with multiplicities.
pub fn fiber(p: &Poly, z: C64, tol: &ToleranceContext) -> Result<PointMultiset> {
    if p.degree() < 1 {
        return Err(Error::Degenerate("fiber of a constant polynomial".into()));
    }
    let level = p.eval(z);
    p.add_constant(-level).roots(tol)
}

/// `f = f₀∘Q`, `g = g₀∘Q` with `Q` monic and `Q(0) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationResult {
    pub q: Poly,
    pub f0: Poly,
    pub g0: Poly,
    /// Affine map already absorbed into `f₀` and `g₀` when fixing the gauge of `Q`.
    pub normalization: LinearMap,
    /// Weighted `δ_f^{d/m} = δ_g^{d′/m}` defect that licensed the factorization.
    pub hypothesis_residual: f64,
    /// Worst relative residual of the two left divisions.
    pub division_residual: f64,
}

/// The right factor `Q` of degree `m = gcd(d, d′)` shared by `f` and `g`.
///
/// `Q` is solved from `Q∘δ = Q` with `δ = δ_f^{d/m}`, one coefficient at a
/// time from the top; `f₀` and `g₀` then come from left division. Fails with
/// [`Error::Hypothesis`] when the deck identity or a division does not hold
/// within `tol.verify`.
pub fn gcd_factor(f: &Poly, g: &Poly, tol: &ToleranceContext) -> Result<FactorizationResult> {
    let (d, dd) = (f.degree(), g.degree());
    if d < 2 || dd < 2 {
        return Err(Error::Degenerate("gcd_factor needs degrees at least 2".into()));
    }
    let m = d.gcd(&dd);
    if m == 1 {
        return Ok(FactorizationResult {
            q: Poly::identity(),
            f0: f.clone(),
            g0: g.clone(),
            normalization: LinearMap::identity(),
            hypothesis_residual: 0.0,
            division_residual: 0.0,
        });
    }
    let order = default_order(&[d, dd]);
    let hyp = deck_power_residual(f, g, order, tol)?;
    if !(hyp <= tol.verify) {
        return Err(Error::hypothesis(
            "deck powers differ: no common factor certified",
            hyp,
        ));
    }
    let delta = deck(f, order, tol)?.iterate(d / m);
    let q = invariant_factor(&delta, m)?;
    let (f0, rf) = left_divide_with_residual(f, &q)
        .ok_or_else(|| Error::hypothesis("f is not a composite with Q", f64::INFINITY))?;
    let (g0, rg) = left_divide_with_residual(g, &q)
        .ok_or_else(|| Error::hypothesis("g is not a composite with Q", f64::INFINITY))?;
    let division_residual = rf.max(rg);
    if !(division_residual <= tol.verify) {
        return Err(Error::hypothesis(
            "left division by Q failed",
            division_residual,
        ));
    }
    Ok(FactorizationResult {
        q,
        f0,
        g0,
        normalization: LinearMap::identity(),
        hypothesis_residual: hyp,
        division_residual,
    })
}

/// Monic `Q` of degree `m`, `Q(0) = 0`, with `Q∘δ = Q` through the
/// nonnegative powers of `z`.
fn invariant_factor(delta: &crate::series::TailSeries, m: usize) -> Result<Poly> {
    let u = delta.to_u();
    let len = m + 1;
    // powers[j][i] = [w^i] U^j, so [z^k] δ^j = powers[j][j-k]
    let mut powers = vec![vec![ZERO; len]; m + 1];
    powers[0][0] = ONE;
    for j in 1..=m {
        powers[j] = ps::mul(&powers[j - 1], &u, len);
    }
    let mut q = vec![ZERO; m + 1];
    q[m] = ONE;
    for k in (1..m).rev() {
        let mut s = ZERO;
        for j in k + 1..=m {
            s += q[j] * powers[j][j - k];
        }
        let pivot = powers[k][0] - ONE;
        if pivot.norm() < 1e-12 {
            return Err(Error::IllConditioned {
                pivot: pivot.norm(),
                step: k,
            });
        }
        q[k] = -s / pivot;
    }
    Ok(Poly::new(q))
}

/// The composite `Φ` of a pair with coprime degrees and the split factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiResult {
    pub phi: Poly,
    /// `S₁ … S_{dd′−1}`, averaged over the sample points.
    pub s: Vec<C64>,
    /// `Φ = f₁∘g`
    pub f1: Poly,
    /// `Φ = g₁∘f`
    pub g1: Poly,
    /// Worst spread of the `Sₙ` across samples, measured in `ζ = z/ρ` with
    /// `ρ` the sample radius: `max |Sₙ − mean| / max(ρⁿ, |mean|)`.
    pub spread: f64,
    /// `"monic"` for the symmetric-function normalization, `"sigma"` after
    /// rescaling so that the dominant coefficient is `αᵈ`.
    pub gauge: String,
}

/// `g⁻¹(g(f⁻¹(f(z))))`, `dd′` points with multiplicity.
pub fn composite_fiber(f: &Poly, g: &Poly, z: C64, tol: &ToleranceContext) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(f.degree() * g.degree());
    for p in fiber(f, z, tol)?.expanded() {
        out.extend(fiber(g, p, tol)?.expanded());
    }
    Ok(out)
}

/// Base points for the symmetric-function sampling: `2dd′` points on the
/// circle of radius `1.5·max(1, largest root modulus of f and g)`. The fiber
/// points have about this modulus and `Sₖ` carries rounding of order `ρᵏ`,
/// so the circle is kept as small as the root spread allows.
pub fn sample_points(f: &Poly, g: &Poly, tol: &ToleranceContext) -> Result<Vec<C64>> {
    let mut r: f64 = 1.0;
    for p in [f, g] {
        for (z, _) in p.roots(tol)?.items {
            r = r.max(z.norm());
        }
    }
    let n = 2 * f.degree() * g.degree();
    Ok((0..n)
        .map(|k| C64::from_polar(1.5 * r, std::f64::consts::TAU * (k as f64 + 0.5) / n as f64))
        .collect())
}

/// Builds `Φ(z) = z^{dd′} − S₁z^{dd′−1} + … ± S_{dd′−1}z` from the composite
/// fibers, checks that every `Sₙ` is constant across base points, and splits
/// `Φ = f₁∘g = g₁∘f`.
pub fn build_phi(f: &Poly, g: &Poly, samples: usize, tol: &ToleranceContext) -> Result<PhiResult> {
    let (d, dd) = (f.degree(), g.degree());
    if d < 1 || dd < 1 {
        return Err(Error::Degenerate("build_phi needs nonconstant polynomials".into()));
    }
    if d.gcd(&dd) != 1 {
        return Err(Error::Invalid(format!("degrees {d} and {dd} are not coprime")));
    }
    let mut points = sample_points(f, g, tol)?;
    if samples > 0 && samples < points.len() {
        points.truncate(samples);
    }
    let n = d * dd;
    let rows: Vec<Vec<C64>> = points
        .par_iter()
        .map(|&z| {
            let pts = composite_fiber(f, g, z, tol)?;
            Ok(Poly::from_roots(&pts).coeffs().to_vec())
        })
        .collect::<Result<_>>()?;
    // coefficient of t^{n-k} in ∏(t − Fᵢ) is (−1)^k S_k
    let mut phi = vec![ZERO; n + 1];
    phi[n] = ONE;
    let mut s = Vec::with_capacity(n.saturating_sub(1));
    let mut spread: f64 = 0.0;
    // The fiber points have modulus about ρ, so Sₖ carries rounding of order ρᵏ.
    let rho = points.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for k in 1..n {
        let vals: Vec<C64> = rows.iter().map(|r| r[n - k]).collect();
        let mean = vals.iter().sum::<C64>() / vals.len() as f64;
        let dev = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
        spread = spread.max(dev / mean.norm().max(rho.powi(k as i32)));
        phi[n - k] = mean;
        s.push(if k % 2 == 0 { mean } else { -mean });
    }
    if !(spread <= 1e-6) {
        return Err(Error::hypothesis(
            "commutation hypothesis fails numerically: symmetric functions are not constant",
            spread,
        ));
    }
    let phi = Poly::new(phi);
    let (f1, g1) = split_phi(&phi, f, g, tol)?;
    Ok(PhiResult {
        phi,
        s,
        f1,
        g1,
        spread,
        gauge: "monic".into(),
    })
}

fn split_phi(phi: &Poly, f: &Poly, g: &Poly, tol: &ToleranceContext) -> Result<(Poly, Poly)> {
    let (f1, rf) = left_divide_with_residual(phi, g)
        .ok_or_else(|| Error::hypothesis("Φ does not factor through g", f64::INFINITY))?;
    let (g1, rg) = left_divide_with_residual(phi, f)
        .ok_or_else(|| Error::hypothesis("Φ does not factor through f", f64::INFINITY))?;
    let worst = rf.max(rg);
    if !(worst <= tol.verify) {
        return Err(Error::hypothesis("splitting Φ failed", worst));
    }
    Ok((f1, g1))
}

/// Multiset distances `C_{f₁} ↔ g(C_f)` and `C_{g₁} ↔ f(C_g)`.
pub fn critical_transport_residual(
    f: &Poly,
    g: &Poly,
    f1: &Poly,
    g1: &Poly,
    tol: &ToleranceContext,
) -> Result<(f64, f64)> {
    let lhs_f = f1.critical_points(tol)?;
    let rhs_f = f.critical_points(tol)?.map(|z| g.eval(z));
    let lhs_g = g1.critical_points(tol)?;
    let rhs_g = g.critical_points(tol)?.map(|z| f.eval(z));
    Ok((lhs_f.distance(&rhs_f), lhs_g.distance(&rhs_g)))
}

/// One step of the construction on `Σ(d, d′, α)`: the unique
/// `(f₁, g₁) ∈ Σ(d, d′, αᵈ)` with `f₁∘g₀ = g₁∘f₀`.
pub fn lemma1_step(f0: &Poly, g0: &Poly, alpha: C64, tol: &ToleranceContext) -> Result<(Poly, Poly)> {
    Ok(lemma1_phi(f0, g0, alpha, tol)?.into_pair())
}

impl PhiResult {
    fn into_pair(self) -> (Poly, Poly) {
        (self.f1, self.g1)
    }
}

/// Like [`lemma1_step`] but returns the whole [`PhiResult`] in the `"sigma"` gauge.
pub fn lemma1_phi(f0: &Poly, g0: &Poly, alpha: C64, tol: &ToleranceContext) -> Result<PhiResult> {
    let d = f0.degree();
    let monic = build_phi(f0, g0, 0, tol)?;
    let scale = alpha.powu(d as u32);
    let phi = monic.phi.scale(scale);
    let (f1, g1) = split_phi(&phi, f0, g0, tol)?;
    Ok(PhiResult {
        phi,
        s: monic.s,
        f1,
        g1,
        spread: monic.spread,
        gauge: "sigma".into(),
    })
}

/// A linear `σ` with `f = σ∘g`, for equal degrees.
pub fn linear_relation(f: &Poly, g: &Poly, tol: &ToleranceContext) -> Option<LinearMap> {
    if f.degree() != g.degree() || g.degree() == 0 {
        return None;
    }
    let r = f.left_divide(g, tol)?;
    (r.degree() == 1).then(|| LinearMap::new(r.coeff(1), r.coeff(0)))
}
