//! Power and Chebyshev normal forms up to affine changes of coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::param::{pi_map, ParamPoint};
use crate::poly::{LinearMap, PointMultiset, Poly, C64, ONE, ZERO};
use crate::tolerance::ToleranceContext;

/// Chebyshev polynomial `T_k` from `T₀ = 1`, `T₁ = z`, `T_{k+1} = 2zT_k − T_{k−1}`.
pub fn chebyshev(k: usize) -> Poly {
    let two_z = Poly::monomial(C64::new(2.0, 0.0), 1);
    let (mut prev, mut cur) = (Poly::one(), Poly::identity());
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = &(&two_z * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `max |T_k(ψ(z)) − ψ(zᵏ)|` over 256 points of the unit circle, where
/// `ψ(z) = (z + 1/z)/2`.
pub fn psi_residual(k: usize) -> f64 {
    let t = chebyshev(k);
    let psi = |z: C64| (z + z.inv()) / 2.0;
    (0..256)
        .map(|j| {
            let z = C64::from_polar(1.0, std::f64::consts::TAU * (j as f64 + 0.25) / 256.0);
            (t.eval(psi(z)) - psi(z.powu(k as u32))).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormKind {
    Power,
    Chebyshev,
}

/// `f = σ∘N∘τ` with `N = zᵈ` or `N = ±T_d`; for pairs also
/// `g = σ∘N′∘τ` with `N′ = a·z^{d′}` or `±T_{d′}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormWitness {
    pub kind: NormalFormKind,
    pub sigma: LinearMap,
    pub tau: LinearMap,
    pub degree: usize,
    /// Sign of the Chebyshev form of `f`; `1` for power forms.
    pub sign: i8,
    /// Second polynomial of a joint witness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_g: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_g: Option<i8>,
    /// Scale of the second power map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<C64>,
    /// Worst relative reconstruction residual.
    pub residual: f64,
}

impl NormalFormWitness {
    /// `N` for the first polynomial.
    pub fn normal_form(&self) -> Poly {
        model(self.kind, self.degree, self.sign, ONE)
    }

    /// `N′` for the second polynomial of a joint witness.
    pub fn normal_form_g(&self) -> Option<Poly> {
        let dd = self.degree_g?;
        Some(model(
            self.kind,
            dd,
            self.sign_g.unwrap_or(1),
            self.a.unwrap_or(ONE),
        ))
    }

    pub fn reconstruct(&self) -> Poly {
        self.normal_form().conjugate(&self.sigma, &self.tau)
    }

    pub fn reconstruct_g(&self) -> Option<Poly> {
        Some(self.normal_form_g()?.conjugate(&self.sigma, &self.tau))
    }
}

fn model(kind: NormalFormKind, d: usize, sign: i8, a: C64) -> Poly {
    match kind {
        NormalFormKind::Power => Poly::monomial(a, d),
        NormalFormKind::Chebyshev => chebyshev(d).scale(C64::new(sign as f64, 0.0)),
    }
}

/// `f = σ∘zᵈ∘τ` with `τ(z) = z − p`, `p` the only critical point.
pub fn detect_power(f: &Poly, tol: &ToleranceContext) -> Option<NormalFormWitness> {
    let d = f.degree();
    if d < 2 {
        return None;
    }
    let lead = f.leading();
    let p = -f.coeff(d - 1) / (lead * d as f64);
    let sigma = LinearMap::new(lead, f.eval(p));
    let tau = LinearMap::new(ONE, -p);
    let w = NormalFormWitness {
        kind: NormalFormKind::Power,
        sigma,
        tau,
        degree: d,
        sign: 1,
        degree_g: None,
        sign_g: None,
        a: None,
        residual: 0.0,
    };
    let residual = w.reconstruct().relative_distance(f);
    (residual <= tol.verify).then_some(NormalFormWitness { residual, ..w })
}

/// `f = σ∘(±T_d)∘τ`.
///
/// For `d ≥ 3` the critical points must be simple with exactly two critical
/// values, which fix `σ`; `τ` then follows from the two top coefficients.
/// Among equivalent witnesses the one with sign `+` and `arg τ.a ∈ [0, π)`
/// is returned.
pub fn detect_chebyshev(f: &Poly, tol: &ToleranceContext) -> Option<NormalFormWitness> {
    let d = f.degree();
    if d < 2 {
        return None;
    }
    let nd = f.leading();
    let nd1 = f.coeff(d - 1);
    let finish = |sigma: LinearMap, tau: LinearMap, sign: i8| {
        let w = NormalFormWitness {
            kind: NormalFormKind::Chebyshev,
            sigma,
            tau,
            degree: d,
            sign,
            degree_g: None,
            sign_g: None,
            a: None,
            residual: 0.0,
        };
        let residual = w.reconstruct().relative_distance(f);
        NormalFormWitness { residual, ..w }
    };
    if d == 2 {
        // every quadratic: 2σ_a(z + τ_b)² − σ_a + σ_b
        let sa = nd / 2.0;
        let tb = nd1 / (nd * 2.0);
        let sb = f.eval(-tb) + sa;
        let w = finish(LinearMap::new(sa, sb), LinearMap::new(ONE, tb), 1);
        return (w.residual <= tol.verify).then_some(w);
    }
    let crit = f.critical_points(tol).ok()?;
    if crit.len() != d - 1 || crit.items.iter().any(|&(_, k)| k != 1) {
        return None;
    }
    let values = crit.map(|z| f.eval(z));
    let scale = values.items.iter().map(|v| v.0.norm()).fold(1.0, f64::max);
    let merged = values.merged(1e-6 * scale);
    if merged.len() != 2 {
        return None;
    }
    let (v1, v2) = (merged.items[0].0, merged.items[1].0);
    let sb = (v1 + v2) / 2.0;
    let top = 2f64.powi(d as i32 - 1);
    let mut best: Option<(bool, bool, NormalFormWitness)> = None;
    for sa in [(v1 - v2) / 2.0, (v2 - v1) / 2.0] {
        for sign in [1i8, -1] {
            let base = nd / (sa * sign as f64 * top);
            let r = base.powf(1.0 / d as f64);
            for j in 0..d {
                let ta = r * C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / d as f64);
                let tb = ta * nd1 / (nd * d as f64);
                let w = finish(LinearMap::new(sa, sb), LinearMap::new(ta, tb), sign);
                if w.residual > tol.verify {
                    continue;
                }
                let arg = ta.arg();
                let upper = (0.0..std::f64::consts::PI - 1e-9).contains(&arg);
                let key = (sign == 1, upper);
                let better = match &best {
                    None => true,
                    Some((p, u, b)) => key > (*p, *u) || (key == (*p, *u) && w.residual < b.residual),
                };
                if better {
                    best = Some((key.0, key.1, w));
                }
            }
        }
    }
    best.map(|b| b.2)
}

/// Shared `(σ, τ)` with `f = σ∘zᵈ∘τ` and `g = σ∘(a z^{d′})∘τ`.
pub fn detect_power_pair(f: &Poly, g: &Poly, tol: &ToleranceContext) -> Option<NormalFormWitness> {
    let w = detect_power(f, tol)?;
    let h = g.conjugate(&w.sigma.inverse(), &w.tau.inverse());
    let dd = g.degree();
    if dd < 1 {
        return None;
    }
    let a = h.coeff(dd);
    let pair = NormalFormWitness {
        degree_g: Some(dd),
        a: Some(a),
        ..w.clone()
    };
    let rg = pair.reconstruct_g()?.relative_distance(g);
    (rg <= tol.verify).then_some(NormalFormWitness {
        residual: w.residual.max(rg),
        ..pair
    })
}

/// Shared `(σ, τ)` with `f = σ∘(±T_d)∘τ` and `g = σ∘(±T_{d′})∘τ`, solved
/// from whichever polynomial has degree at least 3.
pub fn detect_chebyshev_pair(f: &Poly, g: &Poly, tol: &ToleranceContext) -> Option<NormalFormWitness> {
    let swap = f.degree() < g.degree();
    let (hi, lo) = if swap { (g, f) } else { (f, g) };
    if lo.degree() < 1 {
        return None;
    }
    let w = detect_chebyshev(hi, tol)?;
    let dl = lo.degree();
    let mut best: Option<(i8, f64)> = None;
    for s in [1i8, -1] {
        let r = chebyshev(dl)
            .scale(C64::new(s as f64, 0.0))
            .conjugate(&w.sigma, &w.tau)
            .relative_distance(lo);
        if best.is_none_or(|b| r < b.1) {
            best = Some((s, r));
        }
    }
    let (s_lo, r_lo) = best?;
    if r_lo > tol.verify {
        return None;
    }
    let residual = w.residual.max(r_lo);
    let (sign, sign_g, degree, degree_g) = if swap {
        (s_lo, w.sign, dl, w.degree)
    } else {
        (w.sign, s_lo, w.degree, dl)
    };
    Some(NormalFormWitness {
        sign,
        sign_g: Some(sign_g),
        degree,
        degree_g: Some(degree_g),
        residual,
        ..w
    })
}

pub fn detect_c1(p: &ParamPoint, tol: &ToleranceContext) -> Option<NormalFormWitness> {
    let c = pi_map(p);
    detect_power_pair(&c.f, &c.g, tol)
}

pub fn detect_c2(p: &ParamPoint, tol: &ToleranceContext) -> Option<NormalFormWitness> {
    let c = pi_map(p);
    detect_chebyshev_pair(&c.f, &c.g, tol)
}

fn check_degrees(d: usize, dd: usize) -> Result<()> {
    use num_integer::Integer;
    if dd < 2 || d <= dd || d.gcd(&dd) != 1 {
        return Err(Error::Invalid(format!(
            "need coprime d > d′ ≥ 2, got ({d}, {dd})"
        )));
    }
    Ok(())
}

/// Translations `b₁` of `σ₁` compatible with `(a₁, a)` on the curve `C₁`:
/// `0`, and `−a₁b₂ᵈ` for every `b₂` with `b₂^{d−d′} = a`.
pub fn c1_translations(d: usize, dd: usize, a1: C64, a: C64) -> Vec<C64> {
    let k = d - dd;
    let mut out = vec![ZERO];
    for b2 in nth_roots(a, k) {
        out.push(-a1 * b2.powu(d as u32));
    }
    out
}

fn nth_roots(z: C64, n: usize) -> Vec<C64> {
    let r = z.powf(1.0 / n as f64);
    (0..n)
        .map(|j| r * C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))
        .collect()
}

/// A point of `C₁(d, d′)`: `f = σ₁∘zᵈ∘σ₂`, `g = σ₁∘(a z^{d′})∘σ₂` in
/// `Σ(d, d′, α)`.
///
/// `σ₂` is solved from `a₁a₂ᵈ = 1` (principal root) and from `b₂ = 0` when
/// `σ₁.b = 0`, otherwise from `b₂^{d−d′} = a` with `a₁b₂ᵈ + b₁ = 0`.
pub fn make_c1_point(d: usize, dd: usize, sigma1: &LinearMap, a: C64, tol: &ToleranceContext) -> Result<ParamPoint> {
    check_degrees(d, dd)?;
    if a == ZERO || sigma1.a == ZERO {
        return Err(Error::Invalid("a and σ₁.a must be nonzero".into()));
    }
    let a1 = sigma1.a;
    let a2 = (ONE / a1).powf(1.0 / d as f64);
    let b2 = if sigma1.b == ZERO {
        ZERO
    } else {
        let scale = sigma1.b.norm().max(1.0);
        nth_roots(a, d - dd)
            .into_iter()
            .find(|&b2| (a1 * b2.powu(d as u32) + sigma1.b).norm() <= tol.verify * scale)
            .ok_or_else(|| {
                Error::Unsolvable(format!(
                    "σ₁.b = {} is not compatible with a = {a}; admissible values: {:?}",
                    sigma1.b,
                    c1_translations(d, dd, a1, a)
                ))
            })?
    };
    let alpha = a1 * a * a2.powu(dd as u32);
    let c = -b2 / a2;
    ParamPoint::new(vec![c; d - 1], vec![c; dd - 1], alpha, d, dd)
}

/// Solutions `b₂` of `s_f·T_d(z) = s_g·T_{d′}(z)`, canonically ordered.
pub fn c2_solutions(d: usize, dd: usize, signs: (i8, i8), tol: &ToleranceContext) -> Result<PointMultiset> {
    check_degrees(d, dd)?;
    let eq = &chebyshev(d).scale(C64::new(signs.0 as f64, 0.0))
        - &chebyshev(dd).scale(C64::new(signs.1 as f64, 0.0));
    eq.roots(tol)
}

/// A point of `C₂(d, d′)`: `f = σ₁∘(s_f T_d)∘σ₂`, `g = σ₁∘(s_g T_{d′})∘σ₂`
/// in `Σ(d, d′, α)`.
///
/// Only `σ₁.a` is taken from the input: `a₂` solves `a₁s_f2^{d−1}a₂ᵈ = 1`
/// (principal root), `b₂` is the `index`-th solution of
/// `s_f T_d(b₂) = s_g T_{d′}(b₂)` and `b₁ = −a₁s_fT_d(b₂)`.
pub fn make_c2_point(
    d: usize,
    dd: usize,
    sigma1: &LinearMap,
    signs: (i8, i8),
    index: usize,
    tol: &ToleranceContext,
) -> Result<ParamPoint> {
    check_degrees(d, dd)?;
    if signs.0.abs() != 1 || signs.1.abs() != 1 {
        return Err(Error::Invalid("signs must be ±1".into()));
    }
    let a1 = sigma1.a;
    if a1 == ZERO {
        return Err(Error::Invalid("σ₁.a must be nonzero".into()));
    }
    let (sf, sg) = (C64::new(signs.0 as f64, 0.0), C64::new(signs.1 as f64, 0.0));
    let sols = c2_solutions(d, dd, signs, tol)?;
    let b2 = sols.items.get(index).map(|s| s.0).ok_or_else(|| {
        Error::Unsolvable(format!(
            "signs ({}, {}) admit {} solutions for b₂, index {index} requested",
            signs.0,
            signs.1,
            sols.len()
        ))
    })?;
    let a2 = (ONE / (a1 * sf * 2f64.powi(d as i32 - 1))).powf(1.0 / d as f64);
    let alpha = a1 * sg * 2f64.powi(dd as i32 - 1) * a2.powu(dd as u32);
    let crit = |k: usize| -> Vec<C64> {
        (1..k)
            .map(|j| (C64::new((std::f64::consts::PI * j as f64 / k as f64).cos(), 0.0) - b2) / a2)
            .collect()
    };
    ParamPoint::new(crit(d), crit(dd), alpha, d, dd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::in_m_residual;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev(2), Poly::from_real(&[-1.0, 0.0, 2.0]));
        assert_eq!(chebyshev(3), Poly::from_real(&[0.0, -3.0, 0.0, 4.0]));
        assert_eq!(chebyshev(6), chebyshev(2).compose(&chebyshev(3)));
        assert_eq!(chebyshev(0), Poly::one());
        assert_eq!(chebyshev(7).leading(), c(64.0, 0.0));
    }

    #[test]
    fn psi_identity() {
        assert!(psi_residual(2) < 1e-12);
        assert!(psi_residual(3) < 1e-12);
        assert!(psi_residual(7) < 1e-10);
    }

    #[test]
    fn power_examples() {
        let f = Poly::from_real(&[0.0, -6.0, 3.0]);
        let w = detect_power(&f, &tol()).unwrap();
        assert!((w.tau.b + ONE).norm() < 1e-15);
        assert!(w.reconstruct().distance(&f) < 1e-14);
        assert!(detect_power(&chebyshev(3), &tol()).is_none());
    }

    #[test]
    fn chebyshev_examples_detect() {
        let w = detect_chebyshev(&chebyshev(4), &tol()).unwrap();
        assert_eq!(w.sign, 1);
        assert!(w.sigma.distance(&LinearMap::identity()) < 1e-10);
        assert!(w.tau.distance(&LinearMap::identity()) < 1e-10);
        assert!(detect_chebyshev(&Poly::from_real(&[0.0, 1.0, 0.0, 0.0, 1.0]), &tol()).is_none());
        assert!(detect_power(&Poly::from_real(&[0.0, 1.0, 0.0, 0.0, 1.0]), &tol()).is_none());
    }

    #[test]
    fn cubic_with_two_critical_values_is_chebyshev() {
        let f = Poly::from_real(&[0.0, 1.0, 0.0, 1.0]);
        let w = detect_chebyshev(&f, &tol()).unwrap();
        assert!(w.reconstruct().relative_distance(&f) < 1e-10);
    }

    #[test]
    fn conjugated_forms() {
        let s = LinearMap::new(c(0.7, -1.3), c(0.2, 0.9));
        for d in 2..=10 {
            let f = Poly::monomial(ONE, d).conjugate(&s.inverse(), &s);
            let w = detect_power(&f, &tol()).unwrap();
            assert!(w.reconstruct().relative_distance(&f) < 1e-8);
            for sign in [1.0, -1.0] {
                let f = chebyshev(d).scale(c(sign, 0.0)).conjugate(&s.inverse(), &s);
                let w = detect_chebyshev(&f, &tol()).unwrap_or_else(|| panic!("d = {d}"));
                assert!(w.reconstruct().relative_distance(&f) < 1e-8);
                let arg = w.tau.a.arg();
                assert!((0.0..std::f64::consts::PI).contains(&arg));
            }
        }
    }

    #[test]
    fn c1_points() {
        let p = make_c1_point(3, 2, &LinearMap::identity(), ONE, &tol()).unwrap();
        assert!(p.x.iter().chain(&p.y).all(|z| z.norm() < 1e-15));
        let p = ParamPoint::power(5, 3, c(0.3, -0.4)).unwrap();
        let w = detect_c1(&p, &tol()).unwrap();
        assert!(w.a.is_some());
        let a = C64::from_polar(1.0, 0.9);
        let a1 = C64::from_polar(1.0, -0.4);
        for b1 in c1_translations(5, 2, a1, a) {
            let p = make_c1_point(5, 2, &LinearMap::new(a1, b1), a, &tol()).unwrap();
            assert!(in_m_residual(&p) < 1e-10);
            assert!(detect_c1(&p, &tol()).is_some());
        }
        assert!(matches!(
            make_c1_point(5, 2, &LinearMap::new(a1, c(0.123, 0.0)), a, &tol()),
            Err(Error::Unsolvable(_))
        ));
    }

    #[test]
    fn c2_point_detected() {
        let s = LinearMap::new(C64::from_polar(1.0, 0.4), ZERO);
        let p = make_c2_point(3, 2, &s, (1, 1), 0, &tol()).unwrap();
        let w = detect_c2(&p, &tol()).unwrap();
        assert_eq!(w.kind, NormalFormKind::Chebyshev);
        let mut q = p.clone();
        q.x[0] += c(1e-3, 0.0);
        assert!(detect_c2(&q, &tol()).is_none());
        assert!(make_c2_point(3, 2, &s, (1, 1), 7, &tol()).is_err());
    }
}
