//! Critical-point coordinates on `Σ(d, d′, α)` and the endomorphism `D_{d,d′}`.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{matching_distance, PointMultiset, Poly, C64, ONE};
use crate::tolerance::ToleranceContext;

/// A point `(x, y, α)` of `ℂ^{d−1} × ℂ^{d′−1} × ℂ*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub x: Vec<C64>,
    pub y: Vec<C64>,
    pub alpha: C64,
    pub d: usize,
    pub dd: usize,
}

/// `f` monic of degree `d`, `g` of degree `d′` with leading coefficient `α`,
/// both vanishing at 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaCouple {
    pub f: Poly,
    pub g: Poly,
    pub alpha: C64,
    pub d: usize,
    pub dd: usize,
}

impl ParamPoint {
    pub fn new(x: Vec<C64>, y: Vec<C64>, alpha: C64, d: usize, dd: usize) -> Result<Self> {
        let p = ParamPoint { x, y, alpha, d, dd };
        p.validate()?;
        Ok(p)
    }

    /// `(0, 0, α)`: the power pair `(zᵈ, α z^{d′})`.
    pub fn power(d: usize, dd: usize, alpha: C64) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); d - 1], vec![C64::new(0.0, 0.0); dd - 1], alpha, d, dd)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dd < 2 || self.d <= self.dd {
            return Err(Error::Invalid(format!(
                "need d > d′ ≥ 2, got d = {}, d′ = {}",
                self.d, self.dd
            )));
        }
        if self.d.gcd(&self.dd) != 1 {
            return Err(Error::Invalid(format!("d = {} and d′ = {} are not coprime", self.d, self.dd)));
        }
        if self.x.len() != self.d - 1 || self.y.len() != self.dd - 1 {
            return Err(Error::Invalid("critical point counts must be d − 1 and d′ − 1".into()));
        }
        if self.alpha.norm() == 0.0 || !self.alpha.is_finite() {
            return Err(Error::Invalid("α must be finite and nonzero".into()));
        }
        Ok(())
    }

    /// Largest modulus among all coordinates.
    pub fn magnitude(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .chain(std::iter::once(&self.alpha))
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|z| z.is_finite()) && self.alpha.is_finite()
    }

    /// Distance that ignores the order of critical points within each block.
    pub fn distance(&self, other: &ParamPoint) -> f64 {
        matching_distance(&self.x, &other.x)
            .max(matching_distance(&self.y, &other.y))
            .max((self.alpha - other.alpha).norm())
    }
}

/// `c·∫₀ᶻ ∏(t − pᵢ) dt`
fn primitive(points: &[C64], c: C64) -> Poly {
    Poly::from_roots(points).integral().scale(c)
}

/// The couple with `C_f = x`, `C_g = y`: `f = d·∫₀ᶻ∏(t − xᵢ)`,
/// `g = d′α·∫₀ᶻ∏(t − yⱼ)`.
pub fn pi_map(p: &ParamPoint) -> SigmaCouple {
    let (f, g) = pi_parts(&p.x, &p.y, p.alpha);
    SigmaCouple {
        f,
        g,
        alpha: p.alpha,
        d: p.d,
        dd: p.dd,
    }
}

fn pi_parts(x: &[C64], y: &[C64], alpha: C64) -> (Poly, Poly) {
    let d = x.len() + 1;
    let dd = y.len() + 1;
    (
        primitive(x, C64::new(d as f64, 0.0)),
        primitive(y, alpha * dd as f64),
    )
}

/// `D(x, y, α) = (g(x), f(y), αᵈ)`.
pub fn dd_endo(p: &ParamPoint) -> ParamPoint {
    let (x, y, alpha) = endo_parts(&p.x, &p.y, p.alpha);
    ParamPoint {
        x,
        y,
        alpha,
        d: p.d,
        dd: p.dd,
    }
}

fn endo_parts(x: &[C64], y: &[C64], alpha: C64) -> (Vec<C64>, Vec<C64>, C64) {
    let (f, g) = pi_parts(x, y, alpha);
    let d = x.len() + 1;
    (
        x.iter().map(|&z| g.eval(z)).collect(),
        y.iter().map(|&z| f.eval(z)).collect(),
        alpha.powu(d as u32),
    )
}

/// Relative coefficient distance between `f*∘g` and `g*∘f`.
pub fn in_m_residual(p: &ParamPoint) -> f64 {
    m_residual_parts(&p.x, &p.y, p.alpha)
}

fn m_residual_parts(x: &[C64], y: &[C64], alpha: C64) -> f64 {
    let (f, g) = pi_parts(x, y, alpha);
    let (xs, ys, a) = endo_parts(x, y, alpha);
    let (fs, gs) = pi_parts(&xs, &ys, a);
    let r = fs.compose(&g).relative_distance(&gs.compose(&f));
    if r.is_finite() {
        r
    } else {
        f64::INFINITY
    }
}

/// Horizons of the finite membership test for `N(d, d′)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub n_max: usize,
    pub k: usize,
    pub m: usize,
    /// Composite couples with `dᵏ` above this are skipped and flagged.
    pub degree_cap: usize,
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon {
            n_max: 4,
            k: 2,
            m: 1,
            degree_cap: 36,
        }
    }
}

/// One residual of the finite `N(d, d′)` test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipCheck {
    /// `"P"` for `Dⁿ(p) ∈ M(d, d′)`, `"tilde"` for the composite couples.
    pub kind: String,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NVerdict {
    pub pass: bool,
    pub worst: f64,
    pub threshold: f64,
    pub checks: Vec<MembershipCheck>,
    /// Composite degrees skipped by the degree cap.
    pub skipped: Vec<(usize, usize)>,
}

/// Finite-horizon test of the two conditions defining `N(d, d′)`:
/// `Dⁿ(p) ∈ M` for `n ≤ n_max`, and for `1 ≤ k ≤ K`, `0 ≤ m ≤ M` the
/// composite couple `(f̃, g̃) = (f_{k+m−1}∘…∘f_m, g_{k+m−1}∘…∘g_m)` in
/// `Σ(dᵏ, d′ᵏ, α̃)` satisfies `D̃ⁿ ∈ M(dᵏ, d′ᵏ)` for `n ∈ {0, 1}`.
///
/// Passes when every residual is at most `tol.verify`.
pub fn in_n_truncated(p: &ParamPoint, h: &Horizon, tol: &ToleranceContext) -> Result<NVerdict> {
    p.validate()?;
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let horizon = h.n_max.max(h.k + h.m);
    let (orbit, _) = orbit(p, horizon);
    for (n, q) in orbit.iter().enumerate().take(h.n_max + 1) {
        checks.push(MembershipCheck {
            kind: "P".into(),
            n,
            k: 0,
            m: 0,
            residual: in_m_residual(q),
        });
    }
    for k in 1..=h.k {
        let dt = p.d.pow(k as u32);
        if dt > h.degree_cap {
            skipped.push((k, dt));
            continue;
        }
        for m in 0..=h.m {
            if m + k > orbit.len() {
                checks.push(MembershipCheck {
                    kind: "tilde".into(),
                    n: 0,
                    k,
                    m,
                    residual: f64::INFINITY,
                });
                continue;
            }
            let (x, y, alpha) = tilde_point(&orbit[m..m + k], p.d, p.dd, p.alpha, m, tol)?;
            let (mut x, mut y, mut a) = (x, y, alpha);
            for n in 0..=1 {
                checks.push(MembershipCheck {
                    kind: "tilde".into(),
                    n,
                    k,
                    m,
                    residual: m_residual_parts(&x, &y, a),
                });
                if n == 0 {
                    let next = endo_parts(&x, &y, a);
                    x = next.0;
                    y = next.1;
                    a = next.2;
                }
            }
        }
    }
    let worst = checks
        .iter()
        .map(|c| if c.residual.is_nan() { f64::INFINITY } else { c.residual })
        .fold(0.0, f64::max);
    Ok(NVerdict {
        pass: worst <= tol.verify,
        worst,
        threshold: tol.verify,
        checks,
        skipped,
    })
}

/// Critical points and `α̃` of the composite couple built from consecutive
/// orbit points `D^m(p), …, D^{m+k−1}(p)`.
fn tilde_point(
    block: &[ParamPoint],
    d: usize,
    dd: usize,
    alpha: C64,
    m: usize,
    tol: &ToleranceContext,
) -> Result<(Vec<C64>, Vec<C64>, C64)> {
    let k = block.len();
    let mut cf: Vec<C64> = block[0].x.clone();
    let mut cg: Vec<C64> = block[0].y.clone();
    let first = pi_map(&block[0]);
    let (mut ftil, mut gtil) = (first.f, first.g);
    for q in &block[1..] {
        let c = pi_map(q);
        // C_{A∘B} = C_B ⊎ B⁻¹(C_A)
        for &v in &q.x {
            cf.extend(ftil.add_constant(-v).roots(tol)?.expanded());
        }
        for &v in &q.y {
            cg.extend(gtil.add_constant(-v).roots(tol)?.expanded());
        }
        ftil = c.f.compose(&ftil);
        gtil = c.g.compose(&gtil);
    }
    let mut e: u64 = 0;
    for i in 0..k {
        e += (d as u64).pow(i as u32) * (dd as u64).pow((k - 1 - i) as u32);
    }
    e *= (d as u64).pow(m as u32);
    let at = alpha.powu(e as u32);
    debug_assert!((gtil.leading() - at).norm() <= 1e-6 * at.norm().max(1.0));
    Ok((cf, cg, at))
}

/// Forward orbit `p, D(p), …, Dⁿ(p)`; the flag is set when the orbit was
/// cut short because coordinates overflowed.
pub fn orbit(p: &ParamPoint, n: usize) -> (Vec<ParamPoint>, bool) {
    let mut out = vec![p.clone()];
    for _ in 0..n {
        let next = dd_endo(out.last().unwrap());
        if !next.is_finite() || next.magnitude() > 1e150 {
            return (out, true);
        }
        out.push(next);
    }
    (out, false)
}

/// First repetition `Dᵐ⁺ᵏ(p) = Dᵐ(p)` along the orbit, as `(m, k)`.
pub fn detect_periodicity(orbit: &[ParamPoint], tol: f64) -> Option<(usize, usize)> {
    for j in 1..orbit.len() {
        for i in 0..j {
            let scale = orbit[i].magnitude().max(1.0);
            if orbit[i].distance(&orbit[j]) <= tol * scale {
                return Some((i, j - i));
            }
        }
    }
    None
}

/// Critical-point read-back: `(C_f, C_g)` of a couple.
pub fn critical_readback(c: &SigmaCouple, tol: &ToleranceContext) -> Result<(PointMultiset, PointMultiset)> {
    Ok((c.f.critical_points(tol)?, c.g.critical_points(tol)?))
}

impl SigmaCouple {
    /// Largest violation of the `Σ(d, d′, α)` normalization.
    pub fn gauge_residual(&self) -> f64 {
        (self.f.leading() - ONE)
            .norm()
            .max((self.g.leading() - self.alpha).norm())
            .max(self.f.coeff(0).norm())
            .max(self.g.coeff(0).norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn pi_map_examples() {
        let p = ParamPoint::new(vec![c(0.0, 0.0)], vec![c(0.0, 0.0)], ONE, 3, 2);
        assert!(p.is_err());
        let p = ParamPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0)], ONE, 3, 2).unwrap();
        let s = pi_map(&p);
        assert!(s.f.distance(&Poly::from_real(&[0.0, 0.0, -1.5, 1.0])) < 1e-15);
        assert!(s.g.distance(&Poly::from_real(&[0.0, 0.0, 1.0])) < 1e-15);
        assert!(s.gauge_residual() < 1e-15);

        let f = primitive(&[ONE], c(2.0, 0.0));
        assert!(f.distance(&Poly::from_real(&[0.0, -2.0, 1.0])) < 1e-15);
        let g = primitive(&[c(0.0, 0.0), c(0.0, 0.0)], c(2.0, 0.0) * 3.0);
        assert!(g.distance(&Poly::monomial(c(2.0, 0.0), 3)) < 1e-15);
    }

    #[test]
    fn endo_examples() {
        let p = ParamPoint::power(3, 2, ONE).unwrap();
        assert_eq!(dd_endo(&p), p);
        let p = ParamPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0)], ONE, 3, 2).unwrap();
        let q = dd_endo(&p);
        assert!(q.distance(&p) < 1e-15);
        let p = ParamPoint::new(
            vec![c(0.3, 0.1), c(-0.2, 0.5)],
            vec![c(0.7, -0.4)],
            C64::from_polar(1.0, 0.7),
            3,
            2,
        )
        .unwrap();
        assert!((dd_endo(&p).alpha.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn readback_round_trip() {
        let x = vec![c(0.3, 0.1), c(-0.2, 0.5), c(1.0, -1.0), c(0.3, 0.1)];
        let y = vec![c(0.7, -0.4), c(0.0, 2.0)];
        let p = ParamPoint::new(x.clone(), y.clone(), c(0.5, 0.5), 5, 3).unwrap();
        let (cf, cg) = critical_readback(&pi_map(&p), &tol()).unwrap();
        assert!(cf.distance(&PointMultiset::from_points(&x, 1e-9)) < 1e-7);
        assert!(cg.distance(&PointMultiset::from_points(&y, 1e-9)) < 1e-7);
    }

    #[test]
    fn power_point_in_m_and_n() {
        let p = ParamPoint::power(3, 2, c(0.6, 0.8)).unwrap();
        assert_eq!(in_m_residual(&p), 0.0);
        let v = in_n_truncated(&p, &Horizon::default(), &tol()).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn jittered_power_point_fails() {
        let mut p = ParamPoint::power(3, 2, ONE).unwrap();
        p.x[0] += c(1e-2, 0.0);
        let v = in_n_truncated(&p, &Horizon::default(), &tol()).unwrap();
        assert!(!v.pass);
        assert!(v.worst > 1e-5);
    }

    #[test]
    fn periodicity() {
        let p = ParamPoint::power(3, 2, ONE).unwrap();
        let (o, overflow) = orbit(&p, 4);
        assert!(!overflow);
        assert_eq!(detect_periodicity(&o, 1e-12), Some((0, 1)));
        // α² = 1 keeps α³ = α
        let p = ParamPoint::power(3, 2, -ONE).unwrap();
        assert_eq!(detect_periodicity(&orbit(&p, 3).0, 1e-12), Some((0, 1)));
        let p = ParamPoint::new(
            vec![c(0.31, 0.1), c(-0.2, 0.45)],
            vec![c(0.7, -0.4)],
            C64::from_polar(1.0, 0.7),
            3,
            2,
        )
        .unwrap();
        let (o, _) = orbit(&p, 5);
        assert_eq!(detect_periodicity(&o, 1e-9), None);
    }
}
