//! Complex polynomials in ascending coefficient order.
//!
//! Besides the ring operations this module provides functional composition,
//! affine conjugation and compositional left division (`Φ = R∘P`).

mod linear;
mod multiset;
mod roots;

pub use linear::LinearMap;
pub use multiset::{matching_distance, PointMultiset};
pub use roots::{roots, roots_with, RootOptions};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::ToleranceContext;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A polynomial `c₀ + c₁z + … + cₙzⁿ` with complex coefficients.
///
/// The coefficient vector never carries exact trailing zeros, so `degree()`
/// is the index of the last stored coefficient. The zero polynomial is stored
/// as an empty vector and reports degree 0.
#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<C64>", into = "Vec<C64>")]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl From<Vec<C64>> for Poly {
    fn from(coeffs: Vec<C64>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<C64> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(ONE)
    }

    pub fn constant(c: C64) -> Self {
        Poly::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Poly::new(vec![ZERO, ONE])
    }

    /// `c·zᵏ`
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Monic polynomial `∏(z − rᵢ)`.
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![ONE];
        for &r in roots {
            coeffs.push(ZERO);
            for k in (1..coeffs.len()).rev() {
                coeffs[k] = coeffs[k - 1] - r * coeffs[k];
            }
            coeffs[0] = -r * coeffs[0];
        }
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `zᵏ` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    /// Largest coefficient modulus.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// `Σ |cᵢ| rⁱ`, the natural scale for rounding errors of `eval` at `|z| = r`.
    pub fn eval_abs(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn integral(&self) -> Poly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k as f64 + 1.0)),
        );
        Poly::new(coeffs)
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// `self ∘ q`
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &acc * q;
            acc = acc.add_constant(c);
        }
        acc
    }

    pub fn add_constant(&self, c: C64) -> Poly {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(c);
        } else {
            coeffs[0] += c;
        }
        Poly::new(coeffs)
    }

    /// `σ ∘ self ∘ τ`
    pub fn conjugate(&self, sigma: &LinearMap, tau: &LinearMap) -> Poly {
        self.compose(&tau.to_poly())
            .scale(sigma.a)
            .add_constant(sigma.b)
    }

    /// Zeroes coefficients below `tol · max(1, ‖p‖∞)` and trims the tail.
    pub fn cleaned(&self, tol: f64) -> Poly {
        let thr = tol * self.norm_inf().max(1.0);
        Poly::new(
            self.coeffs
                .iter()
                .map(|&c| if c.norm() <= thr { ZERO } else { c })
                .collect(),
        )
    }

    /// Largest coefficientwise difference.
    pub fn distance(&self, other: &Poly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Coefficientwise difference scaled by `max(1, ‖self‖∞, ‖other‖∞)`.
    pub fn relative_distance(&self, other: &Poly) -> f64 {
        let scale = self.norm_inf().max(other.norm_inf()).max(1.0);
        self.distance(other) / scale
    }

    /// Upper estimate of the root moduli: `max_k |c_{n−k}/c_n|^{1/k}`.
    ///
    /// Every root lies within twice this value (Fujiwara).
    pub fn root_radius(&self) -> f64 {
        let n = self.degree();
        if n == 0 {
            return 0.0;
        }
        let lead = self.leading().norm();
        (1..=n)
            .map(|k| (self.coeffs[n - k].norm() / lead).powf(1.0 / k as f64))
            .fold(0.0, f64::max)
    }

    /// Splits `self = σ ∘ q` with `q` monic and `q(0) = 0`.
    pub fn monic_gauge(&self) -> (Poly, LinearMap) {
        let lead = self.leading();
        let c0 = self.coeff(0);
        let q = self.add_constant(-c0).scale(lead.inv());
        let mut coeffs = q.coeffs;
        if let Some(last) = coeffs.last_mut() {
            *last = ONE;
        }
        if !coeffs.is_empty() {
            coeffs[0] = ZERO;
        }
        (Poly::new(coeffs), LinearMap { a: lead, b: c0 })
    }

    pub fn critical_points(&self, tol: &ToleranceContext) -> Result<PointMultiset> {
        if self.degree() < 1 {
            return Err(Error::Degenerate(
                "critical points need degree at least 1".into(),
            ));
        }
        if self.degree() == 1 {
            return Ok(PointMultiset::default());
        }
        roots(&self.derivative(), tol)
    }

    pub fn roots(&self, tol: &ToleranceContext) -> Result<PointMultiset> {
        roots(self, tol)
    }

    /// Solves `self = R ∘ p` for `R`.
    ///
    /// The fit is accepted when the coefficientwise residual of `R∘p`
    /// relative to `self` is at most `tol.verify`; see
    /// [`left_divide_with_residual`].
    pub fn left_divide(&self, p: &Poly, tol: &ToleranceContext) -> Option<Poly> {
        left_divide_with_residual(self, p).and_then(|(r, res)| (res <= tol.verify).then_some(r))
    }
}

/// The quotient `R` with `Φ ≈ R∘P` and its relative residual, without a verdict.
///
/// Two fits are computed and the one with the smaller residual wins: a
/// least-squares solve at `deg Φ + 1` roots of unity on a circle sized from
/// the root radii, and the base-`P` expansion by repeated Euclidean division.
pub fn left_divide_with_residual(phi: &Poly, p: &Poly) -> Option<(Poly, f64)> {
    let k = p.degree();
    if k == 0 || !phi.degree().is_multiple_of(k) {
        return None;
    }
    let scale = phi.norm_inf().max(f64::MIN_POSITIVE);
    let residual = |r: &Poly| r.compose(p).distance(phi) / scale;
    let mut best: Option<(Poly, f64)> = None;
    for r in [divide_by_nodes(phi, p), divide_by_expansion(phi, p)]
        .into_iter()
        .flatten()
    {
        let res = residual(&r);
        if best.as_ref().is_none_or(|b| res < b.1) {
            best = Some((r, res));
        }
    }
    best
}

fn divide_by_nodes(phi: &Poly, p: &Poly) -> Option<Poly> {
    let total = phi.degree();
    let n = total / p.degree();
    if n == 0 {
        return Some(phi.clone());
    }
    let nodes = total + 1;
    let rho = p.root_radius().max(phi.root_radius()).max(1.0);
    let zs: Vec<C64> = (0..nodes)
        .map(|j| C64::from_polar(rho, std::f64::consts::TAU * j as f64 / nodes as f64))
        .collect();
    let ws: Vec<C64> = zs.iter().map(|&z| p.eval(z)).collect();
    let s = ws.iter().map(|w| w.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let a = DMatrix::from_fn(nodes, n + 1, |i, j| (ws[i] / s).powu(j as u32));
    let b = DVector::from_iterator(nodes, zs.iter().map(|&z| phi.eval(z)));
    let y = a.svd(true, true).solve(&b, 1e-14).ok()?;
    Some(Poly::new(
        y.iter()
            .enumerate()
            .map(|(j, &c)| c / s.powi(j as i32))
            .collect(),
    ))
}

/// `Φ = Σ rⱼ Pʲ` read off from successive remainders modulo `P`.
fn divide_by_expansion(phi: &Poly, p: &Poly) -> Option<Poly> {
    let n = phi.degree() / p.degree();
    let mut rest = phi.clone();
    let mut r = Vec::with_capacity(n + 1);
    for _ in 0..n {
        let (q, rem) = rest.div_rem(p);
        r.push(rem.coeff(0));
        rest = q;
    }
    r.push(rest.coeff(0));
    Some(Poly::new(r))
}

impl Poly {
    /// Euclidean division `self = q·p + r` with `deg r < deg p`.
    pub fn div_rem(&self, p: &Poly) -> (Poly, Poly) {
        let k = p.degree();
        if self.degree() < k || self.is_zero() {
            return (Poly::zero(), self.clone());
        }
        let lead = p.leading().inv();
        let mut rem = self.coeffs.clone();
        let mut q = vec![ZERO; self.degree() - k + 1];
        for i in (0..q.len()).rev() {
            let c = rem[i + k] * lead;
            q[i] = c;
            for j in 0..=k {
                rem[i + j] -= c * p.coeffs[j];
            }
        }
        rem.truncate(k);
        (Poly::new(q), Poly::new(rem))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-ONE)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn t3() -> Poly {
        Poly::from_real(&[0.0, -3.0, 0.0, 4.0])
    }

    #[test]
    fn eval_examples() {
        let sq = Poly::monomial(ONE, 2);
        assert!((sq.eval(c(1.0, 1.0)) - c(0.0, 2.0)).norm() < 1e-15);
        assert_eq!(Poly::zero().eval(c(3.0, -2.0)), ZERO);
        let v = t3().eval(c((PI / 9.0).cos(), 0.0));
        assert!((v - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn compose_examples() {
        let sq = Poly::monomial(ONE, 2);
        let shift = Poly::from_real(&[1.0, 1.0]);
        assert_eq!(sq.compose(&shift), Poly::from_real(&[1.0, 2.0, 1.0]));

        let t2 = Poly::from_real(&[-1.0, 0.0, 2.0]);
        let t6 = Poly::from_real(&[-1.0, 0.0, 18.0, 0.0, -48.0, 0.0, 32.0]);
        assert!(t2.compose(&t3()).distance(&t6) < 1e-12);

        let z3 = Poly::monomial(ONE, 3);
        assert_eq!(z3.compose(&sq), sq.compose(&z3));
        assert_eq!(z3.compose(&sq), Poly::monomial(ONE, 6));
    }

    #[test]
    fn conjugate_examples() {
        let sq = Poly::monomial(ONE, 2);
        let id = LinearMap::identity();
        assert_eq!(sq.conjugate(&id, &id), sq);
        let down = LinearMap::new(ONE, c(-1.0, 0.0));
        let up = LinearMap::new(ONE, ONE);
        assert_eq!(sq.conjugate(&down, &up), Poly::from_real(&[0.0, 2.0, 1.0]));

        // σ(z) = (z+1)/2, τ(z) = 2z − 1 applied to T₂, checked pointwise.
        let t2 = Poly::from_real(&[-1.0, 0.0, 2.0]);
        let sigma = LinearMap::new(c(0.5, 0.0), c(0.5, 0.0));
        let tau = LinearMap::new(c(2.0, 0.0), c(-1.0, 0.0));
        let q = t2.conjugate(&sigma, &tau);
        for k in 0..12 {
            let z = C64::from_polar(1.3, k as f64);
            let direct = sigma.apply(t2.eval(tau.apply(z)));
            assert!((q.eval(z) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn left_divide_examples() {
        let tol = ToleranceContext::default();
        let z6 = Poly::monomial(ONE, 6);
        let z2 = Poly::monomial(ONE, 2);
        let r = z6.left_divide(&z2, &tol).unwrap();
        assert!(r.distance(&Poly::monomial(ONE, 3)) < 1e-10);

        let p = Poly::from_real(&[1.0, 0.0, 1.0]);
        let phi = &p.pow(2) + &Poly::constant(c(2.0, 0.0));
        let r = phi.left_divide(&p, &tol).unwrap();
        assert!(r.distance(&Poly::from_real(&[2.0, 0.0, 1.0])) < 1e-10);

        assert!(Poly::monomial(ONE, 3).left_divide(&z2, &tol).is_none());
    }

    #[test]
    fn left_divide_rejects_non_composite() {
        let tol = ToleranceContext::default();
        let phi = Poly::from_real(&[0.0, 1.0, 0.0, 0.0, 1.0]);
        let p = Poly::from_real(&[0.0, 0.0, 1.0]);
        assert!(phi.left_divide(&p, &tol).is_none());
    }

    #[test]
    fn monic_gauge_splits() {
        let q = Poly::new(vec![c(1.0, 2.0), c(0.5, 0.0), c(2.0, -1.0)]);
        let (m, sigma) = q.monic_gauge();
        assert_eq!(m.leading(), ONE);
        assert_eq!(m.coeff(0), ZERO);
        assert!(m.conjugate(&sigma, &LinearMap::identity()).distance(&q) < 1e-14);
    }

    #[test]
    fn from_roots_and_integral() {
        let p = Poly::from_roots(&[ONE, -ONE]);
        assert_eq!(p, Poly::from_real(&[-1.0, 0.0, 1.0]));
        let i = p.integral();
        assert!(i.derivative().distance(&p) < 1e-15);
        assert_eq!(i.coeff(0), ZERO);
    }

    #[test]
    fn serde_shape() {
        let p = Poly::new(vec![c(1.0, 0.0), c(0.0, -2.0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[1.0,0.0],[0.0,-2.0]]");
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
