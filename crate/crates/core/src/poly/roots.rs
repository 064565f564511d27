//! Aberth–Ehrlich root finding with multiplicity clustering.

use super::{PointMultiset, Poly, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::ToleranceContext;

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_iter: usize,
    /// Coarsest single-linkage radius tried when grouping approximations.
    pub coarse_radius: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_iter: 200,
            coarse_radius: 1e-1,
        }
    }
}

pub fn roots(p: &Poly, tol: &ToleranceContext) -> Result<PointMultiset> {
    roots_with(p, tol, &RootOptions::default())
}

pub fn roots_with(p: &Poly, tol: &ToleranceContext, opts: &RootOptions) -> Result<PointMultiset> {
    if p.degree() == 0 {
        return Err(Error::Degenerate("roots of a constant polynomial".into()));
    }
    if p.coeffs().iter().any(|c| !c.is_finite()) {
        return Err(Error::Invalid("non-finite coefficient".into()));
    }
    let zeros = p.coeffs().iter().take_while(|&&c| c == ZERO).count();
    let q = Poly::new(p.coeffs()[zeros..].to_vec());
    let mut items: Vec<(C64, usize)> = Vec::new();
    if zeros > 0 {
        items.push((ZERO, zeros));
    }
    match q.degree() {
        0 => {}
        1 => items.push((-q.coeff(0) / q.coeff(1), 1)),
        n => {
            let (approx, iterations) = aberth(&q, opts.max_iter);
            if approx.iter().any(|z| !z.is_finite()) {
                return Err(Error::NonConvergence {
                    iterations,
                    worst: f64::INFINITY,
                    residuals: vec![],
                });
            }
            let clusters = cluster(&q, &approx, opts.coarse_radius, tol);
            debug_assert_eq!(clusters.iter().map(|c| c.1).sum::<usize>(), n);
            let mut residuals = Vec::with_capacity(clusters.len());
            for &(z, k) in &clusters {
                residuals.push(multiplicity_residual(&q, z, k));
            }
            let worst = residuals.iter().copied().fold(0.0, f64::max);
            if worst > tol.verify {
                return Err(Error::NonConvergence {
                    iterations,
                    worst,
                    residuals,
                });
            }
            items.extend(clusters);
        }
    }
    Ok(PointMultiset::new(items))
}

/// Simultaneous Aberth–Ehrlich iteration. Returns the approximations and
/// the number of sweeps used.
fn aberth(p: &Poly, max_iter: usize) -> (Vec<C64>, usize) {
    let n = p.degree();
    let dp = p.derivative();
    let center = -p.coeff(n - 1) / (p.leading() * n as f64);
    let shifted = p.compose(&Poly::new(vec![center, super::ONE]));
    let mut radius = shifted.root_radius();
    if radius == 0.0 {
        return (vec![center; n], 0);
    }
    if !radius.is_finite() {
        radius = 1.0;
    }
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            center + C64::from_polar(radius * (1.0 + 0.05 * (k % 3) as f64), theta)
        })
        .collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON;
    let mut sweeps = 0;
    for it in 0..max_iter {
        sweeps = it + 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let zi = z[i];
            let pv = p.eval(zi);
            let scale = p.eval_abs(zi.norm());
            if pv.norm() <= 4.0 * n as f64 * eps * scale {
                done[i] = true;
                continue;
            }
            let dv = dp.eval(zi);
            let ratio = if dv == ZERO {
                C64::new(1e-8 * zi.norm().max(1.0), 0.0)
            } else {
                pv / dv
            };
            let mut sum = ZERO;
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let diff = zi - zj;
                    if diff != ZERO {
                        sum += diff.inv();
                    }
                }
            }
            let denom = super::ONE - ratio * sum;
            let w = if denom == ZERO { ratio } else { ratio / denom };
            z[i] = zi - w;
            if w.norm() <= eps * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    (z, sweeps)
}

/// Taylor coefficients of `p` at `c` and their absolute scales
/// `Σᵢ |cᵢ| C(i,j) rʲ⁻ⁱ` with `r = max(1, |c|)`.
fn taylor(p: &Poly, c: C64) -> (Vec<C64>, Vec<f64>) {
    let mut t: Vec<C64> = p.coeffs().to_vec();
    let mut s: Vec<f64> = p.coeffs().iter().map(|x| x.norm()).collect();
    let r = c.norm().max(1.0);
    let n = t.len();
    for j in 0..n {
        for i in (j + 1..n).rev() {
            let (lo, hi) = (t[i - 1], t[i]);
            t[i - 1] = lo + c * hi;
            s[i - 1] += r * s[i];
        }
    }
    (t, s)
}

/// `max_{j<k} |p⁽ʲ⁾(z)/j!| / scale_j`, zero exactly when `z` is a root of
/// multiplicity at least `k`.
pub(crate) fn multiplicity_residual(p: &Poly, z: C64, k: usize) -> f64 {
    let (t, s) = taylor(p, z);
    (0..k)
        .map(|j| t[j].norm() / s[j].max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn link(points: &[C64], idx: &[usize], radius: f64) -> Vec<Vec<usize>> {
    let m = idx.len();
    let mut label: Vec<usize> = (0..m).collect();
    // plain O(m²) relabelling; m is the size of one cluster
    let mut changed = true;
    while changed {
        changed = false;
        for a in 0..m {
            for b in a + 1..m {
                let (za, zb) = (points[idx[a]], points[idx[b]]);
                let scale = 1f64.max(za.norm()).max(zb.norm());
                if (za - zb).norm() <= radius * scale && label[a] != label[b] {
                    let l = label[a].min(label[b]);
                    label[a] = l;
                    label[b] = l;
                    changed = true;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (a, &l) in label.iter().enumerate() {
        match groups.iter_mut().find(|g| g.0 == l) {
            Some(g) => g.1.push(idx[a]),
            None => groups.push((l, vec![idx[a]])),
        }
    }
    groups.into_iter().map(|g| g.1).collect()
}

fn cluster(p: &Poly, approx: &[C64], coarse: f64, tol: &ToleranceContext) -> Vec<(C64, usize)> {
    let all: Vec<usize> = (0..approx.len()).collect();
    let mut stack: Vec<(Vec<usize>, f64)> = link(approx, &all, coarse)
        .into_iter()
        .map(|g| (g, coarse))
        .collect();
    let mut out = Vec::new();
    while let Some((group, radius)) = stack.pop() {
        let k = group.len();
        let centroid = group.iter().map(|&i| approx[i]).sum::<C64>() / k as f64;
        if k == 1 {
            out.push((polish(p, approx[group[0]], 1), 1));
            continue;
        }
        let polished = polish(p, centroid, k);
        if multiplicity_residual(p, polished, k) <= tol.rel || radius <= tol.cluster {
            out.push((polished, k));
            continue;
        }
        let finer = radius / 10.0;
        for g in link(approx, &group, finer) {
            stack.push((g, finer));
        }
    }
    out
}

/// Newton on `p⁽ᵏ⁻¹⁾`, keeping a step only when it lowers the residual.
fn polish(p: &Poly, z0: C64, k: usize) -> C64 {
    let mut z = z0;
    let mut best = multiplicity_residual(p, z, k);
    for _ in 0..4 {
        let (t, _) = taylor(p, z);
        if k >= t.len() || t[k] == ZERO {
            break;
        }
        let step = t[k - 1] / (t[k] * k as f64);
        let cand = z - step;
        let r = multiplicity_residual(p, cand, k);
        if !(r < best) {
            break;
        }
        z = cand;
        best = r;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ONE;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> ToleranceContext {
        ToleranceContext::default()
    }

    #[test]
    fn simple_pair() {
        let r = roots(&Poly::from_real(&[-1.0, 0.0, 1.0]), &tol()).unwrap();
        let want = PointMultiset::new(vec![(c(1.0, 0.0), 1), (c(-1.0, 0.0), 1)]);
        assert!(r.distance(&want) < 1e-12);
    }

    #[test]
    fn triple_root() {
        let r = roots(&Poly::from_real(&[-1.0, 3.0, -3.0, 1.0]), &tol()).unwrap();
        assert_eq!(r.items.len(), 1);
        assert_eq!(r.items[0].1, 3);
        assert!((r.items[0].0 - ONE).norm() < 1e-10);
    }

    #[test]
    fn zero_deflation() {
        // z²(z − 1)
        let r = roots(&Poly::from_real(&[0.0, 0.0, -1.0, 1.0]), &tol()).unwrap();
        let want = PointMultiset::new(vec![(ZERO, 2), (ONE, 1)]);
        assert!(r.distance(&want) < 1e-12);
        assert_eq!(r.items.len(), 2);
    }

    #[test]
    fn mixed_multiplicities() {
        let a = c(0.3, -1.2);
        let b = c(-2.0, 0.5);
        let p = &Poly::from_roots(&[a, a, a, a]) * &Poly::from_roots(&[b, b, ONE]);
        let r = roots(&p, &tol()).unwrap();
        let want = PointMultiset::new(vec![(a, 4), (b, 2), (ONE, 1)]);
        assert_eq!(r.len(), 3);
        assert!(r.distance(&want) < 1e-8, "{r:?}");
    }

    #[test]
    fn constant_is_degenerate() {
        assert!(matches!(
            roots(&Poly::constant(ONE), &tol()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn high_degree_roots_of_unity() {
        let mut coeffs = vec![ZERO; 41];
        coeffs[0] = -ONE;
        coeffs[40] = ONE;
        let r = roots(&Poly::new(coeffs), &tol()).unwrap();
        assert_eq!(r.len(), 40);
        for &(z, k) in &r.items {
            assert_eq!(k, 1);
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }
}
