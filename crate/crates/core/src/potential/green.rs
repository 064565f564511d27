//! Green functions with pole at infinity: escape rate for polynomial
//! filled Julia sets and a relaxation solver for raster compacts.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::AtomicMeasure;
use super::pixel::{sidecar_path, BoundingBox, PixelSet};
use crate::error::{Error, Result};
use crate::poly::{Poly, C64};

/// Green function of the filled Julia set of `p` at `z` from the first
/// escaping iterate, corrected by the Robin constant `log|α|/(d−1)`.
pub fn escape_green(p: &Poly, z: C64, n_iter: usize) -> f64 {
    let d = p.degree();
    if d < 2 {
        return 0.0;
    }
    let bailout = escape_bailout(p);
    let mut w = z;
    let mut scale = 1.0;
    for _ in 0..=n_iter {
        let r = w.norm();
        if r > bailout {
            return scale * (r.ln() + robin_constant(p));
        }
        w = p.eval(w);
        scale /= d as f64;
        if !w.is_finite() {
            return f64::INFINITY;
        }
    }
    0.0
}

fn escape_bailout(p: &Poly) -> f64 {
    1e8 * p.root_radius().max(1.0) * (1.0 + 1.0 / p.leading().norm())
}

/// `γ = log|α| / (d−1)`, so that `φ(z) − log|z| → γ`.
pub fn robin_constant(p: &Poly) -> f64 {
    p.leading().norm().ln() / (p.degree() as f64 - 1.0)
}

/// Capacity `|α|^{−1/(d−1)}` of the filled Julia set.
pub fn julia_capacity(p: &Poly) -> f64 {
    (-robin_constant(p)).exp()
}

/// Escape-time raster of the filled Julia set: pixel centers whose orbit
/// stays within `bailout` for `n_iter` steps.
pub fn filled_julia(p: &Poly, window: BoundingBox, w: usize, h: usize, n_iter: usize, bailout: f64) -> PixelSet {
    PixelSet::from_fn(window, w, h, |z| {
        let mut u = z;
        for _ in 0..n_iter {
            if !(u.norm() <= bailout) {
                return false;
            }
            u = p.eval(u);
        }
        u.norm() <= bailout
    })
}

/// Bailout that no bounded orbit can exceed.
pub fn default_bailout(p: &Poly) -> f64 {
    let d = p.degree();
    let a = p.leading().norm();
    let lower: f64 = p.coeffs()[..d].iter().map(|c| c.norm()).sum();
    (2.0f64).max((1.0 + lower) / a).max(2.0 / a.powf(1.0 / (d as f64 - 1.0)))
}

/// Sampled Green function on a square grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenField {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub w: usize,
    pub h: usize,
    /// Row-major, bottom row first, node `(i, j)` at `x₀ + i·dx, y₀ + j·dy`.
    #[serde(skip)]
    pub values: Vec<f64>,
    pub gamma: f64,
    pub backend: String,
    pub center: C64,
    pub outer_radius: f64,
    pub converged: bool,
    /// Largest update of the final relaxation sweep.
    pub residual: f64,
    pub sweeps: usize,
}

impl GreenField {
    /// `e^{−γ}`.
    pub fn capacity(&self) -> f64 {
        (-self.gamma).exp()
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            self.bbox.width() / (self.w - 1) as f64,
            self.bbox.height() / (self.h - 1) as f64,
        )
    }

    pub fn node(&self, i: usize, j: usize) -> C64 {
        let (dx, dy) = self.spacing();
        C64::new(self.bbox.x0 + i as f64 * dx, self.bbox.y0 + j as f64 * dy)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.w + i]
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn sample(&self, z: C64) -> Option<f64> {
        let (dx, dy) = self.spacing();
        let fx = (z.re - self.bbox.x0) / dx;
        let fy = (z.im - self.bbox.y0) / dy;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= (self.w - 1) as f64 && fy <= (self.h - 1) as f64) {
            return None;
        }
        let i = (fx as usize).min(self.w - 2);
        let j = (fy as usize).min(self.h - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |a, b| self.value(a, b);
        Some(
            (1.0 - ty) * ((1.0 - tx) * v(i, j) + tx * v(i + 1, j))
                + ty * ((1.0 - tx) * v(i, j + 1) + tx * v(i + 1, j + 1)),
        )
    }

    /// Equilibrium measure `(1/2π)·Δφ` as atoms on the nodes where `φ = 0`
    /// and some neighbour is positive, normalized to a probability measure.
    pub fn equilibrium_measure(&self) -> AtomicMeasure {
        let mut atoms = Vec::new();
        for j in 1..self.h - 1 {
            for i in 1..self.w - 1 {
                if self.value(i, j) != 0.0 {
                    continue;
                }
                let s = self.value(i - 1, j) + self.value(i + 1, j) + self.value(i, j - 1) + self.value(i, j + 1);
                if s > 0.0 {
                    atoms.push((self.node(i, j), s / std::f64::consts::TAU));
                }
            }
        }
        AtomicMeasure::new(atoms).normalized()
    }

    /// Writes `<path>` as little-endian f64 rows and `<path>.json` as sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes: Vec<u8> = self.values.iter().flat_map(|v| v.to_le_bytes()).collect();
        std::fs::write(path, bytes)?;
        std::fs::write(sidecar_path(path), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut gf: GreenField = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
        let bytes = std::fs::read(path)?;
        if bytes.len() != 8 * gf.w * gf.h {
            return Err(Error::Invalid("grid size disagrees with its sidecar".into()));
        }
        gf.values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(gf)
    }
}

/// Relaxation settings for [`grid_green_with`].
#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    /// Stop when the largest update of a sweep falls below this.
    pub tol: f64,
    /// Sweep cap per level, as a multiple of the grid side.
    pub sweeps_per_node: usize,
    /// Coarsest level side length.
    pub coarsest: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            tol: 1e-9,
            sweeps_per_node: 20,
            coarsest: 48,
        }
    }
}

/// Centroid and radius of the set pixels of `e`.
pub fn set_extent(e: &PixelSet) -> Result<(C64, f64)> {
    let pts = e.points();
    if pts.is_empty() {
        return Err(Error::Invalid("empty pixel set".into()));
    }
    let c = pts.iter().sum::<C64>() / pts.len() as f64;
    let r = pts.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
    Ok((c, r))
}

/// Default outer radius: two and a half times the set radius, at least ten pixels.
pub fn default_outer_radius(e: &PixelSet) -> Result<f64> {
    let (_, r) = set_extent(e)?;
    let (dx, dy) = e.pixel_size();
    Ok((2.5 * r).max(10.0 * dx.max(dy)))
}

pub fn grid_green(e: &PixelSet, outer_radius: f64) -> Result<GreenField> {
    grid_green_with(e, outer_radius, &GridOptions::default())
}

/// Discrete Dirichlet problem on the nodes of a lattice aligned with the
/// pixel centers of `e`: zero on `e`, one outside the disk of radius
/// `outer_radius` about the centroid. The angular mean of the solution is
/// `A·log r + B` on annuli enclosing `e`, so the Robin constant is `B/A`;
/// the stored field is rescaled by `1/A` to approximate `φ` itself.
pub fn grid_green_with(e: &PixelSet, outer_radius: f64, opts: &GridOptions) -> Result<GreenField> {
    let (centroid, radius) = set_extent(e)?;
    let (dx, dy) = e.pixel_size();
    let step = dx.min(dy);
    if outer_radius <= radius + 4.0 * step {
        return Err(Error::Invalid(format!(
            "outer radius {outer_radius} does not enclose the set (radius {radius})"
        )));
    }
    // Snap the center to a pixel center so lattice nodes hit pixel centers.
    let center = match e.index_of(centroid) {
        Some((i, j)) => e.center_of(i, j),
        None => centroid,
    };
    let half = (outer_radius / step).ceil() as usize + 2;
    let solve = Level::build(e, center, step, half, outer_radius);
    let (values, sweeps, residual, converged) = solve.run(opts);
    let n = solve.n;

    let (a, b) = fit_log(&values, center, |k| solve.node(k), radius + 2.0 * step, outer_radius - 2.0 * step);
    if !(a > 0.0) {
        return Err(Error::Invalid("relaxation produced a non-increasing potential".into()));
    }
    let values = values.into_iter().map(|v| v / a).collect();
    let lo = solve.node(0);
    Ok(GreenField {
        bbox: BoundingBox::new(lo.re, lo.im, lo.re + (n - 1) as f64 * step, lo.im + (n - 1) as f64 * step),
        w: n,
        h: n,
        values,
        gamma: b / a,
        backend: "grid".into(),
        center,
        outer_radius,
        converged,
        residual,
        sweeps,
    })
}

/// Least squares `v ≈ A·log|z−c| + B` over nodes with `r_in ≤ |z−c| ≤ r_out`.
fn fit_log(values: &[f64], center: C64, node: impl Fn(usize) -> C64, r_in: f64, r_out: f64) -> (f64, f64) {
    let (mut s1, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &v) in values.iter().enumerate() {
        let r = (node(k) - center).norm();
        if r < r_in || r > r_out {
            continue;
        }
        let x = r.ln();
        s1 += 1.0;
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    let det = s1 * sxx - sx * sx;
    let a = (s1 * sxy - sx * sy) / det;
    let b = (sy - a * sx) / s1;
    (a, b)
}

#[derive(Clone, Copy, PartialEq)]
enum Node {
    Free,
    Zero,
    One,
}

struct Level {
    n: usize,
    step: f64,
    origin: C64,
    kind: Vec<Node>,
    coarser: Option<Box<Level>>,
}

impl Level {
    /// Lattice of side `2·half + 2` nodes centred on `center`.
    fn build(e: &PixelSet, center: C64, step: f64, half: usize, outer: f64) -> Level {
        let n = 2 * half + 2;
        let origin = center - C64::new(half as f64 * step, half as f64 * step);
        let kind: Vec<Node> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % n, k / n);
                let z = origin + C64::new(i as f64 * step, j as f64 * step);
                if i == 0 || j == 0 || i + 1 == n || j + 1 == n || (z - center).norm() >= outer {
                    Node::One
                } else if e.contains(z) {
                    Node::Zero
                } else {
                    Node::Free
                }
            })
            .collect();
        let coarser = (half / 2 >= 24).then(|| Box::new(Level::build(e, center, 2.0 * step, half / 2, outer)));
        Level {
            n,
            step,
            origin,
            kind,
            coarser,
        }
    }

    fn node(&self, k: usize) -> C64 {
        self.origin + C64::new((k % self.n) as f64 * self.step, (k / self.n) as f64 * self.step)
    }

    /// Solves coarse to fine; returns values, total sweeps, last update, converged.
    fn run(&self, opts: &GridOptions) -> (Vec<f64>, usize, f64, bool) {
        let mut sweeps = 0;
        let init = if let Some(c) = &self.coarser {
            let (cv, cs, _, _) = c.run(opts);
            sweeps += cs;
            self.kind
                .iter()
                .enumerate()
                .map(|(k, kind)| match kind {
                    Node::Zero => 0.0,
                    Node::One => 1.0,
                    Node::Free => c.interpolate(&cv, self.node(k)),
                })
                .collect()
        } else {
            self.kind
                .iter()
                .map(|kind| match kind {
                    Node::Zero => 0.0,
                    _ => 1.0,
                })
                .collect()
        };
        let (v, s, res, ok) = self.relax(init, opts);
        (v, sweeps + s, res, ok)
    }

    fn interpolate(&self, v: &[f64], z: C64) -> f64 {
        let fx = ((z.re - self.origin.re) / self.step).clamp(0.0, (self.n - 1) as f64);
        let fy = ((z.im - self.origin.im) / self.step).clamp(0.0, (self.n - 1) as f64);
        let i = (fx as usize).min(self.n - 2);
        let j = (fy as usize).min(self.n - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let at = |a: usize, b: usize| v[b * self.n + a];
        (1.0 - ty) * ((1.0 - tx) * at(i, j) + tx * at(i + 1, j))
            + ty * ((1.0 - tx) * at(i, j + 1) + tx * at(i + 1, j + 1))
    }

    /// Red-black SOR. Colours are stored in separate half-width arrays so a
    /// colour sweep reads only the other colour and parallelizes over rows.
    fn relax(&self, init: Vec<f64>, opts: &GridOptions) -> (Vec<f64>, usize, f64, bool) {
        let n = self.n;
        let m = n / 2;
        let omega = 2.0 / (1.0 + (std::f64::consts::PI / n as f64).sin());
        let split = |c: usize| -> (Vec<f64>, Vec<bool>) {
            let mut vals = vec![0.0; n * m];
            let mut free = vec![false; n * m];
            for j in 0..n {
                let p = (j + c) & 1;
                for k in 0..m {
                    let idx = j * n + 2 * k + p;
                    vals[j * m + k] = init[idx];
                    free[j * m + k] = self.kind[idx] == Node::Free;
                }
            }
            (vals, free)
        };
        let (mut red, red_free) = split(0);
        let (mut black, black_free) = split(1);

        let sweep = |dst: &mut [f64], free: &[bool], src: &[f64], c: usize| -> f64 {
            dst.par_chunks_mut(m)
                .enumerate()
                .map(|(j, row)| {
                    if j == 0 || j + 1 == n {
                        return 0.0;
                    }
                    let p = (j + c) & 1;
                    let (up, mid, down) = (&src[(j + 1) * m..(j + 2) * m], &src[j * m..(j + 1) * m], &src[(j - 1) * m..j * m]);
                    let fr = &free[j * m..(j + 1) * m];
                    let mut worst: f64 = 0.0;
                    for k in 0..m {
                        if !fr[k] {
                            continue;
                        }
                        let (l, r) = if p == 1 { (mid[k], mid[k + 1]) } else { (mid[k - 1], mid[k]) };
                        let target = 0.25 * (l + r + up[k] + down[k]);
                        let delta = omega * (target - row[k]);
                        row[k] += delta;
                        worst = worst.max(delta.abs());
                    }
                    worst
                })
                .reduce(|| 0.0, f64::max)
        };

        let cap = opts.sweeps_per_node * n;
        let mut last = f64::INFINITY;
        let mut count = 0;
        while count < cap {
            let a = sweep(&mut red, &red_free, &black, 0);
            let b = sweep(&mut black, &black_free, &red, 1);
            count += 1;
            last = a.max(b);
            if last < opts.tol {
                break;
            }
        }
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..m {
                out[j * n + 2 * k + (j & 1)] = red[j * m + k];
                out[j * n + 2 * k + ((j + 1) & 1)] = black[j * m + k];
            }
        }
        (out, count, last, last < opts.tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn escape_green_spec_values() {
        let z2 = Poly::monomial(c(1.0, 0.0), 2);
        assert!((escape_green(&z2, c(2.0, 0.0), 200) - 2f64.ln()).abs() < 1e-12);
        assert_eq!(escape_green(&z2, c(0.5, 0.0), 200), 0.0);
        let t2 = Poly::from_real(&[-1.0, 0.0, 2.0]);
        let want = (2.0 + 3f64.sqrt()).ln();
        assert!((escape_green(&t2, c(2.0, 0.0), 200) - want).abs() < 1e-10);
    }

    #[test]
    fn functional_equation() {
        let p = Poly::from_real(&[0.3, -0.2, 0.0, 1.5]);
        for z in [c(1.7, 0.4), c(-0.9, 2.2), c(3.0, -1.0)] {
            let lhs = escape_green(&p, p.eval(z), 500);
            let rhs = 3.0 * escape_green(&p, z, 500);
            assert!((lhs - rhs).abs() < 1e-9, "{lhs} {rhs}");
        }
    }

    #[test]
    fn disk_capacity_coarse() {
        let e = PixelSet::disk(BoundingBox::square(c(0.0, 0.0), 1.5), 101, 101, c(0.0, 0.0), 1.0);
        let gf = grid_green(&e, 3.0).unwrap();
        assert!((gf.capacity() - 1.0).abs() < 0.03, "{}", gf.capacity());
        assert!(gf.values.iter().all(|&v| v >= -1e-12));
        let mu = gf.equilibrium_measure();
        assert!((mu.mass() - 1.0).abs() < 1e-12);
    }
}
