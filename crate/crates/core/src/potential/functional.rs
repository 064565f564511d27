//! Circle-gap functional and total invariance of raster compacts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pixel::PixelSet;
use crate::poly::{Poly, C64};

/// Angular resolution of [`a_functional`] at radius `r`: one pixel of arc.
pub fn angular_step(e: &PixelSet, r: f64) -> f64 {
    let (dx, dy) = e.pixel_size();
    dx.max(dy) / r
}

/// Longest arc (in radians) of the circle `|z| = r` missing `e`, sampled
/// at half-pixel spacing. `None` when the circle misses `e` entirely.
pub fn a_functional(e: &PixelSet, r: f64) -> Option<f64> {
    a_functional_about(e, C64::new(0.0, 0.0), r)
}

/// [`a_functional`] for the circle `|z − c| = r`.
pub fn a_functional_about(e: &PixelSet, c: C64, r: f64) -> Option<f64> {
    let half_step = angular_step(e, r) / 2.0;
    let n = ((std::f64::consts::TAU / half_step).ceil() as usize).max(64);
    let dt = std::f64::consts::TAU / n as f64;
    let hits: Vec<bool> = (0..n)
        .map(|k| e.contains(c + C64::from_polar(r, k as f64 * dt)))
        .collect();
    let hit_idx: Vec<usize> = (0..n).filter(|&k| hits[k]).collect();
    if hit_idx.is_empty() {
        return None;
    }
    // A gap is measured between the centers of the set pixels bounding a run
    // of missed samples, which removes most of the rasterization overshoot.
    let center_arg = |k: usize| -> f64 {
        let z = c + C64::from_polar(r, k as f64 * dt);
        let (i, j) = e.index_of(z).expect("hit lies in the box");
        (e.center_of(i, j) - c).arg()
    };
    let mut longest: f64 = 0.0;
    for (t, &a) in hit_idx.iter().enumerate() {
        let b = hit_idx[(t + 1) % hit_idx.len()];
        let run = match (b + n - a) % n {
            0 => n,
            s => s,
        };
        if run < 2 {
            continue;
        }
        let gap = (center_arg(b) - center_arg(a)).rem_euclid(std::f64::consts::TAU);
        longest = longest.max(gap.min(run as f64 * dt));
    }
    Some(longest)
}

/// Supremum of [`a_functional`] over radii whose circle meets `e`,
/// scanned at half-pixel radial spacing.
pub fn a_sup(e: &PixelSet) -> Option<f64> {
    let pts = e.points();
    let r0 = pts.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    let r1 = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (dx, dy) = e.pixel_size();
    let dr = 0.5 * dx.min(dy);
    let steps = ((r1 - r0) / dr).ceil() as usize + 1;
    (0..=steps)
        .into_par_iter()
        .filter_map(|k| {
            let r = r0 + k as f64 * dr;
            (r > 0.0).then(|| a_functional(e, r)).flatten()
        })
        .reduce_with(f64::max)
}

/// `P⁻¹(E)` on an output raster over the same box: a pixel is set when
/// the image of any point of its 3×3 subsample grid lands in a set pixel of `e`.
pub fn preimage_set(p: &Poly, e: &PixelSet, w: usize, h: usize) -> PixelSet {
    let mut out = PixelSet::empty(e.bbox, w, h);
    let (dx, dy) = out.pixel_size();
    let bbox = e.bbox;
    out.mask.par_chunks_mut(w).enumerate().for_each(|(j, row)| {
        for (i, m) in row.iter_mut().enumerate() {
            *m = (0..9).any(|s| {
                let (si, sj) = ((s % 3) as f64, (s / 3) as f64);
                let z = C64::new(
                    bbox.x0 + (i as f64 + (si + 0.5) / 3.0) * dx,
                    bbox.y0 + (j as f64 + (sj + 0.5) / 3.0) * dy,
                );
                e.contains(p.eval(z))
            });
        }
    });
    out
}

/// Pixel-level comparison of `P⁻¹(E)` with `E`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvarianceReport {
    /// `|P⁻¹(E) Δ E| / |E|` in pixel counts.
    pub residual: f64,
    /// `min(2·|∂E| / |E|, 1)`: what pixel-scale aliasing alone can produce.
    /// The cap matters for curves one or two pixels thick, where every
    /// pixel is a boundary pixel and the uncapped bound would accept
    /// preimages disjoint from `E`.
    pub threshold: f64,
    pub set_pixels: usize,
    pub preimage_pixels: usize,
    pub symmetric_difference: usize,
    pub invariant: bool,
}

pub fn invariance_report(p: &Poly, e: &PixelSet) -> InvarianceReport {
    let pre = preimage_set(p, e, e.w, e.h);
    let n = e.count();
    let diff = pre.symmetric_difference(e).expect("same geometry");
    let boundary = e.boundary().count();
    let (residual, threshold) = if n == 0 {
        (f64::INFINITY, 0.0)
    } else {
        (diff as f64 / n as f64, (2.0 * boundary as f64 / n as f64).min(1.0))
    };
    InvarianceReport {
        residual,
        threshold,
        set_pixels: n,
        preimage_pixels: pre.count(),
        symmetric_difference: diff,
        invariant: residual <= threshold,
    }
}

/// `|P⁻¹(E) Δ E| / |E|`.
pub fn totally_invariant_residual(p: &Poly, e: &PixelSet) -> f64 {
    invariance_report(p, e).residual
}
