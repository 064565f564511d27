//! Raster compact sets on an axis-aligned box.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::C64;

/// Axis-aligned box `[x₀, x₁] × [y₀, y₁]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl From<[f64; 4]> for BoundingBox {
    fn from(b: [f64; 4]) -> Self {
        BoundingBox {
            x0: b[0],
            y0: b[1],
            x1: b[2],
            y1: b[3],
        }
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x0, b.y0, b.x1, b.y1]
    }
}

impl BoundingBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        BoundingBox { x0, y0, x1, y1 }
    }

    /// Square of half-width `r` around `c`.
    pub fn square(c: C64, r: f64) -> Self {
        BoundingBox::new(c.re - r, c.im - r, c.re + r, c.im + r)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn center(&self) -> C64 {
        C64::new((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }
}

/// Sidecar describing the geometry of a PGM raster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterHeader {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub w: usize,
    pub h: usize,
}

/// A `w × h` bit mask over a box. Row `j` is the band
/// `y₀ + j·dy ≤ y < y₀ + (j+1)·dy`, so rows run bottom to top.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PixelSet {
    #[serde(rename = "box")]
    pub bbox: BoundingBox,
    pub w: usize,
    pub h: usize,
    pub mask: Vec<bool>,
}

impl PixelSet {
    pub fn empty(bbox: BoundingBox, w: usize, h: usize) -> Self {
        PixelSet {
            bbox,
            w,
            h,
            mask: vec![false; w * h],
        }
    }

    /// Marks every pixel whose center satisfies `pred`.
    pub fn from_fn(bbox: BoundingBox, w: usize, h: usize, pred: impl Fn(C64) -> bool + Sync) -> Self {
        let mut s = Self::empty(bbox, w, h);
        let (dx, dy) = s.pixel_size();
        s.mask
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(j, row)| {
                let y = bbox.y0 + (j as f64 + 0.5) * dy;
                for (i, m) in row.iter_mut().enumerate() {
                    *m = pred(C64::new(bbox.x0 + (i as f64 + 0.5) * dx, y));
                }
            });
        s
    }

    /// Pixels within half a pixel diagonal of the curve given by its
    /// distance function, so every point of the curve lies in a marked pixel.
    pub fn from_distance(bbox: BoundingBox, w: usize, h: usize, dist: impl Fn(C64) -> f64 + Sync) -> Self {
        let (dx, dy) = (bbox.width() / w as f64, bbox.height() / h as f64);
        let reach = 0.5 * dx.hypot(dy);
        Self::from_fn(bbox, w, h, |z| dist(z) <= reach)
    }

    pub fn disk(bbox: BoundingBox, w: usize, h: usize, c: C64, r: f64) -> Self {
        Self::from_fn(bbox, w, h, |z| (z - c).norm() <= r)
    }

    pub fn circle(bbox: BoundingBox, w: usize, h: usize, c: C64, r: f64) -> Self {
        Self::from_distance(bbox, w, h, |z| ((z - c).norm() - r).abs())
    }

    /// Arc `{c + r·e^{iθ} : θ ∈ [θ₀, θ₁]}`.
    pub fn arc(bbox: BoundingBox, w: usize, h: usize, c: C64, r: f64, t0: f64, t1: f64) -> Self {
        Self::from_distance(bbox, w, h, |z| {
            let u = z - c;
            let mut t = u.arg();
            while t < t0 {
                t += std::f64::consts::TAU;
            }
            if t <= t1 {
                (u.norm() - r).abs()
            } else {
                let a = c + C64::from_polar(r, t0);
                let b = c + C64::from_polar(r, t1);
                (z - a).norm().min((z - b).norm())
            }
        })
    }

    pub fn segment(bbox: BoundingBox, w: usize, h: usize, a: C64, b: C64) -> Self {
        Self::from_distance(bbox, w, h, |z| {
            let ab = b - a;
            let t = ((z - a) * ab.conj()).re / ab.norm_sqr();
            (z - (a + ab * t.clamp(0.0, 1.0))).norm()
        })
    }

    /// Even-odd fill of a closed polygon.
    pub fn polygon(bbox: BoundingBox, w: usize, h: usize, vertices: &[C64]) -> Self {
        Self::from_fn(bbox, w, h, |z| {
            let mut inside = false;
            let n = vertices.len();
            for k in 0..n {
                let (p, q) = (vertices[k], vertices[(k + 1) % n]);
                if (p.im > z.im) != (q.im > z.im) {
                    let x = p.re + (z.im - p.im) / (q.im - p.im) * (q.re - p.re);
                    if z.re < x {
                        inside = !inside;
                    }
                }
            }
            inside
        })
    }

    pub fn pixel_size(&self) -> (f64, f64) {
        (self.bbox.width() / self.w as f64, self.bbox.height() / self.h as f64)
    }

    pub fn center_of(&self, i: usize, j: usize) -> C64 {
        let (dx, dy) = self.pixel_size();
        C64::new(
            self.bbox.x0 + (i as f64 + 0.5) * dx,
            self.bbox.y0 + (j as f64 + 0.5) * dy,
        )
    }

    /// Pixel containing `z`, if inside the box.
    pub fn index_of(&self, z: C64) -> Option<(usize, usize)> {
        let (dx, dy) = self.pixel_size();
        let fi = (z.re - self.bbox.x0) / dx;
        let fj = (z.im - self.bbox.y0) / dy;
        if !(fi >= 0.0 && fj >= 0.0) {
            return None;
        }
        let (i, j) = (fi as usize, fj as usize);
        (i < self.w && j < self.h).then_some((i, j))
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.w + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.mask[j * self.w + i] = v;
    }

    pub fn contains(&self, z: C64) -> bool {
        self.index_of(z).is_some_and(|(i, j)| self.get(i, j))
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn area(&self) -> f64 {
        let (dx, dy) = self.pixel_size();
        self.count() as f64 * dx * dy
    }

    /// Centers of all set pixels.
    pub fn points(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for j in 0..self.h {
            for i in 0..self.w {
                if self.get(i, j) {
                    out.push(self.center_of(i, j));
                }
            }
        }
        out
    }

    /// Set pixels with at least one unset 4-neighbour (or on the box edge).
    pub fn boundary(&self) -> PixelSet {
        let mut out = PixelSet::empty(self.bbox, self.w, self.h);
        for j in 0..self.h {
            for i in 0..self.w {
                if !self.get(i, j) {
                    continue;
                }
                let edge = i == 0 || j == 0 || i + 1 == self.w || j + 1 == self.h;
                let open = edge
                    || !self.get(i - 1, j)
                    || !self.get(i + 1, j)
                    || !self.get(i, j - 1)
                    || !self.get(i, j + 1);
                out.set(i, j, open);
            }
        }
        out
    }

    /// Pixels within `k` steps (8-neighbourhood) of a set pixel.
    pub fn dilated(&self, k: usize) -> PixelSet {
        let mut out = self.clone();
        for _ in 0..k {
            let prev = out.clone();
            for j in 0..self.h {
                for i in 0..self.w {
                    if prev.get(i, j) {
                        continue;
                    }
                    let hit = (j.saturating_sub(1)..(j + 2).min(self.h))
                        .any(|b| (i.saturating_sub(1)..(i + 2).min(self.w)).any(|a| prev.get(a, b)));
                    out.set(i, j, hit);
                }
            }
        }
        out
    }

    /// Number of pixels set in exactly one of the two rasters.
    pub fn symmetric_difference(&self, other: &PixelSet) -> Result<usize> {
        if self.w != other.w || self.h != other.h || self.bbox != other.bbox {
            return Err(Error::Invalid("rasters have different geometry".into()));
        }
        Ok(self
            .mask
            .iter()
            .zip(&other.mask)
            .filter(|(a, b)| a != b)
            .count())
    }

    /// Pixels of `self` not in `other`.
    pub fn minus_count(&self, other: &PixelSet) -> Result<usize> {
        if self.w != other.w || self.h != other.h || self.bbox != other.bbox {
            return Err(Error::Invalid("rasters have different geometry".into()));
        }
        Ok(self.mask.iter().zip(&other.mask).filter(|(a, b)| **a && !**b).count())
    }

    pub fn header(&self) -> RasterHeader {
        RasterHeader {
            bbox: self.bbox,
            w: self.w,
            h: self.h,
        }
    }

    /// Binary PGM (`P5`, maxval 255, set pixels white), top row first.
    pub fn write_pgm(&self, mut out: impl Write) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.w, self.h)?;
        let mut buf = Vec::with_capacity(self.w * self.h);
        for j in (0..self.h).rev() {
            for i in 0..self.w {
                buf.push(if self.get(i, j) { 255u8 } else { 0 });
            }
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Reads a `P5` raster; pixels at or above half the maxval are set.
    pub fn read_pgm(mut input: impl Read, bbox: BoundingBox) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let mut pos = 0;
        let mut fields = Vec::new();
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Invalid("truncated PGM header".into()));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        pos += 1;
        if fields[0] != "P5" {
            return Err(Error::Invalid(format!("expected P5, found {}", fields[0])));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad PGM field {s}")))
        };
        let (w, h, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
        if maxval == 0 || maxval > 255 {
            return Err(Error::Invalid("only 8-bit PGM is supported".into()));
        }
        let data = bytes
            .get(pos..pos + w * h)
            .ok_or_else(|| Error::Invalid("truncated PGM data".into()))?;
        let mut s = PixelSet::empty(bbox, w, h);
        for (k, &v) in data.iter().enumerate() {
            let (i, row) = (k % w, k / w);
            s.set(i, h - 1 - row, 2 * v as usize >= maxval);
        }
        Ok(s)
    }

    /// Writes `<path>` as PGM and `<path>.json` as the geometry sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_pgm(std::io::BufWriter::new(std::fs::File::create(path)?))?;
        let side = sidecar_path(path);
        std::fs::write(side, serde_json::to_string_pretty(&self.header())?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let header: RasterHeader = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
        let s = Self::read_pgm(std::fs::File::open(path)?, header.bbox)?;
        if s.w != header.w || s.h != header.h {
            return Err(Error::Invalid("PGM size disagrees with its sidecar".into()));
        }
        Ok(s)
    }
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
