//! Classification of pairs by their common right factor and normal forms,
//! and a witness search for sets that are not uniqueness sets.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::gcd_factor;
use crate::normal_forms::{chebyshev, detect_chebyshev_pair, detect_power_pair, NormalFormWitness};
use crate::poly::{LinearMap, Poly, C64};
use crate::potential::{
    default_bailout, default_outer_radius, filled_julia, grid_green, invariance_report, set_extent, InvarianceReport,
    PixelSet,
};
use crate::tolerance::ToleranceContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `f₀` or `g₀` has degree one.
    Factor,
    /// `f₀ = σ∘zᵈ∘τ`, `g₀ = σ∘a z^{d′}∘τ`.
    PowerPair,
    /// `f₀ = σ∘(±T_d)∘τ`, `g₀ = σ∘(±T_{d′})∘τ`.
    ChebyshevPair,
    Unclassified,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResiduals {
    /// Deck-power defect that licensed the factorization.
    pub hypothesis: Option<f64>,
    /// Worst relative residual of the two left divisions.
    pub division: Option<f64>,
    /// `max(‖f₀∘Q − f‖, ‖g₀∘Q − g‖)`, relative.
    pub composition: Option<f64>,
    /// Reconstruction residual of the joint normal form.
    pub normal_form: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub branch: Branch,
    pub q: Poly,
    pub f0: Poly,
    pub g0: Poly,
    pub witness: Option<NormalFormWitness>,
    pub residuals: ClassificationResiduals,
    /// Why the pair is unclassified, when it is.
    pub cause: Option<String>,
}

/// Splits `f = f₀∘Q`, `g = g₀∘Q` with `deg Q = gcd(deg f, deg g)` and names
/// the shape of `(f₀, g₀)`. Precedence is Factor, then PowerPair, then
/// ChebyshevPair. The measure hypothesis is not checked here.
pub fn theorem1_classify(f: &Poly, g: &Poly, tol: &ToleranceContext) -> Result<ClassificationResult> {
    let (d, dd) = (f.degree(), g.degree());
    if d < 1 || dd < 1 {
        return Err(Error::Degenerate("classification needs nonconstant polynomials".into()));
    }
    let unclassified = |cause: String, residuals| ClassificationResult {
        branch: Branch::Unclassified,
        q: Poly::identity(),
        f0: f.clone(),
        g0: g.clone(),
        witness: None,
        residuals,
        cause: Some(cause),
    };
    let (q, f0, g0, mut residuals) = if d == 1 || dd == 1 {
        (Poly::identity(), f.clone(), g.clone(), ClassificationResiduals::default())
    } else {
        match gcd_factor(f, g, tol) {
            Ok(fr) => {
                let r = ClassificationResiduals {
                    hypothesis: Some(fr.hypothesis_residual),
                    division: Some(fr.division_residual),
                    ..Default::default()
                };
                (fr.q, fr.f0, fr.g0, r)
            }
            Err(e @ (Error::Hypothesis { .. } | Error::IllConditioned { .. } | Error::NonConvergence { .. })) => {
                let mut r = ClassificationResiduals::default();
                if let Error::Hypothesis { residual, .. } = &e {
                    r.hypothesis = Some(*residual);
                }
                return Ok(unclassified(format!("no common factor: {e}"), r));
            }
            Err(e) => return Err(e),
        }
    };
    residuals.composition = Some(f0.compose(&q).relative_distance(f).max(g0.compose(&q).relative_distance(g)));
    let done = |branch, witness: Option<NormalFormWitness>, mut residuals: ClassificationResiduals| {
        residuals.normal_form = witness.as_ref().map(|w| w.residual);
        ClassificationResult {
            branch,
            q: q.clone(),
            f0: f0.clone(),
            g0: g0.clone(),
            witness,
            residuals,
            cause: None,
        }
    };
    if f0.degree() == 1 || g0.degree() == 1 {
        return Ok(done(Branch::Factor, None, residuals));
    }
    if let Some(w) = detect_power_pair(&f0, &g0, tol) {
        return Ok(done(Branch::PowerPair, Some(w), residuals));
    }
    if let Some(w) = detect_chebyshev_pair(&f0, &g0, tol) {
        return Ok(done(Branch::ChebyshevPair, Some(w), residuals));
    }
    let mut out = done(Branch::Unclassified, None, residuals);
    out.cause = Some("factors are neither a shared power pair nor a shared Chebyshev pair".into());
    Ok(out)
}

/// Where a candidate map came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Rotation { order: usize, step: usize },
    User { index: usize },
    PowerModel { degree: usize },
    ChebyshevModel { degree: usize, sign: i8 },
}

/// `J_P ⊆ E ⊆ K_P` at pixel scale, with one pixel of slack.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    /// Fraction of boundary pixels of `K_P` farther than one pixel from `E`.
    pub julia_outside_set: f64,
    /// Fraction of pixels of `E` farther than one pixel from `K_P`.
    pub set_outside_filled: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateReport {
    pub source: CandidateSource,
    pub poly: Poly,
    pub invariance: InvarianceReport,
    pub witness: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub containment: Option<Containment>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CircleFit {
    pub center: C64,
    pub radius: f64,
    /// RMS radial deviation of the boundary pixels, in pixels.
    pub rms_pixels: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentFit {
    pub a: C64,
    pub b: C64,
    /// RMS distance of the set pixels from the fitted line, in pixels.
    pub rms_pixels: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub centroid: C64,
    pub circle_fit: Option<CircleFit>,
    pub segment_fit: Option<SegmentFit>,
    pub candidates: Vec<CandidateReport>,
    pub witnesses: usize,
    /// Grid estimate; `None` when the solve was skipped or failed.
    pub capacity: Option<f64>,
    /// Set when the raster is so thin that positivity of the capacity is
    /// not decidable from pixels.
    pub capacity_flag: Option<String>,
    pub not_uniqueness_set: bool,
    pub verdict: String,
}

/// Options of [`uniqueness_probe`].
#[derive(Clone, Debug)]
pub struct ProbeOptions {
    pub degree_cap: usize,
    pub candidates: Vec<Poly>,
    /// A geometric fit is used when its RMS deviation is below this many pixels.
    pub fit_pixels: f64,
    pub capacity: bool,
    pub julia_iterations: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            degree_cap: 6,
            candidates: Vec::new(),
            fit_pixels: 1.5,
            capacity: true,
            julia_iterations: 256,
        }
    }
}

/// Searches for `P ≠ id` with `P⁻¹(E) = E` at pixel scale among rotations
/// about the centroid, user candidates, and power or Chebyshev maps fitted
/// to the geometry of `E`. Finding one shows `E` is not a uniqueness set;
/// finding none proves nothing.
pub fn uniqueness_probe(e: &PixelSet, opts: &ProbeOptions) -> Result<UniquenessReport> {
    let (centroid, _) = set_extent(e)?;
    let mut cands: Vec<(CandidateSource, Poly)> = Vec::new();
    for order in 2..=opts.degree_cap.max(2) {
        for step in 1..order {
            if step.gcd(&order) != 1 {
                continue;
            }
            let w = C64::from_polar(1.0, std::f64::consts::TAU * step as f64 / order as f64);
            cands.push((
                CandidateSource::Rotation { order, step },
                Poly::new(vec![centroid * (C64::new(1.0, 0.0) - w), w]),
            ));
        }
    }
    for (index, p) in opts.candidates.iter().enumerate() {
        cands.push((CandidateSource::User { index }, p.clone()));
    }
    let circle_fit = fit_circle(e);
    if let Some(cf) = circle_fit.as_ref().filter(|c| c.rms_pixels <= opts.fit_pixels) {
        // z ↦ c + r·((z − c)/r)^k keeps the circle and the disk.
        let to = LinearMap::new(C64::new(1.0 / cf.radius, 0.0), -cf.center / cf.radius);
        let from = to.inverse();
        for degree in 2..=opts.degree_cap {
            let p = Poly::monomial(C64::new(1.0, 0.0), degree).conjugate(&from, &to);
            cands.push((CandidateSource::PowerModel { degree }, p));
        }
    }
    let segment_fit = fit_segment(e);
    if let Some(sf) = segment_fit.as_ref().filter(|s| s.rms_pixels <= opts.fit_pixels) {
        // L sends the fitted segment to [−1, 1].
        let a = C64::new(2.0, 0.0) / (sf.b - sf.a);
        let to = LinearMap::new(a, -(sf.a + sf.b) / (sf.b - sf.a));
        let from = to.inverse();
        for degree in 2..=opts.degree_cap {
            for sign in [1i8, -1] {
                let p = chebyshev(degree).scale(C64::new(sign as f64, 0.0)).conjugate(&from, &to);
                cands.push((CandidateSource::ChebyshevModel { degree, sign }, p));
            }
        }
    }

    let candidates: Vec<CandidateReport> = cands
        .into_iter()
        .map(|(source, poly)| {
            let invariance = invariance_report(&poly, e);
            let witness = invariance.invariant;
            let containment = (witness && poly.degree() >= 2).then(|| containment(&poly, e, opts.julia_iterations));
            CandidateReport {
                source,
                poly,
                invariance,
                witness,
                containment,
            }
        })
        .collect();
    let witnesses = candidates.iter().filter(|c| c.witness).count();

    let thin = e.boundary().count() as f64 >= 0.9 * e.count() as f64;
    let capacity = if opts.capacity {
        default_outer_radius(e)
            .and_then(|r| grid_green(e, r))
            .ok()
            .map(|gf| gf.capacity())
    } else {
        None
    };
    let capacity_flag = thin.then(|| {
        "raster is at most a few pixels thick; the capacity estimate cannot decide positivity".to_string()
    });
    let not_uniqueness_set = witnesses > 0;
    let verdict = if not_uniqueness_set {
        "not a uniqueness set: invariance witness found at pixel scale".to_string()
    } else {
        "no invariance found (necessary-condition check only)".to_string()
    };
    Ok(UniquenessReport {
        centroid,
        circle_fit,
        segment_fit,
        candidates,
        witnesses,
        capacity,
        capacity_flag,
        not_uniqueness_set,
        verdict,
    })
}

fn containment(p: &Poly, e: &PixelSet, n_iter: usize) -> Containment {
    let k = filled_julia(p, e.bbox, e.w, e.h, n_iter, default_bailout(p));
    let j = k.boundary();
    let (e1, k1) = (e.dilated(1), k.dilated(1));
    let frac = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    Containment {
        julia_outside_set: frac(j.minus_count(&e1).expect("same geometry"), j.count()),
        set_outside_filled: frac(e.minus_count(&k1).expect("same geometry"), e.count()),
    }
}

/// Algebraic least-squares circle through the boundary pixels.
pub fn fit_circle(e: &PixelSet) -> Option<CircleFit> {
    let pts = e.boundary().points();
    if pts.len() < 3 {
        return None;
    }
    // x² + y² + D x + E y + F = 0
    let a = nalgebra::DMatrix::from_fn(pts.len(), 3, |i, k| match k {
        0 => pts[i].re,
        1 => pts[i].im,
        _ => 1.0,
    });
    let b = nalgebra::DVector::from_fn(pts.len(), |i, _| -pts[i].norm_sqr());
    let sol = a.svd(true, true).solve(&b, 1e-12).ok()?;
    let center = C64::new(-sol[0] / 2.0, -sol[1] / 2.0);
    let r2 = center.norm_sqr() - sol[2];
    if !(r2 > 0.0) {
        return None;
    }
    let radius = r2.sqrt();
    let (dx, dy) = e.pixel_size();
    let px = dx.max(dy);
    // The boundary of a disk raster sits half a pixel inside the circle.
    let rms = (pts.iter().map(|z| ((z - center).norm() - radius).powi(2)).sum::<f64>() / pts.len() as f64).sqrt();
    Some(CircleFit {
        center,
        radius,
        rms_pixels: rms / px,
    })
}

/// Principal-axis segment through the set pixels, ends at the extreme projections.
pub fn fit_segment(e: &PixelSet) -> Option<SegmentFit> {
    let pts = e.points();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let c = pts.iter().sum::<C64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for z in &pts {
        let u = z - c;
        sxx += u.re * u.re;
        syy += u.im * u.im;
        sxy += u.re * u.im;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = C64::from_polar(1.0, angle);
    let (mut lo, mut hi, mut ss) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for z in &pts {
        let u = (z - c) * dir.conj();
        lo = lo.min(u.re);
        hi = hi.max(u.re);
        ss += u.im * u.im;
    }
    if !(hi > lo) {
        return None;
    }
    let (dx, dy) = e.pixel_size();
    Some(SegmentFit {
        a: c + dir * lo,
        b: c + dir * hi,
        rms_pixels: (ss / n).sqrt() / dx.max(dy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::BoundingBox;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn spec_examples() {
        let tol = ToleranceContext::default();
        let z = |k| Poly::monomial(c(1.0, 0.0), k);
        let r = theorem1_classify(&z(4), &z(2), &tol).unwrap();
        assert_eq!(r.branch, Branch::Factor);
        assert!(r.q.distance(&z(2)) < 1e-9);

        let a = c(0.7, -0.4);
        let r = theorem1_classify(&z(6), &Poly::monomial(a, 4), &tol).unwrap();
        assert_eq!(r.branch, Branch::PowerPair);

        let q = Poly::new(vec![c(0.0, 0.0), c(0.3, 0.2), c(1.0, 0.0)]);
        let f = chebyshev(3).compose(&q);
        let g = chebyshev(2).compose(&q);
        let r = theorem1_classify(&f, &g, &tol).unwrap();
        assert_eq!(r.branch, Branch::ChebyshevPair);
        assert!(r.q.distance(&q) < 1e-8, "{:?}", r.q);
    }

    #[test]
    fn generic_pair_is_unclassified() {
        let tol = ToleranceContext::default();
        let f = Poly::from_real(&[0.1, 0.4, 0.0, 1.0]);
        let g = Poly::from_real(&[0.0, 0.2, 1.0]);
        let r = theorem1_classify(&f, &g, &tol).unwrap();
        assert_eq!(r.branch, Branch::Unclassified);
        assert!(r.cause.is_some());
    }

    #[test]
    fn probe_finds_chebyshev_witness_on_segment() {
        let b = BoundingBox::square(c(0.0, 0.0), 1.5);
        let e = PixelSet::segment(b, 151, 151, c(-1.0, 0.0), c(1.0, 0.0));
        let opts = ProbeOptions {
            degree_cap: 3,
            capacity: false,
            ..Default::default()
        };
        let rep = uniqueness_probe(&e, &opts).unwrap();
        assert!(rep.not_uniqueness_set);
        assert!(rep
            .candidates
            .iter()
            .any(|c| c.witness && c.source == CandidateSource::ChebyshevModel { degree: 2, sign: 1 }));
    }
}
