//! Finite atomic measures and the pullback / pushforward operators.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Poly, C64};
use crate::tolerance::ToleranceContext;

/// Highest total order `j + k` of the moments `∫ z^j z̄^k dμ` compared by
/// [`weak_star_distance`].
pub const MOMENT_ORDER: usize = 6;

/// Weighted point masses. Weights are nonnegative.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<(C64, f64)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<(C64, f64)>) -> Self {
        AtomicMeasure { atoms }
    }

    pub fn dirac(z: C64) -> Self {
        AtomicMeasure::new(vec![(z, 1.0)])
    }

    /// `n` equal atoms on the circle `|z − c| = r`, starting at angle 0.
    pub fn uniform_circle(c: C64, r: f64, n: usize) -> Self {
        let w = 1.0 / n as f64;
        AtomicMeasure::new(
            (0..n)
                .map(|k| (c + C64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64), w))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        AtomicMeasure::new(self.atoms.iter().map(|&(z, w)| (z, w * s)).collect())
    }

    /// Same measure with total mass one (unchanged if the mass is zero).
    pub fn normalized(&self) -> Self {
        let m = self.mass();
        if m > 0.0 {
            self.scaled(1.0 / m)
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &AtomicMeasure) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        AtomicMeasure::new(atoms)
    }

    pub fn validate(&self) -> Result<()> {
        for &(z, w) in &self.atoms {
            if !(w >= 0.0 && w.is_finite() && z.is_finite()) {
                return Err(Error::Invalid(format!("bad atom ({z}, {w})")));
            }
        }
        Ok(())
    }

    /// Merges atoms falling in the same square cell of side `cell`, placing
    /// each merged atom at the weighted mean of its parts. Output is sorted
    /// by cell, so the result is deterministic.
    pub fn binned(&self, cell: f64) -> Self {
        let mut bins: BTreeMap<(i64, i64), (C64, f64)> = BTreeMap::new();
        for &(z, w) in &self.atoms {
            let key = ((z.re / cell).round() as i64, (z.im / cell).round() as i64);
            let e = bins.entry(key).or_insert((C64::new(0.0, 0.0), 0.0));
            e.0 += z * w;
            e.1 += w;
        }
        AtomicMeasure::new(
            bins.into_values()
                .filter(|b| b.1 > 0.0)
                .map(|(s, w)| (s / w, w))
                .collect(),
        )
    }

    /// Merges clusters of atoms linked by steps of at most `radius`.
    pub fn merged(&self, radius: f64) -> Self {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.atoms[a].0.re.total_cmp(&self.atoms[b].0.re));
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(parent: &mut [usize], mut k: usize) -> usize {
            while parent[k] != k {
                parent[k] = parent[parent[k]];
                k = parent[k];
            }
            k
        }
        for (s, &a) in order.iter().enumerate() {
            for &b in &order[s + 1..] {
                let (za, zb) = (self.atoms[a].0, self.atoms[b].0);
                if zb.re - za.re > radius {
                    break;
                }
                if (za - zb).norm() <= radius {
                    let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut groups: BTreeMap<usize, (C64, f64, f64)> = BTreeMap::new();
        for k in 0..n {
            let r = root(&mut parent, k);
            let (z, w) = self.atoms[k];
            let e = groups.entry(r).or_insert((C64::new(0.0, 0.0), 0.0, 0.0));
            e.0 += z * w;
            e.1 += w;
            e.2 += 1.0;
        }
        AtomicMeasure::new(
            groups
                .into_iter()
                .map(|(r, (s, w, cnt))| {
                    if w > 0.0 {
                        (s / w, w)
                    } else {
                        (self.atoms[r].0, w * cnt)
                    }
                })
                .collect(),
        )
    }

    /// Drops atoms lighter than `floor` and restores the original mass.
    pub fn pruned(&self, floor: f64) -> Self {
        let m = self.mass();
        let kept = AtomicMeasure::new(self.atoms.iter().copied().filter(|a| a.1 >= floor).collect());
        let k = kept.mass();
        if k > 0.0 {
            kept.scaled(m / k)
        } else {
            kept
        }
    }

    /// Coarsens by binning with doubling cell size until at most `max_atoms` remain.
    pub fn compressed(&self, max_atoms: usize, cell: f64) -> Self {
        let mut out = self.clone();
        let mut c = cell;
        while out.len() > max_atoms {
            out = self.binned(c);
            c *= 2.0;
        }
        out
    }

    /// `∫ z^j z̄^k dμ`.
    pub fn moment(&self, j: usize, k: usize) -> C64 {
        self.atoms
            .iter()
            .map(|&(z, w)| z.powu(j as u32) * z.conj().powu(k as u32) * w)
            .sum()
    }

    /// Center of mass.
    pub fn barycenter(&self) -> C64 {
        self.moment(1, 0) / self.mass()
    }

    pub fn support_radius(&self) -> f64 {
        self.atoms.iter().map(|a| a.0.norm()).fold(0.0, f64::max)
    }

    /// Rows `re,im,weight` with a header line.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["re", "im", "weight"]).map_err(csv_error)?;
        for &(z, wt) in &self.atoms {
            w.write_record([fmt17(z.re), fmt17(z.im), fmt17(wt)]).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Accepts rows `re,im,weight`, with or without a header.
    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(input);
        let mut atoms = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            if line == 0 && rec.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                continue;
            }
            if rec.len() != 3 {
                return Err(Error::Invalid(format!("measure row {} has {} fields", line + 1, rec.len())));
            }
            let f = |k: usize| -> Result<f64> {
                rec[k]
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad number {:?} in row {}", &rec[k], line + 1)))
            };
            atoms.push((C64::new(f(0)?, f(1)?), f(2)?));
        }
        let m = AtomicMeasure::new(atoms);
        m.validate()?;
        Ok(m)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Invalid(format!("csv: {e}"))
}

/// 17 significant digits, enough to round-trip any f64.
pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `(a, w) ↦ Σ_{f(b)=a} (b, w·mult(b))`; total mass scales by `deg f`.
pub fn pullback(f: &Poly, mu: &AtomicMeasure, tol: &ToleranceContext) -> Result<AtomicMeasure> {
    if f.degree() == 0 {
        return Err(Error::Degenerate("pullback by a constant".into()));
    }
    let parts: Vec<Vec<(C64, f64)>> = mu
        .atoms
        .par_iter()
        .map(|&(a, w)| {
            let rs = f.add_constant(-a).roots(tol)?;
            Ok(rs.items.iter().map(|&(b, m)| (b, w * m as f64)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(AtomicMeasure::new(parts.into_iter().flatten().collect()))
}

/// `(a, w) ↦ (f(a), w)`.
pub fn pushforward(f: &Poly, mu: &AtomicMeasure) -> AtomicMeasure {
    AtomicMeasure::new(mu.atoms.iter().map(|&(a, w)| (f.eval(a), w)).collect())
}

/// Largest discrepancy of the moments `∫ z^j z̄^k` with `j + k ≤ 6` between
/// the mass-normalized measures.
pub fn weak_star_distance(a: &AtomicMeasure, b: &AtomicMeasure) -> f64 {
    let (ma, mb) = (a.mass(), b.mass());
    if ma == 0.0 || mb == 0.0 {
        return if ma == mb { 0.0 } else { f64::INFINITY };
    }
    let moments = |m: &AtomicMeasure, mass: f64| -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); (MOMENT_ORDER + 1) * (MOMENT_ORDER + 1)];
        for &(z, w) in &m.atoms {
            let zc = z.conj();
            let mut zj = C64::new(w / mass, 0.0);
            for j in 0..=MOMENT_ORDER {
                let mut t = zj;
                for k in 0..=MOMENT_ORDER - j {
                    out[j * (MOMENT_ORDER + 1) + k] += t;
                    t *= zc;
                }
                zj *= z;
            }
        }
        out
    };
    let (x, y) = (moments(a, ma), moments(b, mb));
    x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

/// Distance between `d⁻¹ f^* μ` and `d′⁻¹ g^* μ`.
pub fn invariance_residual(f: &Poly, g: &Poly, mu: &AtomicMeasure, tol: &ToleranceContext) -> Result<f64> {
    let a = pullback(f, mu, tol)?.scaled(1.0 / f.degree() as f64);
    let b = pullback(g, mu, tol)?.scaled(1.0 / g.degree() as f64);
    Ok(weak_star_distance(&a, &b))
}

/// Bounds on atom growth in iterated pullbacks.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AtomBudget {
    /// Atoms lighter than this are dropped (mass is restored).
    pub weight_floor: f64,
    /// Above this many atoms, the measure is binned on a doubling grid.
    pub max_atoms: usize,
    /// Starting cell size for binning; also the merge radius after each step.
    pub cell: f64,
}

impl Default for AtomBudget {
    fn default() -> Self {
        AtomBudget {
            weight_floor: 1e-14,
            max_atoms: 8192,
            cell: 1e-9,
        }
    }
}

impl AtomBudget {
    fn apply(&self, m: &AtomicMeasure) -> AtomicMeasure {
        m.binned(self.cell).pruned(self.weight_floor).compressed(self.max_atoms, self.cell)
    }
}

/// `T(μ) = g_*(d⁻¹ f^* μ)`.
pub fn transfer(f: &Poly, g: &Poly, mu: &AtomicMeasure, tol: &ToleranceContext) -> Result<AtomicMeasure> {
    Ok(pushforward(g, &pullback(f, mu, tol)?.scaled(1.0 / f.degree() as f64)))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CesaroResult {
    /// The Cesàro average `S_n` returned.
    pub measure: AtomicMeasure,
    pub n: usize,
    /// `‖T(S_n) − S_n‖` in the moment metric.
    pub residual: f64,
    pub converged: bool,
    /// Residual of every `S_k` examined.
    pub history: Vec<f64>,
}

/// Cesàro averages `S_n = (δ₀ + … + δ_{n−1})/n` of the orbit `δ_k = T(δ_{k−1})`,
/// stopping at the first `S_n` with `‖T(S_n) − S_n‖ ≤ tol_fix`. Without
/// convergence the best average seen is returned with `converged = false`.
pub fn cesaro_fixpoint(
    f: &Poly,
    g: &Poly,
    mu0: &AtomicMeasure,
    n_max: usize,
    tol_fix: f64,
    budget: &AtomBudget,
    tol: &ToleranceContext,
) -> Result<CesaroResult> {
    mu0.validate()?;
    if mu0.mass() <= 0.0 {
        return Err(Error::Invalid("initial measure has zero mass".into()));
    }
    let mut delta = budget.apply(&mu0.normalized());
    let mut sum = delta.clone();
    let mut history = Vec::new();
    let mut best: Option<(f64, usize, AtomicMeasure)> = None;
    for n in 1..=n_max.max(1) {
        let s = sum.scaled(1.0 / n as f64);
        let ts = transfer(f, g, &s, tol)?;
        let r = weak_star_distance(&ts, &s);
        history.push(r);
        if r <= tol_fix {
            return Ok(CesaroResult {
                measure: s,
                n,
                residual: r,
                converged: true,
                history,
            });
        }
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, n, s));
        }
        delta = budget.apply(&transfer(f, g, &delta, tol)?);
        sum = budget.apply(&sum.add(&delta));
    }
    let (residual, n, measure) = best.expect("at least one iterate");
    Ok(CesaroResult {
        measure,
        n,
        residual,
        converged: false,
        history,
    })
}

/// Equilibrium measure of the filled Julia set of `p` as the normalized
/// pullback of a Dirac mass through `levels` generations.
pub fn brolin_measure(p: &Poly, levels: usize, budget: &AtomBudget, tol: &ToleranceContext) -> Result<AtomicMeasure> {
    let d = p.degree();
    if d < 2 {
        return Err(Error::Degenerate("equilibrium measure needs degree at least 2".into()));
    }
    // Offset from the critical centroid, which is the only candidate for a
    // finite exceptional point.
    let crit = p.derivative();
    let centroid = -crit.coeff(d - 2) / (crit.leading() * (d - 1) as f64);
    let z0 = centroid + C64::from_polar(1.0 + p.root_radius(), 0.3);
    let mut mu = AtomicMeasure::dirac(z0);
    for _ in 0..levels {
        mu = budget.apply(&pullback(p, &mu, tol)?.scaled(1.0 / d as f64));
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn spec_pullbacks() {
        let tol = ToleranceContext::default();
        let z2 = Poly::monomial(c(1.0, 0.0), 2);
        let m = pullback(&z2, &AtomicMeasure::dirac(c(1.0, 0.0)), &tol).unwrap();
        assert_eq!(m.mass(), 2.0);
        assert!(weak_star_distance(&m, &AtomicMeasure::new(vec![(c(1.0, 0.0), 1.0), (c(-1.0, 0.0), 1.0)])) < 1e-12);

        let g = Poly::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let m = pullback(&g, &AtomicMeasure::dirac(c(0.0, 0.0)), &tol).unwrap();
        assert_eq!(m.mass(), 3.0);
        let m = m.merged(1e-9);
        assert_eq!(m.len(), 2);
        let w0 = m.atoms.iter().find(|a| a.0.norm() < 1e-6).unwrap().1;
        assert_eq!(w0, 2.0);
    }

    #[test]
    fn counterexample_is_one_sixth() {
        let tol = ToleranceContext::default();
        let f = Poly::from_real(&[0.0, -1.0, 1.0]);
        let g = Poly::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let r = invariance_residual(&f, &g, &AtomicMeasure::dirac(c(0.0, 0.0)), &tol).unwrap();
        assert!((r - 1.0 / 6.0).abs() < 1e-12, "{r}");
        assert_eq!(invariance_residual(&f, &f, &AtomicMeasure::dirac(c(0.3, 0.1)), &tol).unwrap(), 0.0);
    }

    #[test]
    fn cesaro_counterexample_fixed_at_once() {
        let tol = ToleranceContext::default();
        let f = Poly::from_real(&[0.0, -1.0, 1.0]);
        let g = Poly::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let r = cesaro_fixpoint(&f, &g, &AtomicMeasure::dirac(c(0.0, 0.0)), 10, 1e-12, &AtomBudget::default(), &tol)
            .unwrap();
        assert!(r.converged);
        assert_eq!(r.n, 1);
    }

    #[test]
    fn csv_round_trip() {
        let m = AtomicMeasure::new(vec![(c(0.1, -2.0), 0.25), (c(1e-17, 3.5), 0.75)]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = AtomicMeasure::read_csv(&buf[..]).unwrap();
        assert_eq!(back, m);
    }
}
