use serde::{Deserialize, Serialize};

use super::C64;

/// Points with positive multiplicities.
///
/// Comparison is by greedy minimal-distance matching of the expanded point
/// lists; storage order is canonical after [`PointMultiset::canonicalize`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointMultiset {
    pub items: Vec<(C64, usize)>,
}

impl PointMultiset {
    pub fn new(items: Vec<(C64, usize)>) -> Self {
        let mut m = PointMultiset {
            items: items.into_iter().filter(|&(_, k)| k > 0).collect(),
        };
        m.canonicalize(1e-9);
        m
    }

    /// Every point with multiplicity one, then merged at `radius`.
    pub fn from_points(points: &[C64], radius: f64) -> Self {
        Self::new(points.iter().map(|&z| (z, 1)).collect()).merged(radius)
    }

    pub fn total(&self) -> usize {
        self.items.iter().map(|&(_, k)| k).sum()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Each point repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<C64> {
        self.items
            .iter()
            .flat_map(|&(z, k)| std::iter::repeat_n(z, k))
            .collect()
    }

    /// Sort by (re, im) after rounding to a grid of spacing `grid`.
    pub fn canonicalize(&mut self, grid: f64) {
        let key = |z: &C64| {
            let g = grid.max(f64::MIN_POSITIVE);
            ((z.re / g).round(), (z.im / g).round(), z.re, z.im)
        };
        self.items.sort_by(|a, b| {
            key(&a.0)
                .partial_cmp(&key(&b.0))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    /// Single-linkage merge of points closer than `radius·max(1, |z|)`;
    /// merged points sit at the multiplicity-weighted mean.
    pub fn merged(&self, radius: f64) -> Self {
        let n = self.items.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut j = i;
            while p[j] != r {
                let next = p[j];
                p[j] = r;
                j = next;
            }
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                let (zi, zj) = (self.items[i].0, self.items[j].0);
                let scale = 1f64.max(zi.norm()).max(zj.norm());
                if (zi - zj).norm() <= radius * scale {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri] = rj;
                    }
                }
            }
        }
        let mut groups: Vec<(usize, C64, usize)> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            let (z, k) = self.items[i];
            match groups.iter_mut().find(|g| g.0 == r) {
                Some(g) => {
                    g.1 += z * k as f64;
                    g.2 += k;
                }
                None => groups.push((r, z * k as f64, k)),
            }
        }
        Self::new(
            groups
                .into_iter()
                .map(|(_, s, k)| (s / k as f64, k))
                .collect(),
        )
    }

    /// Image multiset under `f`, multiplicities carried along.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::new(self.items.iter().map(|&(z, k)| (f(z), k)).collect())
    }

    /// Multiset union.
    pub fn union(&self, other: &PointMultiset) -> Self {
        let mut items = self.items.clone();
        items.extend(other.items.iter().copied());
        Self::new(items)
    }

    /// Largest matched distance under greedy minimal-distance matching of
    /// the expanded lists; infinite when total multiplicities differ.
    pub fn distance(&self, other: &PointMultiset) -> f64 {
        matching_distance(&self.expanded(), &other.expanded())
    }

    pub fn approx_eq(&self, other: &PointMultiset, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

/// Greedy matching distance between two equally long point lists.
pub fn matching_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(d);
        matched += 1;
        if matched == a.len() {
            break;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn distance_respects_multiplicity() {
        let a = PointMultiset::new(vec![(c(0.0, 0.0), 2), (c(1.0, 0.0), 1)]);
        let b = PointMultiset::new(vec![(c(1.0, 0.0), 1), (c(0.0, 0.0), 2)]);
        assert_eq!(a.distance(&b), 0.0);
        let c1 = PointMultiset::new(vec![(c(0.0, 0.0), 1), (c(1.0, 0.0), 2)]);
        assert!((a.distance(&c1) - 1.0).abs() < 1e-15);
        let short = PointMultiset::new(vec![(c(0.0, 0.0), 2)]);
        assert!(a.distance(&short).is_infinite());
    }

    #[test]
    fn merge_collapses_close_points() {
        let m = PointMultiset::from_points(&[c(1.0, 0.0), c(1.0 + 1e-9, 0.0), c(-1.0, 0.0)], 1e-6);
        assert_eq!(m.len(), 2);
        assert_eq!(m.total(), 3);
        assert_eq!(m.items[1].1, 2);
    }

    #[test]
    fn canonical_order() {
        let m = PointMultiset::new(vec![(c(1.0, 0.0), 1), (c(-1.0, 2.0), 1), (c(-1.0, -2.0), 1)]);
        assert_eq!(m.items[0].0, c(-1.0, -2.0));
        assert_eq!(m.items[2].0, c(1.0, 0.0));
    }
}
