//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use polydyn::normal_forms::chebyshev;
use polydyn::{LinearMap, Poly, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Uniform in the closed unit disk.
pub fn unit_disk(rng: &mut impl Rng) -> C64 {
    loop {
        let z = c(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if z.norm() <= 1.0 {
            return z;
        }
    }
}

/// Coefficients uniform in the unit disk; the leading one is redrawn until
/// its modulus is at least 0.2.
pub fn disk_poly(rng: &mut impl Rng, deg: usize) -> Poly {
    let mut cs: Vec<C64> = (0..=deg).map(|_| unit_disk(rng)).collect();
    while cs[deg].norm() < 0.2 {
        cs[deg] = unit_disk(rng);
    }
    Poly::new(cs)
}

/// Leading coefficient near one, the rest in the square `[−1, 1]²`.
pub fn random_poly(rng: &mut impl Rng, deg: usize) -> Poly {
    let mut cs: Vec<C64> = (0..=deg)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    cs[deg] = c(1.0, 0.0) + cs[deg] * 0.3;
    Poly::new(cs)
}

/// `a` with modulus in `[0.6, 1.4]`, `b` in the unit disk.
pub fn random_linear(rng: &mut impl Rng) -> LinearMap {
    let a = C64::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(0.0..std::f64::consts::TAU));
    LinearMap::new(a, unit_disk(rng))
}

/// Monic with `Q(0) = 0`.
pub fn monic_factor(rng: &mut impl Rng, deg: usize) -> Poly {
    if deg == 1 {
        return Poly::identity();
    }
    random_poly(rng, deg).monic_gauge().0
}

pub fn sign(rng: &mut impl Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Coprime `(a, b)` with `2 ≤ a, b ≤ max`.
pub fn coprime_degrees(rng: &mut impl Rng, max: usize) -> (usize, usize) {
    loop {
        let (a, b) = (rng.gen_range(2..=max), rng.gen_range(2..=max));
        if gcd(a, b) == 1 {
            return (a, b);
        }
    }
}

/// Which normal-form family a constructed pair comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Factor,
    Power,
    Chebyshev,
}

/// A pair `(f, g) = (f₀∘Q, g₀∘Q)` with known `Q` (monic, `Q(0) = 0`).
pub struct Constructed {
    pub family: Family,
    pub f: Poly,
    pub g: Poly,
    pub q: Poly,
}

/// A pair built from one family:
/// - `Factor`: `f = f₀∘Q`, `g = σ∘Q`;
/// - `Power`: `f = σ∘zᵃ∘τ∘Q`, `g = σ∘(s·z^b)∘τ∘Q`;
/// - `Chebyshev`: `f = σ∘(±T_a)∘τ∘Q`, `g = σ∘(±T_b)∘τ∘Q`.
///
/// In the last two `a, b ≥ 2` are coprime so that `Q` is the whole common
/// right factor.
pub fn constructed(rng: &mut impl Rng, family: Family, max_q: usize) -> Constructed {
    let m = rng.gen_range(1..=max_q);
    let q = monic_factor(rng, m);
    let sigma = random_linear(rng);
    let tau = random_linear(rng);
    let (f0, g0) = match family {
        Family::Factor => {
            // deg Q ≥ 2 here, otherwise g would be linear
            let (m, a) = (rng.gen_range(2..=max_q.max(2)), rng.gen_range(2..=4));
            let q = monic_factor(rng, m);
            let f0 = random_poly(rng, a);
            return Constructed {
                family,
                f: f0.compose(&q),
                g: sigma.to_poly().compose(&q),
                q,
            };
        }
        Family::Power => {
            let (a, b) = coprime_degrees(rng, 5);
            let s = C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
            (
                Poly::monomial(c(1.0, 0.0), a).conjugate(&sigma, &tau),
                Poly::monomial(s, b).conjugate(&sigma, &tau),
            )
        }
        Family::Chebyshev => {
            let (a, b) = coprime_degrees(rng, 5);
            let (sa, sb) = (sign(&mut *rng), sign(&mut *rng));
            (
                chebyshev(a).scale(c(sa, 0.0)).conjugate(&sigma, &tau),
                chebyshev(b).scale(c(sb, 0.0)).conjugate(&sigma, &tau),
            )
        }
    };
    Constructed {
        family,
        f: f0.compose(&q),
        g: g0.compose(&q),
        q,
    }
}

/// Degree pairs of the generic (unrelated) pairs: coprime and not.
pub const GENERIC_DEGREES: [(usize, usize); 10] =
    [(2, 3), (3, 2), (4, 6), (2, 4), (6, 3), (3, 4), (4, 2), (2, 5), (6, 4), (3, 6)];

pub fn generic_pairs(seed: u64, n: usize) -> Vec<(Poly, Poly)> {
    let mut rng = rng(seed);
    (0..n)
        .map(|i| {
            let (a, b) = GENERIC_DEGREES[i % GENERIC_DEGREES.len()];
            (random_poly(&mut rng, a), random_poly(&mut rng, b))
        })
        .collect()
}
