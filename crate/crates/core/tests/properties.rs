//! Property tests of the algebraic, dynamical and potential-theoretic invariants.

mod common;

use common::*;
use polydyn::classify::theorem1_classify;
use polydyn::fiber::{build_phi, composite_fiber, fiber, gcd_factor, linear_relation, sample_points};
use polydyn::normal_forms::{
    chebyshev, detect_c1, detect_c2, detect_chebyshev, detect_power, make_c1_point, make_c2_point,
};
use polydyn::param::{critical_readback, dd_endo, in_n_truncated, pi_map, Horizon, ParamPoint};
use polydyn::potential::{
    a_functional, angular_step, default_outer_radius, escape_green, grid_green, preimage_set, pullback,
    pushforward, weak_star_distance, AtomicMeasure, BoundingBox, PixelSet,
};
use polydyn::series::{boettcher, conjugacy_residual, deck, invariance_residual, series_scale};
use polydyn::{LinearMap, PointMultiset, Poly, TailSeries, ToleranceContext, C64};
use proptest::prelude::*;
use rand::Rng;

fn tol() -> ToleranceContext {
    ToleranceContext::default()
}

fn multiset(points: Vec<C64>) -> PointMultiset {
    PointMultiset::from_points(&points, 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compose_is_associative(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (p, q, r) = (random_poly(&mut rng, 3), random_poly(&mut rng, 2), random_poly(&mut rng, 3));
        let lhs = p.compose(&q).compose(&r);
        let rhs = p.compose(&q.compose(&r));
        prop_assert!(lhs.relative_distance(&rhs) <= 1e-12);
    }

    #[test]
    fn conjugate_round_trip(seed in any::<u64>(), deg in 1usize..8) {
        let mut rng = rng(seed);
        let p = random_poly(&mut rng, deg);
        let s = random_linear(&mut rng);
        let back = p.conjugate(&s, &s.inverse()).conjugate(&s.inverse(), &s);
        prop_assert!(back.relative_distance(&p) <= 1e-10);
    }

    #[test]
    fn roots_count_and_residual(seed in any::<u64>(), deg in 1usize..16) {
        let mut rng = rng(seed);
        let p = random_poly(&mut rng, deg);
        let rs = p.roots(&tol()).unwrap();
        prop_assert_eq!(rs.total(), deg);
        for &(z, _) in &rs.items {
            let scale: f64 = p.coeffs().iter().enumerate().map(|(k, c)| c.norm() * z.norm().powi(k as i32)).sum();
            prop_assert!(p.eval(z).norm() <= 1e-8 * scale.max(1.0));
        }
    }

    #[test]
    fn roots_with_multiplicity(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = (unit_disk(&mut rng), unit_disk(&mut rng) + c(2.0, 0.0));
        let p = Poly::from_roots(&[a, a, a, b, b]);
        let rs = p.roots(&tol()).unwrap();
        prop_assert!(rs.distance(&PointMultiset::new(vec![(a, 3), (b, 2)])) <= 1e-6);
    }

    #[test]
    fn chain_rule_for_critical_points(seed in any::<u64>(), dp in 2usize..5, dq in 2usize..5) {
        let tol = tol();
        let mut rng = rng(seed);
        let (p, q) = (random_poly(&mut rng, dp), random_poly(&mut rng, dq));
        let lhs = p.compose(&q).critical_points(&tol).unwrap();
        let mut rhs = q.critical_points(&tol).unwrap().expanded();
        for w in p.critical_points(&tol).unwrap().expanded() {
            rhs.extend(q.add_constant(-w).roots(&tol).unwrap().expanded());
        }
        prop_assert_eq!(lhs.total(), rhs.len());
        prop_assert!(lhs.distance(&multiset(rhs)) <= 1e-5);
    }

    #[test]
    fn left_divide_round_trip(seed in any::<u64>(), dr in 1usize..7, dp in 1usize..5) {
        let mut rng = rng(seed);
        let (r, p) = (random_poly(&mut rng, dr), random_poly(&mut rng, dp));
        let phi = r.compose(&p);
        prop_assert!(phi.degree() <= 24);
        let got = phi.left_divide(&p, &tol()).expect("division");
        prop_assert!(got.distance(&r) <= 1e-8);
    }

    #[test]
    fn deck_is_periodic_and_permutes_fibers(seed in any::<u64>(), d in 2usize..=12) {
        let mut rng = rng(seed);
        let p = random_poly(&mut rng, d);
        let n = 2 * d + 16;
        let delta = deck(&p, n, &tol()).unwrap();
        let period = delta.iterate(d).weighted_distance(&TailSeries::identity(n), series_scale(&p));
        prop_assert!(period <= 1e-6, "δᵈ residual {period}");
        prop_assert!(invariance_residual(&p, &delta) <= 1e-6);
    }

    #[test]
    fn boettcher_scaling_equivariance(seed in any::<u64>(), d in 2usize..=8) {
        let tol = tol();
        let mut rng = rng(seed);
        let p = random_poly(&mut rng, d);
        let a = random_linear(&mut rng).a;
        let n = 2 * d + 16;
        let b = boettcher(&p, n, &tol).unwrap();
        // σ⁻¹∘P∘σ with σ(z) = az has Böttcher series B(az)/a
        let pa = p.conjugate(&LinearMap::scaling(a.inv()), &LinearMap::scaling(a));
        let ba = b.compose(&TailSeries::rotation(a, n)).scale(a.inv());
        prop_assert!(conjugacy_residual(&pa, &ba) <= 1e-8);
        prop_assert!(ba.weighted_distance(&boettcher(&pa, n, &tol).unwrap(), series_scale(&pa)) <= 1e-8);
    }

    #[test]
    fn boettcher_low_orders_are_stable(seed in any::<u64>(), d in 2usize..=8) {
        let tol = tol();
        let mut rng = rng(seed);
        let p = random_poly(&mut rng, d);
        let short = boettcher(&p, 10, &tol).unwrap();
        let long = boettcher(&p, 30, &tol).unwrap();
        prop_assert_eq!(short.rho, long.rho);
        prop_assert_eq!(&short.coeffs[..], &long.coeffs[..=10]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gcd_factor_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = rng.gen_range(2..=4);
        let (a, b) = coprime_degrees(&mut rng, 5);
        let q = monic_factor(&mut rng, m);
        let (f0, g0) = (random_poly(&mut rng, a), random_poly(&mut rng, b));
        let r = gcd_factor(&f0.compose(&q), &g0.compose(&q), &tol()).unwrap();
        prop_assert!(r.q.distance(&q) <= 1e-6);
        prop_assert!(r.f0.distance(&f0) <= 1e-6);
        prop_assert!(r.g0.distance(&g0) <= 1e-6);
    }

    #[test]
    fn phi_result_properties(seed in any::<u64>()) {
        let tol = tol();
        let mut rng = rng(seed);
        let (d, dd) = coprime_degrees(&mut rng, 5);
        let (s, t) = (random_linear(&mut rng), random_linear(&mut rng));
        let (f, g) = if rng.gen_bool(0.5) {
            (Poly::monomial(c(1.0, 0.0), d).conjugate(&s, &t), Poly::monomial(unit_disk(&mut rng) + c(1.0, 0.0), dd).conjugate(&s, &t))
        } else {
            (chebyshev(d).conjugate(&s, &t), chebyshev(dd).scale(c(sign(&mut rng), 0.0)).conjugate(&s, &t))
        };
        let r = build_phi(&f, &g, 0, &tol).unwrap();
        prop_assert_eq!(r.phi.degree(), d * dd);
        prop_assert!(r.phi.coeff(0).norm() <= 1e-12);
        prop_assert!((r.phi.leading() - c(1.0, 0.0)).norm() <= 1e-12);
        prop_assert!(r.f1.compose(&g).relative_distance(&r.phi) <= 1e-6);
        prop_assert!(r.g1.compose(&f).relative_distance(&r.phi) <= 1e-6);
        // fresh base points on the sampling circle, away from the ones used
        let radius = sample_points(&f, &g, &tol).unwrap()[0].norm();
        for _ in 0..3 {
            let z = C64::from_polar(radius, rng.gen_range(0.0..std::f64::consts::TAU));
            let composite = multiset(composite_fiber(&f, &g, z, &tol).unwrap());
            let phi_fiber = fiber(&r.phi, z, &tol).unwrap();
            prop_assert!(phi_fiber.distance(&composite) <= 1e-6);
            // F = f⁻¹(f(F_g(z))) = g⁻¹(g(F_f(z)))
            let other = multiset(composite_fiber(&g, &f, z, &tol).unwrap());
            prop_assert!(other.distance(&composite) <= 1e-6);
        }
    }

    #[test]
    fn equal_degrees_with_shared_fibers_are_linearly_related(seed in any::<u64>(), d in 2usize..7) {
        let tol = tol();
        let mut rng = rng(seed);
        let g = random_poly(&mut rng, d);
        let s = random_linear(&mut rng);
        let f = s.to_poly().compose(&g);
        let z = unit_disk(&mut rng);
        prop_assert!(fiber(&f, z, &tol).unwrap().distance(&fiber(&g, z, &tol).unwrap()) <= 1e-6);
        let got = linear_relation(&f, &g, &tol).expect("linear relation");
        prop_assert!(got.distance(&s) <= 1e-8);
    }

    #[test]
    fn pi_map_reads_back(seed in any::<u64>()) {
        let tol = tol();
        let mut rng = rng(seed);
        let (a, b) = coprime_degrees(&mut rng, 6);
        let (d, dd) = (a.max(b), a.min(b));
        let x: Vec<C64> = (1..d).map(|_| unit_disk(&mut rng)).collect();
        let y: Vec<C64> = (1..dd).map(|_| unit_disk(&mut rng)).collect();
        let p = ParamPoint::new(x.clone(), y.clone(), random_linear(&mut rng).a, d, dd).unwrap();
        let couple = pi_map(&p);
        prop_assert!(couple.gauge_residual() <= 1e-12);
        let (cx, cy) = critical_readback(&couple, &tol).unwrap();
        prop_assert!(cx.distance(&multiset(x)) <= 1e-6);
        prop_assert!(cy.distance(&multiset(y)) <= 1e-6);
    }

    #[test]
    fn alpha_component_is_alpha_to_the_d(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = coprime_degrees(&mut rng, 6);
        let (d, dd) = (a.max(b), a.min(b));
        let x: Vec<C64> = (1..d).map(|_| unit_disk(&mut rng)).collect();
        let y: Vec<C64> = (1..dd).map(|_| unit_disk(&mut rng)).collect();
        let alpha = random_linear(&mut rng).a;
        let p = ParamPoint::new(x, y, alpha, d, dd).unwrap();
        prop_assert_eq!(dd_endo(&p).alpha, alpha.powu(d as u32));
    }

    #[test]
    fn chebyshev_polynomials_commute(d in 1usize..=8, dd in 1usize..=8) {
        let (a, b) = (chebyshev(d).compose(&chebyshev(dd)), chebyshev(dd).compose(&chebyshev(d)));
        prop_assert!(a.relative_distance(&b) <= 1e-10);
    }

    #[test]
    fn normal_forms_detected_on_conjugates(seed in any::<u64>(), d in 2usize..=10) {
        let tol = tol();
        let mut rng = rng(seed);
        let s = random_linear(&mut rng);
        let f = Poly::monomial(c(1.0, 0.0), d).conjugate(&s.inverse(), &s);
        let w = detect_power(&f, &tol).expect("power form");
        prop_assert!(w.reconstruct().relative_distance(&f) <= 1e-8);
        let sg = sign(&mut rng);
        let f = chebyshev(d).scale(c(sg, 0.0)).conjugate(&s.inverse(), &s);
        let w = detect_chebyshev(&f, &tol).expect("Chebyshev form");
        prop_assert!(w.reconstruct().relative_distance(&f) <= 1e-8);
    }

    #[test]
    fn escape_green_functional_equation(seed in any::<u64>(), d in 2usize..=6) {
        let mut rng = rng(seed);
        let p = random_poly(&mut rng, d);
        let z = C64::from_polar(2.0 * p.root_radius().max(1.0) + 1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let (a, b) = (escape_green(&p, p.eval(z), 200), escape_green(&p, z, 200));
        prop_assert!(b > 0.0);
        prop_assert!((a - d as f64 * b).abs() <= 1e-6);
    }

    #[test]
    fn pullback_mass_and_projection(seed in any::<u64>(), d in 1usize..=8, n in 1usize..=6) {
        let tol = tol();
        let mut rng = rng(seed);
        let f = random_poly(&mut rng, d);
        let mu = AtomicMeasure::new((0..n).map(|_| (unit_disk(&mut rng), rng.gen_range(0.1..1.0))).collect());
        let back = pullback(&f, &mu, &tol).unwrap();
        prop_assert!((back.mass() - d as f64 * mu.mass()).abs() <= 1e-12 * back.mass());
        let there = pushforward(&f, &back);
        prop_assert_eq!(there.mass(), back.mass());
        prop_assert!(weak_star_distance(&there, &mu) <= 1e-8);
    }

    #[test]
    fn classification_is_conjugation_covariant(seed in any::<u64>(), family in 0usize..3) {
        let tol = tol();
        let mut rng = rng(seed);
        let fam = [Family::Factor, Family::Power, Family::Chebyshev][family];
        let p = constructed(&mut rng, fam, 2);
        let (s, t) = (random_linear(&mut rng), random_linear(&mut rng));
        let a = theorem1_classify(&p.f, &p.g, &tol).unwrap();
        let b = theorem1_classify(&p.f.conjugate(&s, &t), &p.g.conjugate(&s, &t), &tol).unwrap();
        prop_assert_eq!(a.branch, b.branch);
    }

    #[test]
    fn generic_pairs_stay_unclassified_under_conjugation(seed in any::<u64>()) {
        let tol = tol();
        let mut rng = rng(seed);
        let (f, g) = (random_poly(&mut rng, 4), random_poly(&mut rng, 6));
        let (s, t) = (random_linear(&mut rng), random_linear(&mut rng));
        let a = theorem1_classify(&f, &g, &tol).unwrap();
        let b = theorem1_classify(&f.conjugate(&s, &t), &g.conjugate(&s, &t), &tol).unwrap();
        prop_assert_eq!(a.branch, b.branch);
    }

    #[test]
    fn serde_round_trips(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_poly(&mut rng, 5);
        let back: Poly = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        prop_assert_eq!(&back, &p);
        let s = random_linear(&mut rng);
        let back: LinearMap = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        prop_assert_eq!(&back, &s);
        let pt = ParamPoint::new(vec![unit_disk(&mut rng); 2], vec![unit_disk(&mut rng)], s.a, 3, 2).unwrap();
        let back: ParamPoint = serde_json::from_str(&serde_json::to_string(&pt).unwrap()).unwrap();
        prop_assert_eq!(&back, &pt);
        let b = boettcher(&p, 12, &tol()).unwrap();
        let back: TailSeries = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        prop_assert_eq!(&back, &b);
    }

    #[test]
    fn csv_round_trip_is_exact(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = rng(seed);
        let mu = AtomicMeasure::new((0..n).map(|_| (unit_disk(&mut rng) * 1e3, rng.gen_range(1e-12..1.0))).collect());
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        let back = AtomicMeasure::read_csv(&buf[..]).unwrap();
        prop_assert_eq!(&back, &mu);
    }

    #[test]
    fn pgm_round_trip(seed in any::<u64>(), w in 1usize..40, h in 1usize..40) {
        let mut rng = rng(seed);
        let bbox = BoundingBox::new(-1.0, -0.5, 2.0, 1.5);
        let mut e = PixelSet::empty(bbox, w, h);
        for j in 0..h {
            for i in 0..w {
                e.set(i, j, rng.gen_bool(0.4));
            }
        }
        let mut buf = Vec::new();
        e.write_pgm(&mut buf).unwrap();
        let back = PixelSet::read_pgm(&buf[..], bbox).unwrap();
        prop_assert_eq!(&back, &e);
    }
}

const PAIRS: [(usize, usize); 4] = [(3, 2), (4, 3), (5, 2), (5, 3)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Constructed C₁ points pass the finite membership test, are recognized
    /// as power pairs, and their image under D passes with one step less.
    #[test]
    fn c1_points_are_in_n(seed in any::<u64>(), pair in 0usize..4) {
        let tol = tol();
        let mut rng = rng(seed);
        let (d, dd) = PAIRS[pair];
        let s1 = LinearMap::new(random_linear(&mut rng).a, c(0.0, 0.0));
        let a = random_linear(&mut rng).a;
        let p = make_c1_point(d, dd, &s1, a, &tol).unwrap();
        let h = Horizon::default();
        let v = in_n_truncated(&p, &h, &tol).unwrap();
        prop_assert!(v.pass, "worst {}", v.worst);
        prop_assert!(detect_c1(&p, &tol).is_some() || detect_c2(&p, &tol).is_some());
        let image = dd_endo(&p);
        let shorter = Horizon { n_max: h.n_max - 1, ..h };
        prop_assert!(in_n_truncated(&image, &shorter, &tol).unwrap().pass);
    }

    /// Every C₂ point passes unless the pair has an even degree, the case in
    /// which the critical-set transport defining D is not a multiset identity.
    #[test]
    fn c2_points_are_in_n_for_odd_degrees(seed in any::<u64>(), pair in 0usize..4, signs in 0usize..4) {
        let tol = tol();
        let mut rng = rng(seed);
        let (d, dd) = PAIRS[pair];
        let signs = [(1, 1), (1, -1), (-1, 1), (-1, -1)][signs];
        let s1 = LinearMap::new(random_linear(&mut rng).a, c(0.0, 0.0));
        let p = make_c2_point(d, dd, &s1, signs, rng.gen_range(0..d), &tol).unwrap();
        let v = in_n_truncated(&p, &Horizon::default(), &tol).unwrap();
        let odd = d % 2 == 1 && dd % 2 == 1;
        prop_assert_eq!(v.pass, odd, "({}, {}) worst {}", d, dd, v.worst);
        if odd {
            prop_assert!(detect_c2(&p, &tol).is_some());
            let shorter = Horizon { n_max: 3, ..Horizon::default() };
            prop_assert!(in_n_truncated(&dd_endo(&p), &shorter, &tol).unwrap().pass);
        }
    }
}

#[test]
fn chebyshev_critical_sets_under_coprime_chebyshev() {
    let tol = tol();
    for d in 2..=7usize {
        for dd in 2..=7usize {
            if gcd(d, dd) != 1 {
                continue;
            }
            let crit = chebyshev(d).critical_points(&tol).unwrap();
            let image = crit.map(|z| chebyshev(dd).eval(z));
            // as sets, always
            for (z, _) in &image.items {
                assert!(crit.items.iter().any(|(w, _)| (z - w).norm() <= 1e-8), "T{dd}(C_T{d})");
            }
            // as multisets, exactly when the outer degree is odd
            assert_eq!(image.distance(&crit) <= 1e-8, dd % 2 == 1, "T{dd}(C_T{d}) multiset");
        }
    }
}

#[test]
fn capacity_scales_linearly() {
    let o = c(0.0, 0.0);
    for (name, make) in [
        ("disk", (|b, r| PixelSet::disk(b, 121, 121, c(0.0, 0.0), r)) as fn(BoundingBox, f64) -> PixelSet),
        ("segment", |b, r| PixelSet::segment(b, 121, 121, c(-r, 0.0), c(r, 0.0))),
    ] {
        let cap = |r: f64| {
            let e = make(BoundingBox::square(o, 1.25 * r), r);
            grid_green(&e, default_outer_radius(&e).unwrap()).unwrap().capacity()
        };
        let (c1, c2) = (cap(1.0), cap(2.0));
        assert!((c2 / c1 / 2.0 - 1.0).abs() <= 0.03, "{name}: {c1} {c2}");
    }
}

#[test]
fn a_functional_divides_by_degree_on_circle_sets() {
    use std::f64::consts::PI;
    let o = c(0.0, 0.0);
    let b = BoundingBox::square(o, 1.5);
    for (t0, t1) in [(0.0, PI), (0.5, 2.0), (-1.0, 3.5)] {
        let e = PixelSet::arc(b, 403, 403, o, 1.0, t0, t1);
        let a = a_functional(&e, 1.0).unwrap();
        for d in 2..=3 {
            let pre = preimage_set(&Poly::monomial(c(1.0, 0.0), d), &e, 403, 403);
            let ad = a_functional(&pre, 1.0).unwrap();
            let step = angular_step(&pre, 1.0);
            assert!((ad - a / d as f64).abs() <= step, "arc ({t0}, {t1}), d = {d}: {ad} vs {}", a / d as f64);
        }
    }
}
