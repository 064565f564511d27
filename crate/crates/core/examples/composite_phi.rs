//! The composite `Phi = f1 o g = g1 o f` of a pair with coprime degrees.

use polydyn::fiber::{build_phi, critical_transport_residual, lemma1_step};
use polydyn::normal_forms::{chebyshev, make_c1_point};
use polydyn::param::pi_map;
use polydyn::{LinearMap, Poly, ToleranceContext, C64};

fn main() -> polydyn::Result<()> {
    let tol = ToleranceContext::default();
    let z = |k| Poly::monomial(C64::new(1.0, 0.0), k);

    let r = build_phi(&z(2), &z(3), 0, &tol)?;
    println!("(z^2, z^3): Phi - z^6 = {:.2e}", r.phi.distance(&z(6)));

    let r = build_phi(&chebyshev(2), &chebyshev(3), 0, &tol)?;
    // Phi is monic and vanishes at 0, so T6 is renormalized to (T6 + 1)/32.
    let t6 = chebyshev(6).add_constant(C64::new(1.0, 0.0)).scale(C64::new(1.0 / 32.0, 0.0));
    println!("(T2, T3): Phi - (T6 + 1)/32 = {:.2e}, symmetric-function spread {:.2e}", r.phi.distance(&t6), r.spread);
    println!("  f1 = {:?}", r.f1.coeffs().iter().map(|c| c.re).collect::<Vec<_>>());

    let (tf, tg) = critical_transport_residual(&chebyshev(5), &chebyshev(3), &chebyshev(5), &chebyshev(3), &tol)?;
    println!("critical transport (T5, T3): {tf:.2e} {tg:.2e}");

    // One step on the normalized family, from a conjugated power pair.
    let sigma1 = LinearMap::new(C64::new(0.8, 0.3), C64::new(0.0, 0.0));
    let start = pi_map(&make_c1_point(3, 2, &sigma1, C64::new(1.1, 0.4), &tol)?);
    let (f1, g1) = lemma1_step(&start.f, &start.g, start.alpha, &tol)?;
    println!(
        "lemma step: |f1 o g0 - g1 o f0| = {:.2e}, lead g1 = {:.4} (alpha^3 = {:.4})",
        f1.compose(&start.g).relative_distance(&g1.compose(&start.f)),
        g1.leading(),
        start.alpha.powu(3)
    );
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
