//! Pullback and pushforward of atomic measures, Cesàro averages and the
//! equilibrium measure of a Julia set by iterated pullback.

use polydyn::normal_forms::chebyshev;
use polydyn::potential::{
    brolin_measure, cesaro_fixpoint, pullback, pushforward, weak_star_distance, AtomBudget, AtomicMeasure,
};
use polydyn::{Poly, ToleranceContext, C64};

fn main() -> polydyn::Result<()> {
    let tol = ToleranceContext::default();
    let f = Poly::from_real(&[0.0, -1.0, 1.0]);
    let g = Poly::from_real(&[0.0, 0.0, -1.0, 1.0]);
    let dirac0 = AtomicMeasure::dirac(C64::new(0.0, 0.0));

    let pf = pullback(&f, &dirac0, &tol)?;
    let pg = pullback(&g, &dirac0, &tol)?.merged(1e-9);
    println!("f^* delta_0 = {:?}", pf.atoms);
    println!("g^* delta_0 = {:?}", pg.atoms);
    println!("f_* f^* delta_0 = 2 delta_0: {:.1e}", weak_star_distance(&pushforward(&f, &pf), &dirac0.scaled(2.0)));

    let r = cesaro_fixpoint(&f, &g, &dirac0, 10, 1e-12, &AtomBudget::default(), &tol)?;
    println!("Cesaro on (z(z-1), z^2(z-1)) from delta_0: n = {}, residual {:.1e}", r.n, r.residual);

    let z2 = Poly::monomial(C64::new(1.0, 0.0), 2);
    let z3 = Poly::monomial(C64::new(1.0, 0.0), 3);
    let start = AtomicMeasure::dirac(C64::from_polar(1.0, 0.7));
    let r = cesaro_fixpoint(&z2, &z3, &start, 60, 5e-2, &AtomBudget::default(), &tol)?;
    println!(
        "Cesaro on (z^2, z^3) from a point of the circle: n = {}, residual {:.3e}, {} atoms",
        r.n,
        r.residual,
        r.measure.len()
    );

    let mu = brolin_measure(&chebyshev(2), 10, &AtomBudget::default(), &tol)?;
    // The arcsine law on [-1, 1] has second moment 1/2.
    println!("equilibrium measure of T2: {} atoms, second moment {:.6}", mu.len(), mu.moment(2, 0).re);
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
