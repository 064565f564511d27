//! Classification of pairs by common right factor and normal form.

use polydyn::classify::theorem1_classify;
use polydyn::normal_forms::chebyshev;
use polydyn::potential::{invariance_residual, AtomicMeasure};
use polydyn::{LinearMap, Poly, ToleranceContext, C64};

fn main() -> polydyn::Result<()> {
    let tol = ToleranceContext::default();
    let z = |k| Poly::monomial(C64::new(1.0, 0.0), k);
    let q = Poly::new(vec![C64::new(0.0, 0.0), C64::new(-0.3, 0.6), C64::new(1.0, 0.0)]);
    let sigma = LinearMap::new(C64::new(0.9, 0.3), C64::new(0.1, -0.2));
    let cases = [
        ("z^4, z^2", z(4), z(2)),
        ("z^6, a z^4", z(6), Poly::monomial(C64::new(0.7, -0.4), 4)),
        ("T3 o Q, T2 o Q", chebyshev(3).compose(&q), chebyshev(2).compose(&q)),
        (
            "sigma o (T3, -T2) o Q",
            chebyshev(3).conjugate(&sigma, &LinearMap::identity()).compose(&q),
            chebyshev(2).scale(C64::new(-1.0, 0.0)).conjugate(&sigma, &LinearMap::identity()).compose(&q),
        ),
        ("z^3 + z, z^2", Poly::from_real(&[0.0, 1.0, 0.0, 1.0]), z(2)),
        ("z^4 + z, z^6 + z", Poly::from_real(&[0.0, 1.0, 0.0, 0.0, 1.0]), Poly::from_real(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0])),
    ];
    for (name, f, g) in cases {
        let r = theorem1_classify(&f, &g, &tol)?;
        println!("{name:<24} {:?}  deg Q = {}  {}", r.branch, r.q.degree(), r.cause.unwrap_or_default());
    }

    // The classifier does not check the measure hypothesis; this pair fails it.
    let f = Poly::from_real(&[0.0, -1.0, 1.0]);
    let g = Poly::from_real(&[0.0, 0.0, -1.0, 1.0]);
    let r = invariance_residual(&f, &g, &AtomicMeasure::dirac(C64::new(0.0, 0.0)), &tol)?;
    println!("z(z-1), z^2(z-1) at a Dirac mass at 0: invariance residual {r:.6} (1/6 = {:.6})", 1.0 / 6.0);
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
