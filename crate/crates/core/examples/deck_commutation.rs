//! Deck transformations of related and unrelated pairs.
//!
//! Pairs with a common right factor have commuting deck transformations
//! whose powers agree; a generic pair does not.

use polydyn::normal_forms::chebyshev;
use polydyn::series::{deck_commutator_residual, deck_power_residual, default_order};
use polydyn::{Poly, ToleranceContext, C64};

fn main() -> polydyn::Result<()> {
    let tol = ToleranceContext::default();
    let q = Poly::new(vec![C64::new(0.0, 0.0), C64::new(0.4, -0.2), C64::new(1.0, 0.0)]);
    let pairs = [
        ("z^4, z^6", Poly::monomial(C64::new(1.0, 0.0), 4), Poly::monomial(C64::new(1.0, 0.0), 6)),
        ("T2, T3", chebyshev(2), chebyshev(3)),
        ("T3 o Q, T2 o Q", chebyshev(3).compose(&q), chebyshev(2).compose(&q)),
        ("z^2 + z, z^3", Poly::from_real(&[0.0, 1.0, 1.0]), Poly::monomial(C64::new(1.0, 0.0), 3)),
    ];
    println!("{:<16} {:>12} {:>12}", "pair", "commutator", "powers");
    for (name, f, g) in pairs {
        let n = default_order(&[f.degree(), g.degree()]);
        let c = deck_commutator_residual(&f, &g, n, &tol)?;
        let p = deck_power_residual(&f, &g, n, &tol)?;
        println!("{name:<16} {c:>12.3e} {p:>12.3e}");
    }
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
