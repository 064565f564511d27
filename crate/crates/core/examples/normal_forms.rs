//! Power and Chebyshev normal forms up to affine conjugation.

use polydyn::normal_forms::{chebyshev, detect_chebyshev, detect_chebyshev_pair, detect_power, detect_power_pair, psi_residual};
use polydyn::{LinearMap, Poly, ToleranceContext, C64};

fn main() -> polydyn::Result<()> {
    let tol = ToleranceContext::default();
    for k in 1..=6 {
        println!("T{k} = {:?}  (T_k o psi = psi o z^k: {:.1e})", chebyshev(k).coeffs().iter().map(|c| c.re).collect::<Vec<_>>(), psi_residual(k));
    }

    let sigma = LinearMap::new(C64::new(1.2, -0.5), C64::new(0.3, 0.1));
    let tau = LinearMap::new(C64::new(0.6, 0.2), C64::new(-0.4, 0.0));
    let f = chebyshev(5).conjugate(&sigma, &tau);
    let w = detect_chebyshev(&f, &tol).expect("conjugated T5");
    println!("sigma o T5 o tau: sign {}, residual {:.2e}", w.sign, w.residual);

    let g = chebyshev(3).scale(C64::new(-1.0, 0.0)).conjugate(&sigma, &tau);
    let w = detect_chebyshev_pair(&f, &g, &tol).expect("shared Chebyshev pair");
    println!("pair (T5, -T3): signs ({}, {:?})", w.sign, w.sign_g);

    let p = Poly::monomial(C64::new(1.0, 0.0), 4).conjugate(&sigma, &tau);
    let q = Poly::monomial(C64::new(0.5, 0.5), 2).conjugate(&sigma, &tau);
    let w = detect_power_pair(&p, &q, &tol).expect("shared power pair");
    println!("pair (z^4, a z^2): a = {:.6}", w.a.unwrap());

    let neither = Poly::from_real(&[0.0, 1.0, 0.0, 0.0, 1.0]);
    println!(
        "z^4 + z: power {}, Chebyshev {}",
        detect_power(&neither, &tol).is_some(),
        detect_chebyshev(&neither, &tol).is_some()
    );
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
