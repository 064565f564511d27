//! Recovers the common right factor of `f = f0 o Q` and `g = g0 o Q`.

use polydyn::fiber::gcd_factor;
use polydyn::{Poly, ToleranceContext, C64};
use rand::{Rng, SeedableRng};

fn random_poly(rng: &mut impl Rng, deg: usize) -> Poly {
    let mut c: Vec<C64> = (0..=deg).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    c[deg] = C64::new(1.0, 0.0) + c[deg] * 0.3;
    Poly::new(c)
}

fn main() -> polydyn::Result<()> {
    let tol = ToleranceContext::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    // Q monic with Q(0) = 0 is the gauge the factorization returns.
    let (q, _) = random_poly(&mut rng, 3).monic_gauge();
    let f0 = random_poly(&mut rng, 2);
    let g0 = random_poly(&mut rng, 3);
    let (f, g) = (f0.compose(&q), g0.compose(&q));
    println!("deg f = {}, deg g = {}", f.degree(), g.degree());

    let r = gcd_factor(&f, &g, &tol)?;
    println!("deck hypothesis residual {:.2e}", r.hypothesis_residual);
    println!("division residual        {:.2e}", r.division_residual);
    println!("|Q - Q_true|             {:.2e}", r.q.distance(&q));
    println!("|f0 - f0_true|           {:.2e}", r.f0.distance(&f0));
    println!("|g0 - g0_true|           {:.2e}", r.g0.distance(&g0));

    // A generic pair of degrees 4 and 6 has no common factor of degree 2.
    let (f, g) = (random_poly(&mut rng, 4), random_poly(&mut rng, 6));
    match gcd_factor(&f, &g, &tol) {
        Ok(r) => println!("generic pair factored?! Q = {:?}", r.q.coeffs()),
        Err(e) => println!("generic pair: {e}"),
    }
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
