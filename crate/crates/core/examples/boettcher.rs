//! Böttcher series and deck transformation of a cubic at infinity.
//!
//! Run with `cargo run --example boettcher`.

use polydyn::series::{boettcher, conjugacy_residual, deck, default_order, invariance_residual, series_scale};
use polydyn::{Poly, TailSeries, ToleranceContext, C64};

fn main() -> polydyn::Result<()> {
    let tol = ToleranceContext::default();
    let p = Poly::new(vec![C64::new(0.2, -0.1), C64::new(0.0, 0.5), C64::new(-0.3, 0.0), C64::new(1.5, 0.0)]);
    let n = default_order(&[p.degree()]);

    let b = boettcher(&p, n, &tol)?;
    println!("B(z) = z + {:.6} + {:.6}/z + ...", b.coeffs[0], b.coeffs[1]);
    println!("conjugacy residual  {:.2e}", conjugacy_residual(&p, &b));

    let delta = deck(&p, n, &tol)?;
    let period = delta
        .iterate(p.degree())
        .weighted_distance(&TailSeries::identity(n), series_scale(&p));
    println!("deck rotation       {:.6}", delta.rho);
    println!("P o delta = P       {:.2e}", invariance_residual(&p, &delta));
    println!("delta^3 = id        {:.2e}", period);

    // δ maps a far point to another point of its fiber.
    let z = C64::new(40.0, 25.0);
    println!("P(z) - P(delta z)   {:.2e}", (p.eval(z) - p.eval(delta.eval(z))).norm() / p.eval(z).norm());
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
