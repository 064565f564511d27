//! Filled Julia sets as rasters, PGM output and total invariance.

use polydyn::potential::{default_bailout, filled_julia, invariance_report, BoundingBox};
use polydyn::{Poly, C64};

fn main() -> polydyn::Result<()> {
    let window = BoundingBox::square(C64::new(0.0, 0.0), 2.0);
    let dir = std::env::temp_dir();
    for (name, p) in [
        ("disk", Poly::monomial(C64::new(1.0, 0.0), 2)),
        ("segment", Poly::from_real(&[-1.0, 0.0, 2.0])),
        ("basilica", Poly::from_real(&[-1.0, 0.0, 1.0])),
    ] {
        let k = filled_julia(&p, window, 201, 201, 200, default_bailout(&p));
        let inv = invariance_report(&p, &k);
        let path = dir.join(format!("polydyn_{name}.pgm"));
        k.save(&path)?;
        println!(
            "{name:<9} area {:.4}, boundary pixels {}, invariance residual {:.3} (aliasing bound {:.3}) -> {}",
            k.area(),
            k.boundary().count(),
            inv.residual,
            inv.threshold,
            path.display()
        );
    }
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
