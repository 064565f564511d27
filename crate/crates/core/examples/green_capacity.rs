//! Green functions and logarithmic capacity by escape rate and by relaxation.

use polydyn::normal_forms::chebyshev;
use polydyn::potential::{default_outer_radius, escape_green, grid_green, julia_capacity, BoundingBox, PixelSet};
use polydyn::{Poly, C64};

fn main() -> polydyn::Result<()> {
    let t2 = chebyshev(2);
    let z = C64::new(2.0, 0.0);
    println!(
        "escape Green of T2 at 2: {:.10} (log(2 + sqrt 3) = {:.10})",
        escape_green(&t2, z, 200),
        (2.0 + 3f64.sqrt()).ln()
    );
    println!("capacity of K(T2) = {}, of K(z^2 - 1) = {}", julia_capacity(&t2), julia_capacity(&Poly::from_real(&[-1.0, 0.0, 1.0])));

    let o = C64::new(0.0, 0.0);
    let b = BoundingBox::square(o, 1.5);
    let sets = [
        ("unit disk", PixelSet::disk(b, 201, 201, o, 1.0), 1.0),
        ("segment [-1, 1]", PixelSet::segment(b, 201, 201, C64::new(-1.0, 0.0), C64::new(1.0, 0.0)), 0.5),
    ];
    for (name, e, exact) in sets {
        let gf = grid_green(&e, default_outer_radius(&e)?)?;
        println!(
            "{name:<16} grid capacity {:.4} (exact {exact}), {} sweeps, converged {}",
            gf.capacity(),
            gf.sweeps,
            gf.converged
        );
        let mu = gf.equilibrium_measure();
        println!("{:<16} equilibrium measure: {} atoms, barycenter {:.1e}", "", mu.len(), mu.barycenter().norm());
    }
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
