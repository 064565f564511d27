//! The circle-gap functional and its scaling under pullback by z^d.

use polydyn::potential::{a_functional, a_sup, angular_step, preimage_set, BoundingBox, PixelSet};
use polydyn::{Poly, C64};
use std::f64::consts::PI;

fn main() {
    let o = C64::new(0.0, 0.0);
    let b = BoundingBox::square(o, 1.5);
    // 603 pixels put pixel centers on 0 and ±1.
    let half = PixelSet::arc(b, 603, 603, o, 1.0, 0.0, PI);
    let a = a_functional(&half, 1.0).expect("circle meets the arc");
    println!("half circle: A(1) = {a:.5}, pi = {PI:.5}, step {:.5}", angular_step(&half, 1.0));
    println!("half circle: A(1.4) = {:?}", a_functional(&half, 1.4));
    println!("half circle: sup A = {:.5}", a_sup(&half).unwrap());
    for d in 2..=4 {
        let f = Poly::monomial(C64::new(1.0, 0.0), d);
        let pre = preimage_set(&f, &half, 603, 603);
        let af = a_functional(&pre, 1.0).unwrap();
        println!("d = {d}: A of preimage {af:.5}, A/d {:.5}", a / d as f64);
    }
}

#[test]
fn runs() {
    main();
}
