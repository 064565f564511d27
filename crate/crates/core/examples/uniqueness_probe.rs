//! Searching for maps that leave a compact set totally invariant.

use polydyn::classify::{uniqueness_probe, ProbeOptions};
use polydyn::potential::{BoundingBox, PixelSet};
use polydyn::C64;

fn main() -> polydyn::Result<()> {
    let o = C64::new(0.0, 0.0);
    let b = BoundingBox::square(o, 1.5);
    let blob = [
        C64::new(-0.9, -0.3),
        C64::new(0.2, -1.0),
        C64::new(1.1, -0.2),
        C64::new(0.4, 0.3),
        C64::new(0.6, 1.0),
        C64::new(-0.5, 0.7),
    ];
    let sets = [
        ("circle", PixelSet::circle(b, 151, 151, o, 1.0)),
        ("segment", PixelSet::segment(b, 151, 151, C64::new(-1.0, 0.0), C64::new(1.0, 0.0))),
        ("blob", PixelSet::polygon(b, 151, 151, &blob)),
    ];
    let opts = ProbeOptions {
        degree_cap: 4,
        ..ProbeOptions::default()
    };
    for (name, e) in sets {
        let r = uniqueness_probe(&e, &opts)?;
        println!("{name}: {} ({} of {} candidates)", r.verdict, r.witnesses, r.candidates.len());
        if let Some(c) = r.capacity {
            println!("  grid capacity {c:.3}{}", r.capacity_flag.map(|f| format!(" [{f}]")).unwrap_or_default());
        }
        for c in r.candidates.iter().filter(|c| c.witness).take(3) {
            println!("  witness {:?}: residual {:.3}", c.source, c.invariance.residual);
        }
    }
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
