//! Orbits of the critical-point endomorphism and the finite membership test.

use polydyn::normal_forms::{detect_c1, detect_c2, make_c1_point, make_c2_point};
use polydyn::param::{detect_periodicity, dd_endo, in_m_residual, in_n_truncated, orbit, pi_map, Horizon, ParamPoint};
use polydyn::{LinearMap, ToleranceContext, C64};

fn main() -> polydyn::Result<()> {
    let tol = ToleranceContext::default();
    let power = ParamPoint::power(3, 2, C64::new(1.0, 0.0))?;
    println!("D(0, 0, 1) = (0, 0, 1): {}", dd_endo(&power) == power);

    let sigma1 = LinearMap::new(C64::new(0.7, 0.4), C64::new(0.0, 0.0));
    let c1 = make_c1_point(5, 3, &sigma1, C64::new(1.3, -0.2), &tol)?;
    let c2 = make_c2_point(5, 3, &sigma1, (1, 1), 0, &tol)?;
    for (name, p) in [("C1", &c1), ("C2", &c2)] {
        let v = in_n_truncated(p, &Horizon::default(), &tol)?;
        println!(
            "{name} point: in_M {:.2e}, in_N pass {} (worst {:.2e} over {} checks), power form {}, Chebyshev form {}",
            in_m_residual(p),
            v.pass,
            v.worst,
            v.checks.len(),
            detect_c1(p, &tol).is_some(),
            detect_c2(p, &tol).is_some()
        );
    }
    let couple = pi_map(&c2);
    println!("couple of the C2 point: deg f = {}, lead g = {:.4}", couple.f.degree(), couple.g.leading());

    let (orb, overflow) = orbit(&c1, 6);
    println!("C1 orbit: {} points before overflow ({overflow})", orb.len());
    // With α a 7th root of unity, α ↦ α³ cycles with period 6.
    let rooted = ParamPoint::power(3, 2, C64::from_polar(1.0, std::f64::consts::TAU / 7.0))?;
    let (orb, _) = orbit(&rooted, 8);
    println!("power point with α = e^(2πi/7): (preperiod, period) = {:?}", detect_periodicity(&orb, 1e-9));

    let mut jittered = c1.clone();
    jittered.x[0] += C64::new(1e-2, 0.0);
    let v = in_n_truncated(&jittered, &Horizon::default(), &tol)?;
    println!("jittered: pass {} worst {:.2e}", v.pass, v.worst);
    Ok(())
}

#[test]
fn runs() {
    main().unwrap();
}
