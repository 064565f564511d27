//! The `polydyn` command-line tool. Operands may be inline or `@path`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{theorem1_classify, uniqueness_probe, Branch, ProbeOptions};
use crate::error::{Error, Result};
use crate::fiber::{build_phi, critical_transport_residual, gcd_factor, lemma1_step};
use crate::io::{emit, parse_complex, parse_json, parse_measure, parse_poly, to_json};
use crate::normal_forms::{chebyshev, detect_c1, detect_c2, psi_residual};
use crate::param::{detect_periodicity, dd_endo, in_m_residual, in_n_truncated, orbit, pi_map, Horizon, ParamPoint};
use crate::poly::C64;
use crate::potential::{
    a_functional, a_sup, angular_step, cesaro_fixpoint, default_bailout, default_outer_radius, escape_green,
    filled_julia, grid_green, invariance_report, julia_capacity, preimage_set, pullback, pushforward, robin_constant,
    AtomBudget, AtomicMeasure, BoundingBox, PixelSet,
};
use crate::series::{self, boettcher, conjugacy_residual, deck, deck_commutator_residual, deck_power_residual, default_order};
use crate::tolerance::ToleranceContext;

#[derive(Parser, Debug)]
#[command(name = "polydyn", version, about = "Polynomial dynamics toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Acceptance threshold for derived identities.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Truncation order of series at infinity.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Recorded in the manifest; no command draws random numbers without it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (required for pgm output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write a JSON run record here.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pgm,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Böttcher series of a polynomial at infinity.
    Boettcher {
        #[arg(long)]
        poly: String,
    },
    /// Deck transformation at infinity.
    Deck {
        #[arg(long)]
        poly: String,
    },
    /// Commutator and power-identity residuals of two deck transformations.
    DeckCheck {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Common right factor of degree gcd(d, d′).
    GcdFactor {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// The composite Φ of a pair with coprime degrees and its split.
    BuildPhi {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// Sample points (0 for the default 2·d·d′).
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// One step (f₀, g₀) ↦ (f₁, g₁) on Σ(d, d′, α).
    Lemma1Step {
        #[arg(long)]
        f0: String,
        #[arg(long)]
        g0: String,
        #[arg(long)]
        alpha: String,
    },
    /// Couple (f, g) with prescribed critical points.
    PiMap {
        /// ParamPoint JSON `{"x":…,"y":…,"alpha":…,"d":…,"dd":…}`.
        #[arg(long)]
        point: String,
    },
    /// Orbit of a parameter point under D_{d,d′}.
    DdOrbit {
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Finite-horizon membership test.
    InN {
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 36)]
        degree_cap: usize,
    },
    /// Detects the power curve C₁ and the Chebyshev curve C₂.
    DetectCurve {
        #[arg(long)]
        point: String,
    },
    /// Chebyshev polynomial T_k.
    Chebyshev {
        #[arg(long)]
        k: usize,
    },
    /// Classifies a pair by common factor and normal forms.
    Classify {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// Also report the measure-invariance residual for this measure.
        #[arg(long)]
        measure: Option<String>,
    },
    /// Green function: escape rate of a polynomial, or grid solve for a raster.
    Green {
        #[arg(long, conflicts_with = "set")]
        poly: Option<String>,
        /// Evaluation points for the polynomial backend.
        #[arg(long)]
        z: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        /// PGM raster (with `.json` sidecar).
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Logarithmic capacity of a raster or of a filled Julia set.
    Capacity {
        #[arg(long, conflicts_with = "set")]
        poly: Option<String>,
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Pullback (or pushforward) of an atomic measure.
    Pullback {
        #[arg(long)]
        poly: String,
        /// CSV rows `re,im,weight` or JSON.
        #[arg(long)]
        measure: String,
        #[arg(long)]
        push: bool,
        /// Divide by the degree.
        #[arg(long)]
        normalize: bool,
    },
    /// Cesàro averages of μ ↦ g_*(d⁻¹ f^* μ).
    Cesaro {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 50)]
        n_max: usize,
        #[arg(long, default_value_t = 1e-2)]
        fix_tol: f64,
        #[arg(long, default_value_t = 8192)]
        max_atoms: usize,
    },
    /// Escape-time raster of the filled Julia set.
    Julia {
        #[arg(long)]
        poly: String,
        /// `x0,y0,x1,y1`; defaults to a square containing the filled Julia set.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        #[arg(long, default_value_t = 512)]
        w: usize,
        #[arg(long, default_value_t = 512)]
        h: usize,
        #[arg(long, default_value_t = 256)]
        iterations: usize,
        #[arg(long)]
        bailout: Option<f64>,
    },
    /// Preimage raster P⁻¹(E).
    Preimage {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        w: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
    },
    /// Invariance residual of a measure under a pair, or of a raster under a map.
    Invariance {
        #[arg(long)]
        f: String,
        #[arg(long, required_unless_present = "set")]
        g: Option<String>,
        #[arg(long, required_unless_present = "set")]
        measure: Option<String>,
        #[arg(long, conflicts_with_all = ["g", "measure"])]
        set: Option<PathBuf>,
    },
    /// Largest arc of |z| = r missing the raster.
    AFunctional {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, required_unless_present = "sup")]
        r: Option<f64>,
        #[arg(long)]
        sup: bool,
    },
    /// Searches for maps leaving a raster totally invariant.
    ProbeUniqueness {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 6)]
        degree_cap: usize,
        #[arg(long)]
        candidate: Vec<String>,
        #[arg(long)]
        no_capacity: bool,
    },
}

/// What a command produced and whether its verdict failed.
struct Outcome {
    value: Value,
    hypothesis_failed: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome {
            value,
            hypothesis_failed: false,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Runs the tool on `argv`; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let tol = tolerance(&cli.global);
    let outcome = execute(&cli, &tol);
    let (code, record) = match outcome {
        Ok(o) => (if o.hypothesis_failed { 1 } else { 0 }, o.value),
        Err(e) => {
            eprintln!("error: {e}");
            (e.exit_code(), json!({ "error": e.to_string() }))
        }
    };
    if let Some(path) = &cli.global.manifest {
        let manifest = json!({
            "tool": "polydyn",
            "version": env!("CARGO_PKG_VERSION"),
            "argv": argv.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>(),
            "tolerance": tol,
            "order": cli.global.order,
            "seed": cli.global.seed,
            "exit_code": code,
            "result": record,
        });
        if let Err(e) = std::fs::write(path, serde_json::to_string_pretty(&manifest).unwrap_or_default()) {
            eprintln!("error: cannot write manifest: {e}");
            return 2;
        }
    }
    code
}

fn tolerance(g: &Global) -> ToleranceContext {
    match g.tol {
        Some(t) => ToleranceContext::default().with_verify(t),
        None => ToleranceContext::default(),
    }
}

fn order_for(g: &Global, degrees: &[usize]) -> usize {
    g.order.unwrap_or_else(|| default_order(degrees))
}

fn execute(cli: &Cli, tol: &ToleranceContext) -> Result<Outcome> {
    let g = &cli.global;
    let outcome = match &cli.command {
        Command::Boettcher { poly } => {
            let p = parse_poly(poly)?;
            let b = boettcher(&p, order_for(g, &[p.degree()]), tol)?;
            let residual = conjugacy_residual(&p, &b);
            Outcome::ok(json!({ "series": b, "conjugacy_residual": residual }))
        }
        Command::Deck { poly } => {
            let p = parse_poly(poly)?;
            let d = deck(&p, order_for(g, &[p.degree()]), tol)?;
            let inv = series::invariance_residual(&p, &d);
            let period = d
                .iterate(p.degree())
                .weighted_distance(&series::TailSeries::identity(d.order), series::series_scale(&p));
            Outcome::ok(json!({ "series": d, "invariance_residual": inv, "period_residual": period }))
        }
        Command::DeckCheck { f, g: gg } => {
            let (f, gp) = (parse_poly(f)?, parse_poly(gg)?);
            let n = order_for(g, &[f.degree(), gp.degree()]);
            Outcome::ok(json!({
                "order": n,
                "commutator": deck_commutator_residual(&f, &gp, n, tol)?,
                "power": deck_power_residual(&f, &gp, n, tol)?,
            }))
        }
        Command::GcdFactor { f, g: gg } => {
            let (f, gp) = (parse_poly(f)?, parse_poly(gg)?);
            match gcd_factor(&f, &gp, tol) {
                Ok(r) => Outcome::ok(to_value(&r)?),
                Err(Error::Hypothesis { reason, residual }) => Outcome {
                    value: json!({ "factorization": null, "reason": reason, "residual": residual }),
                    hypothesis_failed: true,
                },
                Err(e) => return Err(e),
            }
        }
        Command::BuildPhi { f, g: gg, samples } => {
            let (f, gp) = (parse_poly(f)?, parse_poly(gg)?);
            let r = build_phi(&f, &gp, *samples, tol)?;
            let (tf, tg) = critical_transport_residual(&f, &gp, &r.f1, &r.g1, tol)?;
            Outcome::ok(json!({ "phi": r, "critical_transport": [tf, tg] }))
        }
        Command::Lemma1Step { f0, g0, alpha } => {
            let (f0, g0) = (parse_poly(f0)?, parse_poly(g0)?);
            let (f1, g1) = lemma1_step(&f0, &g0, parse_complex(alpha)?, tol)?;
            let commutation = f1.compose(&g0).relative_distance(&g1.compose(&f0));
            Outcome::ok(json!({ "f1": f1, "g1": g1, "commutation_residual": commutation }))
        }
        Command::PiMap { point } => {
            let p: ParamPoint = parse_json(point)?;
            p.validate()?;
            let c = pi_map(&p);
            Outcome::ok(json!({ "couple": c, "gauge_residual": c.gauge_residual() }))
        }
        Command::DdOrbit { point, steps } => {
            let p: ParamPoint = parse_json(point)?;
            p.validate()?;
            let (orb, overflow) = orbit(&p, *steps);
            let period = detect_periodicity(&orb, tol.verify);
            let in_m: Vec<f64> = orb.iter().map(in_m_residual).collect();
            Outcome::ok(json!({
                "orbit": orb,
                "overflow": overflow,
                "periodicity": period.map(|(m, k)| json!({ "preperiod": m, "period": k })),
                "in_m_residuals": in_m,
                "next": dd_endo(orb.last().expect("orbit starts at p")),
            }))
        }
        Command::InN { point, n_max, k, m, degree_cap } => {
            let p: ParamPoint = parse_json(point)?;
            let h = Horizon {
                n_max: *n_max,
                k: *k,
                m: *m,
                degree_cap: *degree_cap,
            };
            let v = in_n_truncated(&p, &h, tol)?;
            Outcome {
                hypothesis_failed: !v.pass,
                value: to_value(&v)?,
            }
        }
        Command::DetectCurve { point } => {
            let p: ParamPoint = parse_json(point)?;
            p.validate()?;
            Outcome::ok(json!({
                "c1": detect_c1(&p, tol),
                "c2": detect_c2(&p, tol),
                "in_m_residual": in_m_residual(&p),
            }))
        }
        Command::Chebyshev { k } => {
            if *k == 0 {
                return Err(Error::Invalid("k must be positive".into()));
            }
            Outcome::ok(json!({ "poly": chebyshev(*k), "psi_residual": psi_residual(*k) }))
        }
        Command::Classify { f, g: gg, measure } => {
            let (f, gp) = (parse_poly(f)?, parse_poly(gg)?);
            let r = theorem1_classify(&f, &gp, tol)?;
            let mu = measure
                .as_deref()
                .map(|m| -> Result<f64> { crate::potential::invariance_residual(&f, &gp, &parse_measure(m)?, tol) })
                .transpose()?;
            Outcome::ok(json!({
                "classification": r,
                "branch": r.branch,
                "classified": r.branch != Branch::Unclassified,
                "measure_invariance_residual": mu,
            }))
        }
        Command::Green { poly, z, iterations, set, radius } => {
            if let Some(poly) = poly {
                let p = parse_poly(poly)?;
                if p.degree() < 2 {
                    return Err(Error::Degenerate("Green function needs degree at least 2".into()));
                }
                let values = z
                    .iter()
                    .map(|s| Ok(json!({ "z": parse_complex(s)?, "green": escape_green(&p, parse_complex(s)?, *iterations) })))
                    .collect::<Result<Vec<_>>>()?;
                Outcome::ok(json!({ "backend": "escape", "gamma": robin_constant(&p), "values": values }))
            } else {
                let e = load_set(set.as_deref())?;
                let r = radius.map_or_else(|| default_outer_radius(&e), Ok)?;
                let gf = grid_green(&e, r)?;
                if let Some(out) = &g.out {
                    gf.save(out)?;
                }
                let v = json!({ "field": to_value(&gf)?, "capacity": gf.capacity(), "saved": g.out });
                // --out holds the binary field, so the summary goes to stdout.
                println!("{}", to_json(&v)?);
                return Ok(Outcome::ok(v));
            }
        }
        Command::Capacity { poly, set, radius } => {
            if let Some(poly) = poly {
                let p = parse_poly(poly)?;
                if p.degree() < 2 {
                    return Err(Error::Degenerate("capacity of a filled Julia set needs degree at least 2".into()));
                }
                Outcome::ok(json!({ "backend": "escape", "capacity": julia_capacity(&p), "gamma": robin_constant(&p) }))
            } else {
                let e = load_set(set.as_deref())?;
                let r = radius.map_or_else(|| default_outer_radius(&e), Ok)?;
                let gf = grid_green(&e, r)?;
                Outcome::ok(json!({
                    "backend": "grid",
                    "capacity": gf.capacity(),
                    "gamma": gf.gamma,
                    "converged": gf.converged,
                    "residual": gf.residual,
                    "outer_radius": r,
                }))
            }
        }
        Command::Pullback { poly, measure, push, normalize } => {
            let p = parse_poly(poly)?;
            let mu = parse_measure(measure)?;
            let mut out = if *push { pushforward(&p, &mu) } else { pullback(&p, &mu, tol)? };
            if *normalize && !*push {
                out = out.scaled(1.0 / p.degree() as f64);
            }
            return emit_measure(&out, g, json!({ "mass": out.mass(), "atoms": out.len() }));
        }
        Command::Cesaro { f, g: gg, measure, n_max, fix_tol, max_atoms } => {
            let (f, gp) = (parse_poly(f)?, parse_poly(gg)?);
            let mu = parse_measure(measure)?;
            let budget = AtomBudget {
                max_atoms: *max_atoms,
                ..AtomBudget::default()
            };
            let r = cesaro_fixpoint(&f, &gp, &mu, *n_max, *fix_tol, &budget, tol)?;
            let summary = json!({ "n": r.n, "residual": r.residual, "converged": r.converged, "history": r.history });
            if g.format == Format::Csv {
                return emit_measure(&r.measure, g, summary);
            }
            Outcome {
                hypothesis_failed: false,
                value: json!({ "summary": summary, "measure": r.measure }),
            }
        }
        Command::Julia { poly, window, w, h, iterations, bailout } => {
            let p = parse_poly(poly)?;
            if p.degree() < 2 {
                return Err(Error::Degenerate("filled Julia set needs degree at least 2".into()));
            }
            let bbox = match window {
                Some(w) => parse_window(w)?,
                None => BoundingBox::square(C64::new(0.0, 0.0), default_bailout(&p)),
            };
            let k = filled_julia(&p, bbox, *w, *h, *iterations, bailout.unwrap_or_else(|| default_bailout(&p)));
            return emit_set(&k, g, json!({ "area": k.area(), "pixels": k.count() }));
        }
        Command::Preimage { poly, set, w, h } => {
            let p = parse_poly(poly)?;
            let e = PixelSet::load(set)?;
            let pre = preimage_set(&p, &e, w.unwrap_or(e.w), h.unwrap_or(e.h));
            return emit_set(&pre, g, json!({ "pixels": pre.count(), "area": pre.area() }));
        }
        Command::Invariance { f, g: gg, measure, set } => {
            let f = parse_poly(f)?;
            if let Some(set) = set {
                let e = PixelSet::load(set)?;
                let r = invariance_report(&f, &e);
                Outcome::ok(to_value(&r)?)
            } else {
                let gp = parse_poly(gg.as_deref().expect("clap requires g"))?;
                let mu = parse_measure(measure.as_deref().expect("clap requires measure"))?;
                let r = crate::potential::invariance_residual(&f, &gp, &mu, tol)?;
                Outcome::ok(json!({ "residual": r }))
            }
        }
        Command::AFunctional { set, r, sup } => {
            let e = PixelSet::load(set)?;
            let mut v = json!({});
            if let Some(r) = r {
                let a = a_functional(&e, *r);
                v["r"] = json!(r);
                v["a"] = json!(a);
                v["intersects"] = json!(a.is_some());
                v["angular_step"] = json!(angular_step(&e, *r));
            }
            if *sup {
                v["a_sup"] = json!(a_sup(&e));
            }
            Outcome::ok(v)
        }
        Command::ProbeUniqueness { set, degree_cap, candidate, no_capacity } => {
            let e = PixelSet::load(set)?;
            let opts = ProbeOptions {
                degree_cap: *degree_cap,
                candidates: candidate.iter().map(|c| parse_poly(c)).collect::<Result<_>>()?,
                capacity: !no_capacity,
                ..ProbeOptions::default()
            };
            Outcome::ok(to_value(&uniqueness_probe(&e, &opts)?)?)
        }
    };
    if g.format != Format::Json {
        return Err(Error::Invalid(format!("{:?} output is not available for this command", g.format)));
    }
    emit(&to_json(&outcome.value)?, g.out.as_deref())?;
    Ok(outcome)
}

fn parse_window(s: &str) -> Result<BoundingBox> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Invalid(format!("bad window {s}")))?;
    match v.as_slice() {
        [x0, y0, x1, y1] if x1 > x0 && y1 > y0 => Ok(BoundingBox::new(*x0, *y0, *x1, *y1)),
        _ => Err(Error::Invalid(format!("window must be x0,y0,x1,y1 with x0 < x1, y0 < y1: {s}"))),
    }
}

fn load_set(path: Option<&Path>) -> Result<PixelSet> {
    let path = path.ok_or_else(|| Error::Invalid("need --set or --poly".into()))?;
    PixelSet::load(path)
}

fn emit_measure(m: &AtomicMeasure, g: &Global, summary: Value) -> Result<Outcome> {
    match g.format {
        Format::Csv => {
            let mut buf = Vec::new();
            m.write_csv(&mut buf)?;
            let text = String::from_utf8(buf).expect("csv is utf-8");
            match &g.out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
        Format::Json => emit(&to_json(m)?, g.out.as_deref())?,
        Format::Pgm => return Err(Error::Invalid("a measure cannot be written as pgm".into())),
    }
    Ok(Outcome::ok(summary))
}

fn emit_set(s: &PixelSet, g: &Global, summary: Value) -> Result<Outcome> {
    let out = g
        .out
        .as_deref()
        .ok_or_else(|| Error::Invalid("raster output needs --out".into()))?;
    s.save(out)?;
    let mut v = summary;
    v["header"] = to_value(&s.header())?;
    v["saved"] = json!(out);
    println!("{}", to_json(&v)?);
    Ok(Outcome::ok(v))
}
