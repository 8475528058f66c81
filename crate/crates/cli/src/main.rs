//! `symorbit` command-line front end. Output is JSON (sorted keys, 12
//! significant digits) unless `--csv` is given.

mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use symorbit::catalog::{self, lookup_space, Mode};
use symorbit::json::{self as sj, SCHEMA_VERSION};
use symorbit::orbits::lattice_distance;
use symorbit::{
    build_pair, cohomogeneity, complex_focal_radii, generate_table, hermann_configuration, hermann_orbit_spectrum,
    hermann_setup, isotropy_shape_spectrum, maximal_abelian, restricted_roots, Error, MatrixLieAlgebra, OrbitPoint,
    RestrictedRootSystem, Selector, SymmetricPairData,
};

#[derive(Parser)]
#[command(name = "symorbit", version, about = "Restricted roots, orbit spectra, focal radii and cohomogeneity tables")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Describe a symmetric pair, or list catalog spaces when --space is absent.
    Pairs {
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        sigma_prime: Option<String>,
        /// Restrict the listing to one table.
        #[arg(long)]
        id: Option<u8>,
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// Restricted root system of q (or of q∩q' with --sigma-prime).
    Roots {
        #[command(flatten)]
        target: Target,
    },
    /// Shape operator spectrum at exp(w)H in direction a.
    Spectrum {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Complex focal radii of the isotropy orbit.
    Focal {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 8.0)]
        window: f64,
    },
    /// Cohomogeneities of the K- and L-actions.
    Cohom {
        #[arg(long)]
        space: String,
    },
    /// Regenerates a cohomogeneity table.
    Table {
        #[arg(long)]
        id: u8,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Closed forms against the numerical oracles.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 20)]
        max_dim: usize,
        /// Replaces every suite tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    space: String,
    #[arg(long)]
    sigma_prime: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct PointArgs {
    /// Cartan coordinates of w, comma separated; sampled from --seed if absent.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    w: Option<Coords>,
    /// Cartan coordinates of the normal direction.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    a: Option<Coords>,
    /// Replaces the singular-lattice margin used when sampling w.
    #[arg(long)]
    tol: Option<f64>,
}

/// Comma-separated Cartan coordinates.
#[derive(Debug, Clone)]
struct Coords(Vec<f64>);

fn parse_coords(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| match t.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            Ok(_) => Err(format!("'{t}' is not finite")),
            Err(e) => Err(format!("'{t}': {e}")),
        })
        .collect::<Result<_, _>>()
        .map(Coords)
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = validate(&cli.verb) {
        return usage(&msg);
    }
    match run(cli.verb) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Compute(e)) => {
            println!("{}", sj::to_string(&e));
            ExitCode::from(1)
        }
        Err(Failure::Check(out)) => {
            println!("{out}");
            ExitCode::from(1)
        }
    }
}

/// Flag checks that need no computation.
fn validate(verb: &Verb) -> Result<(), String> {
    let space_ok = |s: &str| {
        if s.split_once('/').is_some() {
            Ok(())
        } else {
            Err(format!("--space must look like 'G/H', got '{s}'"))
        }
    };
    match verb {
        Verb::Pairs { space, id, bound, .. } => {
            if let Some(s) = space {
                space_ok(s)?;
            }
            if let Some(i) = id {
                if !(1..=3).contains(i) {
                    return Err(format!("--id must be 1, 2 or 3, got {i}"));
                }
            }
            if *bound > symorbit::hermann::MAX_TABLE_BOUND {
                return Err(format!("--bound at most {}", symorbit::hermann::MAX_TABLE_BOUND));
            }
        }
        Verb::Roots { target } => space_ok(&target.space)?,
        Verb::Spectrum { target, point } => {
            space_ok(&target.space)?;
            check_tol(point.tol)?;
        }
        Verb::Focal { target, point, window } => {
            space_ok(&target.space)?;
            check_tol(point.tol)?;
            if !(*window > 0.0 && window.is_finite()) {
                return Err("--window must be positive".into());
            }
        }
        Verb::Cohom { space } => space_ok(space)?,
        Verb::Table { .. } => {}
        Verb::Verify { suite, tol, .. } => {
            verify::Suite::parse(suite).ok_or_else(|| {
                format!("--suite must be one of all, roots, spectrum, focal, hermann, jacobi; got '{suite}'")
            })?;
            check_tol(*tol)?;
        }
    }
    Ok(())
}

fn check_tol(tol: Option<f64>) -> Result<(), String> {
    match tol {
        Some(t) if !(t > 0.0 && t.is_finite()) => Err("--tol must be positive".into()),
        _ => Ok(()),
    }
}

enum Failure {
    Compute(Error),
    /// A verification ran but did not pass; carries the report.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

fn run(verb: Verb) -> Result<String, Failure> {
    Ok(match verb {
        Verb::Pairs { space: None, id, bound, .. } => {
            let ids: Vec<u8> = id.map_or(vec![1, 2, 3], |i| vec![i]);
            let rows: Vec<Value> = ids
                .into_iter()
                .flat_map(|i| catalog::instances(i, bound, Mode::Table))
                .map(|inst| {
                    json!({
                        "table": inst.table,
                        "row": inst.row,
                        "space": inst.space(),
                        "sigma": inst.sigma,
                        "K": inst.k_label,
                        "L": inst.l_label,
                    })
                })
                .collect();
            emit(&json!({ "schema_version": SCHEMA_VERSION, "spaces": rows }))
        }
        Verb::Pairs { space: Some(space), sigma_prime, .. } => {
            let pair = load(&space, sigma_prime.as_deref())?;
            emit(&describe_pair(&space, &pair, sigma_prime.as_deref()))
        }
        Verb::Roots { target } => {
            let pair = load(&target.space, target.sigma_prime.as_deref())?;
            let sys = system_for(&pair, target.sigma_prime.is_some(), target.seed)?;
            emit(&roots_json(&target.space, &sys))
        }
        Verb::Spectrum { target, point } => {
            let mut rng = ChaCha8Rng::seed_from_u64(target.seed);
            let pair = load(&target.space, target.sigma_prime.as_deref())?;
            if target.sigma_prime.is_some() {
                let cfg = hermann_configuration(&pair, target.seed)?;
                let w = match point.w {
                    Some(Coords(w)) => check_len(w, cfg.rank(), "--w")?,
                    None => cfg.sample_principal(&mut rng),
                };
                let a = coords_or_random(point.a, cfg.rank(), "--a", &mut rng)?;
                let spec = hermann_orbit_spectrum(&cfg, &w, &a)?;
                emit(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "space": target.space,
                    "sigma_prime": target.sigma_prime,
                    "w": w,
                    "a": a,
                    "entries": spec.entries,
                }))
            } else {
                let sys = system_for(&pair, false, target.seed)?;
                let (w, a) = point_coords(&sys, point, &mut rng)?;
                let spec = isotropy_shape_spectrum(&sys, &OrbitPoint::from_coeffs(&sys, &w), &a)?;
                emit(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "space": target.space,
                    "w": w,
                    "a": a,
                    "entries": spec.entries,
                }))
            }
        }
        Verb::Focal { target, point, window } => {
            let mut rng = ChaCha8Rng::seed_from_u64(target.seed);
            let pair = load(&target.space, target.sigma_prime.as_deref())?;
            let sys = system_for(&pair, false, target.seed)?;
            let (w, a) = point_coords(&sys, point, &mut rng)?;
            let set = complex_focal_radii(&sys, &OrbitPoint::from_coeffs(&sys, &w), &a, window)?;
            emit(&json!({
                "schema_version": SCHEMA_VERSION,
                "space": target.space,
                "w": w,
                "a": a,
                "focal": set,
            }))
        }
        Verb::Cohom { space } => {
            let pair = load(&space, None)?;
            emit(&cohomogeneity(&pair)?)
        }
        Verb::Table { id, bound, csv } => {
            let rows = generate_table(id, bound)?;
            if csv {
                symorbit::hermann::rows_to_csv(&rows).trim_end().to_string()
            } else {
                emit(&json!({ "schema_version": SCHEMA_VERSION, "table": id, "bound": bound, "rows": rows }))
            }
        }
        Verb::Verify { suite, max_dim, tol, seed } => {
            let suite = verify::Suite::parse(&suite).expect("validated");
            let report = verify::run(suite, max_dim, tol, seed);
            let out = emit(&report);
            if !report.pass {
                return Err(Failure::Check(out));
            }
            out
        }
    })
}

fn emit<T: Serialize>(value: &T) -> String {
    sj::to_string(value)
}

pub(crate) fn load(space: &str, sigma_prime: Option<&str>) -> symorbit::Result<SymmetricPairData> {
    let inst = lookup_space(space)?;
    let alg = MatrixLieAlgebra::new(inst.algebra.clone())?;
    let pair = build_pair(&alg, &inst.sigma, None)?;
    match sigma_prime {
        Some(sp) => hermann_setup(&pair, sp),
        None => Ok(pair),
    }
}

fn system_for(pair: &SymmetricPairData, hermann: bool, seed: u64) -> symorbit::Result<RestrictedRootSystem> {
    if hermann {
        return Ok(hermann_configuration(pair, seed)?.system);
    }
    let cs = maximal_abelian(pair, Selector::Q, seed)?;
    restricted_roots(pair, &cs)
}

fn check_len(v: Vec<f64>, rank: usize, flag: &str) -> symorbit::Result<Vec<f64>> {
    if v.len() != rank {
        return Err(Error::InvalidParams(format!("{flag} has {} coordinates, the Cartan subspace has rank {rank}", v.len())));
    }
    Ok(v)
}

fn coords_or_random(v: Option<Coords>, rank: usize, flag: &str, rng: &mut ChaCha8Rng) -> symorbit::Result<Vec<f64>> {
    match v {
        Some(Coords(v)) => check_len(v, rank, flag),
        None => Ok((0..rank).map(|_| rng.gen_range(-1.0..1.0)).collect()),
    }
}

/// `w` defaults to a uniform sample kept `margin` away from the singular
/// lattice of every root.
fn point_coords(sys: &RestrictedRootSystem, p: PointArgs, rng: &mut ChaCha8Rng) -> symorbit::Result<(Vec<f64>, Vec<f64>)> {
    let margin = p.tol.unwrap_or(1e-3);
    let w = match p.w {
        Some(Coords(w)) => check_len(w, sys.rank(), "--w")?,
        None => loop {
            let w: Vec<f64> = (0..sys.rank()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if sys.roots.iter().all(|r| lattice_distance(r.eval(&w)) >= margin) {
                break w;
            }
        },
    };
    let a = coords_or_random(p.a, sys.rank(), "--a", rng)?;
    Ok((w, a))
}

fn describe_pair(space: &str, pair: &SymmetricPairData, sigma_prime: Option<&str>) -> Value {
    let [qf, qp, hf, hp] = pair.piece_dims();
    let mut out = json!({
        "schema_version": SCHEMA_VERSION,
        "space": space,
        "algebra": pair.algebra.descriptor.to_string(),
        "dim": pair.dim(),
        "sigma": pair.sigma.spec,
        "dims": { "h": pair.h.ncols(), "q": pair.q.ncols(), "h_f": hf, "h_p": hp, "q_f": qf, "q_p": qp },
        "bracket_residual": pair.bracket_relation_residual(),
    });
    if let Some(prime) = &pair.prime {
        out["sigma_prime"] = json!(sigma_prime);
        out["dims"]["h_prime"] = json!(prime.h_prime.ncols());
        out["dims"]["q_prime"] = json!(prime.q_prime.ncols());
    }
    out
}

fn roots_json(space: &str, sys: &RestrictedRootSystem) -> Value {
    let basis: Vec<Vec<f64>> = (0..sys.rank()).map(|j| sys.cartan.basis.column(j).iter().cloned().collect()).collect();
    let roots: Vec<Value> = sys
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "index": i,
                "values": r.values.iter().map(|z| sj::complex(*z)).collect::<Vec<_>>(),
                "mult": r.mult,
                "positive": r.is_positive(),
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "space": space,
        "rank": sys.rank(),
        "selector": sys.cartan.selector,
        "cartan_basis": basis,
        "n_p": sys.cartan.n_p,
        "roots": roots,
        "positive_count": sys.positive().count(),
        "zero_q_dim": sys.zero_q.ncols(),
        "zero_h_dim": sys.zero_h.ncols(),
        "q_dim": sys.q_dim_from_roots(),
    })
}
