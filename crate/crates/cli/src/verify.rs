//! `verify`: closed-form results checked against the independent oracles on
//! a fixed set of small pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use symorbit::catalog::lookup_space;
use symorbit::linalg::{self, c64, complexify};
use symorbit::nalgebra::DVector;
use symorbit::oracle::{self, brute_force_roots, jacobi_integrate};
use symorbit::orbits::{lattice_distance, strong_jacobi_field};
use symorbit::{
    complex_focal_radii, determinant_focal_scan, hermann_configuration, hermann_orbit_spectrum,
    isotropy_shape_spectrum, maximal_abelian, restricted_roots, shape_operator, variation_shape_estimate, CMatrix,
    CVector, OrbitPoint, RestrictedRootSystem, Selector, SymmetricPairData,
};

use crate::load;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Roots,
    Spectrum,
    Focal,
    Hermann,
    Jacobi,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "all" => Suite::All,
            "roots" => Suite::Roots,
            "spectrum" => Suite::Spectrum,
            "focal" => Suite::Focal,
            "hermann" => Suite::Hermann,
            "jacobi" => Suite::Jacobi,
            _ => return None,
        })
    }
}

const PAIRS: [&str; 10] = [
    "SL(2,R)/SO0(1,1)",
    "SL(3,R)/SO0(1,2)",
    "SU(1,2)/S(U(0,1)xU(1,1))",
    "SO0(2,2)/SO0(1,1)xSO0(1,1)",
    "SO*(4)/SU(1,1).U(1)",
    "Sp(2,R)/SU(1,1).U(1)",
    "Sp(1,1)/SU(1,1).U(1)",
    "SU*(4)/Sp(1,1)",
    "SO(3,C)/SO0(1,2)",
    "SL(3,C)/SU(1,2)",
];

const HERMANN: [(&str, &str); 4] = [
    ("SL(3,R)/SO0(1,2)", "theta"),
    ("SL(3,R)/SO0(1,2)", "ad[I(1,2)]"),
    ("Sp(2,R)/Sp(1,R)xSp(1,R)", "ad[I(2,2)]"),
    ("SL(4,R)/SO0(2,2)", "negt[J(2)]"),
];

const SAMPLES: usize = 3;
const ROOT_TOL: f64 = 1e-8;
const VARIATION_TOL: f64 = 1e-4;
const DETERMINANT_TOL: f64 = 1e-8;
const FOCAL_TOL: f64 = 1e-6;
const HERMANN_TOL: f64 = 1e-8;
const JACOBI_TOL: f64 = 1e-6;

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub pass: bool,
    pub tolerance: f64,
    pub worst: f64,
    pub checks: usize,
    pub skipped: Vec<String>,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        SuiteResult { name, pass: false, tolerance, worst: 0.0, checks: 0, skipped: vec![], failures: vec![] }
    }

    fn record(&mut self, err: f64) {
        self.checks += 1;
        self.worst = self.worst.max(err);
    }

    fn finish(mut self) -> Self {
        self.pass = self.failures.is_empty() && self.worst <= self.tolerance;
        self
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: &'static str,
    pub seed: u64,
    pub max_dim: usize,
    pub pass: bool,
    pub suites: Vec<SuiteResult>,
}

pub fn run(suite: Suite, max_dim: usize, tol: Option<f64>, seed: u64) -> VerifyReport {
    let want = |s: Suite| suite == Suite::All || suite == s;
    let mut suites = Vec::new();
    if want(Suite::Roots) {
        suites.push(roots(max_dim, tol.unwrap_or(ROOT_TOL), seed));
    }
    if want(Suite::Spectrum) {
        suites.push(spectrum(max_dim, tol, seed));
    }
    if want(Suite::Focal) {
        suites.push(focal(max_dim, tol.unwrap_or(FOCAL_TOL), seed));
    }
    if want(Suite::Hermann) {
        suites.push(hermann(max_dim, tol.unwrap_or(HERMANN_TOL), seed));
    }
    if want(Suite::Jacobi) {
        suites.push(jacobi(max_dim, tol.unwrap_or(JACOBI_TOL), seed));
    }
    VerifyReport {
        schema_version: symorbit::json::SCHEMA_VERSION,
        seed,
        max_dim,
        pass: suites.iter().all(|s| s.pass),
        suites,
    }
}

/// Pairs whose algebra fits under `max_dim`; the rest are listed as skipped.
fn pairs_within(spaces: &[&str], max_dim: usize, out: &mut SuiteResult) -> Vec<(String, SymmetricPairData)> {
    let mut kept = Vec::new();
    for space in spaces {
        let dim = match lookup_space(space) {
            Ok(inst) => inst.algebra.expected_dim(),
            Err(e) => {
                out.failures.push(format!("{space}: {e}"));
                continue;
            }
        };
        if dim > max_dim {
            out.skipped.push(format!("{space} (dim {dim})"));
            continue;
        }
        match load(space, None) {
            Ok(pair) => kept.push((space.to_string(), pair)),
            Err(e) => out.failures.push(format!("{space}: {e}")),
        }
    }
    kept
}

fn system(pair: &SymmetricPairData, seed: u64) -> symorbit::Result<RestrictedRootSystem> {
    restricted_roots(pair, &maximal_abelian(pair, Selector::Q, seed)?)
}

fn sample_w(sys: &RestrictedRootSystem, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..sys.rank()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if sys.roots.iter().all(|r| lattice_distance(r.eval(&w)) >= 1e-3) {
            return w;
        }
    }
}

fn uniform(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn roots(max_dim: usize, tol: f64, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("roots", tol);
    for (space, pair) in pairs_within(&PAIRS, max_dim, &mut out) {
        let run = |out: &mut SuiteResult| -> symorbit::Result<()> {
            let cs = maximal_abelian(&pair, Selector::Q, seed)?;
            let sys = restricted_roots(&pair, &cs)?;
            let brute = brute_force_roots(&pair, &cs)?;
            if brute.zero_dim != sys.zero_q.ncols() {
                out.failures.push(format!("{space}: zero space {} vs {}", sys.zero_q.ncols(), brute.zero_dim));
            }
            let positive: Vec<_> = sys.positive().collect();
            if positive.len() != brute.roots.len() {
                out.failures.push(format!("{space}: {} positive roots vs {} brute-force", positive.len(), brute.roots.len()));
            }
            for r in positive {
                let scale = r.values.iter().map(|z| z.norm()).fold(1.0, f64::max);
                let dist = |b: &oracle::BruteRoot| {
                    let plus: f64 = r.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                    let minus: f64 = r.values.iter().zip(&b.values).map(|(x, y)| (x + y).norm()).fold(0.0, f64::max);
                    plus.min(minus) / scale
                };
                match brute.roots.iter().min_by(|a, b| dist(a).total_cmp(&dist(b))) {
                    Some(b) if b.mult == r.mult => out.record(dist(b)),
                    Some(b) => out.failures.push(format!("{space}: multiplicity {} vs {}", r.mult, b.mult)),
                    None => out.failures.push(format!("{space}: brute force found no roots")),
                }
            }
            Ok(())
        };
        if let Err(e) = run(&mut out) {
            out.failures.push(format!("{space}: {e}"));
        }
    }
    out.finish()
}

fn spectrum(max_dim: usize, tol: Option<f64>, seed: u64) -> SuiteResult {
    let var_tol = tol.unwrap_or(VARIATION_TOL);
    let det_tol = tol.unwrap_or(DETERMINANT_TOL);
    let mut out = SuiteResult::new("spectrum", var_tol);
    let mut worst_det = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (space, pair) in pairs_within(&PAIRS, max_dim, &mut out) {
        let sys = match system(&pair, seed) {
            Ok(s) => s,
            Err(e) => {
                out.failures.push(format!("{space}: {e}"));
                continue;
            }
        };
        for _ in 0..SAMPLES {
            let wc = sample_w(&sys, &mut rng);
            let ac = uniform(sys.rank(), &mut rng);
            let run = |out: &mut SuiteResult| -> symorbit::Result<f64> {
                let spec = isotropy_shape_spectrum(&sys, &OrbitPoint::from_coeffs(&sys, &wc), &ac)?;
                let (w, a) = (sys.cartan.combine(&wc), sys.cartan.combine(&ac));
                let sh = shape_operator(&pair, &pair.h, &w, &a)?;
                let det = linalg::match_multisets(&spec.eigenvalues(), &sh.eigenvalues()).unwrap_or(f64::INFINITY);
                for e in &spec.entries {
                    let x = e.space.column(0).into_owned();
                    let est = variation_shape_estimate(&pair, &pair.h, &w, &a, &x, oracle::DEFAULT_STEP)?;
                    out.record((est - e.eigenvalue).norm() / e.eigenvalue.norm().max(1e-12));
                }
                Ok(det)
            };
            match run(&mut out) {
                Ok(d) => worst_det = worst_det.max(d),
                Err(e) => out.failures.push(format!("{space}: {e}")),
            }
        }
    }
    if worst_det > det_tol {
        out.failures.push(format!("determinant spectrum error {worst_det:.3e} above {det_tol:.1e}"));
    }
    out.finish()
}

fn focal(max_dim: usize, tol: f64, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("focal", tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (space, pair) in pairs_within(&PAIRS[..6], max_dim, &mut out) {
        let run = |out: &mut SuiteResult, rng: &mut ChaCha8Rng| -> symorbit::Result<()> {
            let sys = system(&pair, seed)?;
            let wc = sample_w(&sys, rng);
            let ac = uniform(sys.rank(), rng);
            let closed = complex_focal_radii(&sys, &OrbitPoint::from_coeffs(&sys, &wc), &ac, 8.0)?;
            let sh = shape_operator(&pair, &pair.h, &sys.cartan.combine(&wc), &sys.cartan.combine(&ac))?;
            let scan = determinant_focal_scan(&sh.jacobi, &sh.shape, 8.0, 0.05)?;
            for p in &closed.points {
                match scan.zeros_found.iter().min_by(|x, y| (x.z - p.z).norm().total_cmp(&(y.z - p.z).norm())) {
                    Some(z) if z.mult == p.mult => out.record((z.z - p.z).norm()),
                    _ => out.failures.push(format!("{space}: focal point {:.6} not matched", p.z)),
                }
            }
            for z in &scan.zeros_found {
                if !closed.points.iter().any(|p| (z.z - p.z).norm() <= tol) {
                    out.failures.push(format!("{space}: scan zero {:.6} not predicted", z.z));
                }
            }
            Ok(())
        };
        if let Err(e) = run(&mut out, &mut rng) {
            out.failures.push(format!("{space}: {e}"));
        }
    }
    out.finish()
}

fn hermann(max_dim: usize, tol: f64, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("hermann", tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (space, sp) in HERMANN {
        let dim = lookup_space(space).map(|i| i.algebra.expected_dim()).unwrap_or(usize::MAX);
        if dim > max_dim {
            out.skipped.push(format!("{space} with {sp} (dim {dim})"));
            continue;
        }
        let run = |out: &mut SuiteResult, rng: &mut ChaCha8Rng| -> symorbit::Result<()> {
            let pair = load(space, Some(sp))?;
            let cfg = hermann_configuration(&pair, seed)?;
            let acting = pair.prime.as_ref().expect("sigma' set").h_prime.clone();
            for _ in 0..SAMPLES {
                let wc = cfg.sample_principal(rng);
                let vc = loop {
                    let v = uniform(cfg.rank(), rng);
                    if cfg.splits.iter().all(|s| cfg.system.roots[s.root].eval(&v).norm() > 1e-2) {
                        break v;
                    }
                };
                let spec = hermann_orbit_spectrum(&cfg, &wc, &vc)?;
                let sh = shape_operator(&pair, &acting, &cfg.b.combine(&wc), &cfg.b.combine(&vc))?;
                let (basis, vals) = spec.eigenbasis();
                if basis.ncols() != sh.dim() {
                    out.failures.push(format!("{space} with {sp}: {} eigenvectors vs tangent {}", basis.ncols(), sh.dim()));
                    continue;
                }
                let cols: Vec<CVector> = (0..basis.ncols()).map(|j| sh.coords(&basis.column(j).into_owned())).collect();
                let vt = CMatrix::from_columns(&cols);
                let a = complexify(&sh.shape);
                let lam = CMatrix::from_diagonal(&DVector::from_vec(vals));
                out.record((&a * &vt - &vt * lam).norm() / (a.norm().max(1e-300) * vt.norm()));
                let r = &sh.jacobi;
                out.record((&sh.shape * r - r * &sh.shape).norm() / (sh.shape.norm() * r.norm()).max(1e-300));
            }
            Ok(())
        };
        if let Err(e) = run(&mut out, &mut rng) {
            out.failures.push(format!("{space} with {sp}: {e}"));
        }
    }
    out.finish()
}

fn jacobi(max_dim: usize, tol: f64, seed: u64) -> SuiteResult {
    let mut out = SuiteResult::new("jacobi", tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (space, pair) in pairs_within(&PAIRS[..6], max_dim, &mut out) {
        let run = |out: &mut SuiteResult, rng: &mut ChaCha8Rng| -> symorbit::Result<()> {
            let sys = system(&pair, seed)?;
            let wc = sample_w(&sys, rng);
            let vc = uniform(sys.rank(), rng);
            let spec = isotropy_shape_spectrum(&sys, &OrbitPoint::from_coeffs(&sys, &wc), &vc)?;
            let qt = complexify(&pair.q.transpose());
            let mut x = CVector::zeros(pair.q.ncols());
            let mut ax = CVector::zeros(pair.q.ncols());
            for e in &spec.entries {
                for j in 0..e.space.ncols() {
                    let col = &qt * e.space.column(j) * c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    ax += &col * e.eigenvalue;
                    x += col;
                }
            }
            let v = sys.cartan.combine(&vc);
            let traj = jacobi_integrate(&pair, &v, &x, &(-&ax), 2.0, 2000)?;
            for s in [0.5, 1.0, 2.0] {
                let num = traj.at(s);
                out.record((strong_jacobi_field(&pair, &v, &x, &ax, s) - num).norm() / num.norm().max(1.0));
            }
            Ok(())
        };
        if let Err(e) = run(&mut out, &mut rng) {
            out.failures.push(format!("{space}: {e}"));
        }
    }
    out.finish()
}
