//! Brute-force cross-checks that only rely on `liealg` and `linalg`: joint
//! eigenspaces of `ad(a_i)^2`, a direct shape operator built from the group
//! action, finite-difference geodesic variations, determinant zero scans and
//! an RK4 Jacobi integrator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, complexify, CMatrix, CVector, I};
use crate::pairs::SymmetricPairData;
use crate::roots::CartanSubspace;

pub const BRUTE_DIM_LIMIT: usize = 40;
pub const DEFAULT_STEP: f64 = 1e-5;

const NEWTON_DIFF: f64 = 1e-6;
const NEWTON_MAX: usize = 60;
const ZERO_TOL: f64 = 1e-8;
const DEDUPE: f64 = 1e-6;

fn pr_q(pair: &SymmetricPairData) -> DMatrix<f64> {
    let d = pair.dim();
    (DMatrix::identity(d, d) - &pair.sigma.matrix) * 0.5
}

fn pr_h(pair: &SymmetricPairData) -> DMatrix<f64> {
    let d = pair.dim();
    (DMatrix::identity(d, d) + &pair.sigma.matrix) * 0.5
}

/// Shape operator of the orbit of `exp(acting)` through `exp(w)H` in the
/// normal direction `xi`, written on a real basis of the pulled-back tangent
/// space.
#[derive(Debug, Clone)]
pub struct OracleShape {
    /// Real basis of the tangent space (algebra coordinates).
    pub tangent: DMatrix<f64>,
    /// Killing Gram matrix of `tangent`.
    pub gram: DMatrix<f64>,
    /// `A_xi` in the basis `tangent`.
    pub shape: DMatrix<f64>,
    /// `ad(xi)^2` compressed to the tangent space.
    pub jacobi: DMatrix<f64>,
    /// How far `ad(xi)^2` moves the tangent space off itself.
    pub invariance_residual: f64,
    killing: DMatrix<f64>,
}

impl OracleShape {
    pub fn dim(&self) -> usize {
        self.tangent.ncols()
    }

    /// Coordinates in `tangent` of the B-orthogonal projection of `x`.
    pub fn coords(&self, x: &CVector) -> CVector {
        let tg = complexify(&(self.tangent.transpose() * &self.killing));
        let g = complexify(&self.gram);
        g.lu().solve(&(tg * x)).unwrap_or_else(|| CVector::zeros(self.dim()))
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        linalg::eigenvalues_real(&self.shape).unwrap_or_default()
    }
}

/// `exp(-ad w)` on coordinates.
fn ad_exp(pair: &SymmetricPairData, w: &DVector<f64>) -> DMatrix<f64> {
    (-pair.algebra.ad_coords(w)).exp()
}

pub fn shape_operator(
    pair: &SymmetricPairData,
    acting: &DMatrix<f64>,
    w: &DVector<f64>,
    xi: &DVector<f64>,
) -> Result<OracleShape> {
    let alg = &pair.algebra;
    let e = ad_exp(pair, w);
    let pq = pr_q(pair);
    let ph = pr_h(pair);
    let m = &pq * &e * acting;
    let tangent = linalg::orth(&m, 1e-9);
    let n = tangent.ncols();
    let killing = alg.killing_matrix().clone();
    let gram = tangent.transpose() * &killing * &tangent;
    let lu = gram.clone().lu();
    let gscale = gram.amax().max(f64::MIN_POSITIVE);
    let sv = linalg::singular_values(&gram);
    if n > 0 && sv.last().cloned().unwrap_or(0.0) <= 1e-10 * gscale {
        return Err(Error::DegenerateSubspace { name: "orbit tangent space".into() });
    }
    let project = |y: &DVector<f64>| -> DVector<f64> {
        lu.solve(&(tangent.transpose() * &killing * y)).expect("gram is invertible")
    };
    let mut shape = DMatrix::zeros(n, n);
    for j in 0..n {
        let c = linalg::solve_ls(&m, &tangent.column(j).into_owned());
        let eta = &e * (acting * c);
        let eta_h = &ph * eta;
        let y = -alg.bracket_coords(&eta_h, xi);
        shape.set_column(j, &project(&y));
    }
    let ad = alg.ad_coords(xi);
    let k_full = &ad * &ad;
    let mut jacobi = DMatrix::zeros(n, n);
    let mut invariance_residual: f64 = 0.0;
    for j in 0..n {
        let y = &k_full * tangent.column(j);
        let c = project(&y);
        invariance_residual = invariance_residual.max((&tangent * &c - &y).norm());
        jacobi.set_column(j, &c);
    }
    Ok(OracleShape {
        tangent,
        gram,
        shape,
        jacobi,
        invariance_residual,
        killing,
    })
}

fn group(alg: &crate::liealg::MatrixLieAlgebra, x: &DVector<f64>) -> DMatrix<f64> {
    alg.matrix(x).exp()
}

/// `J'(0)` for the variation `exp(uZ) exp(w) exp(s xi)` and a real `Z`,
/// complex step in `u`, central difference in `s`.
fn jacobi_derivative(pair: &SymmetricPairData, z: &DVector<f64>, w: &DVector<f64>, xi: &DVector<f64>, h: f64) -> DVector<f64> {
    let alg = &pair.algebra;
    let zm = complexify(&alg.matrix(z));
    let n = zm.nrows();
    let du = (zm * c64(0.0, h)).exp().map(|v| v.im / h);
    let gw = group(alg, w);
    let gw_inv = group(alg, &-w);
    let field = |s: f64| -> DVector<f64> {
        let g = group(alg, &(xi * s));
        let g_inv = group(alg, &(xi * -s));
        let f = &g_inv * &gw_inv * &du * &gw * &g;
        debug_assert_eq!(f.nrows(), n);
        alg.coords(&f)
    };
    let d = (field(h) - field(-h)) / (2.0 * h);
    pr_q(pair) * d
}

fn variation_once(
    pair: &SymmetricPairData,
    acting: &DMatrix<f64>,
    w: &DVector<f64>,
    xi: &DVector<f64>,
    x: &CVector,
    h: f64,
    shape: &OracleShape,
) -> Result<Complex64> {
    let e = ad_exp(pair, w);
    let m = complexify(&(pr_q(pair) * &e * acting));
    let c = linalg::solve_ls(&m, x);
    let fit = (&m * &c - x).norm();
    if fit > 1e-8 * (1.0 + x.norm()) {
        return Err(Error::InvalidParams(format!("vector is not tangent to the orbit (residual {fit:.3e})")));
    }
    let zr = acting * c.map(|v| v.re);
    let zi = acting * c.map(|v| v.im);
    let jr = jacobi_derivative(pair, &zr, w, xi, h);
    let ji = jacobi_derivative(pair, &zi, w, xi, h);
    let jp = linalg::complexify_vec(&jr) + linalg::complexify_vec(&ji) * I;
    let y = -shape.coords(&jp);
    let xt = shape.coords(x);
    let den = xt.dotc(&xt);
    if den.norm() == 0.0 {
        return Err(Error::InvalidParams("zero tangent vector".into()));
    }
    Ok(xt.dotc(&y) / den)
}

/// Finite-difference estimate of the shape eigenvalue on the line through
/// `x`, which must be a tangent vector (complex algebra coordinates).
pub fn variation_shape_estimate(
    pair: &SymmetricPairData,
    acting: &DMatrix<f64>,
    w: &DVector<f64>,
    xi: &DVector<f64>,
    x: &CVector,
    h: f64,
) -> Result<Complex64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParams("step must be positive".into()));
    }
    let shape = shape_operator(pair, acting, w, xi)?;
    let a = variation_once(pair, acting, w, xi, x, h, &shape)?;
    let b = variation_once(pair, acting, w, xi, x, h / 2.0, &shape)?;
    if (a - b).norm() > 1e-4 * b.norm().max(1e-8) {
        return Err(Error::StepTooLarge { a: a.norm(), b: b.norm() });
    }
    Ok(b)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanZero {
    #[serde(serialize_with = "crate::json::ser_complex")]
    pub z: Complex64,
    /// Singular values below `1e-8` of the largest.
    pub mult: usize,
    /// Row-normalized `|det|` at `z`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub zeros_found: Vec<ScanZero>,
    pub grid_resolution: f64,
    pub newton_iterations: usize,
    pub max_residual: f64,
    /// Seeds whose Newton run did not settle on a zero.
    pub divergences: Vec<Error>,
}

struct DetFamily {
    n: usize,
    gen: CMatrix,
    a: CMatrix,
}

impl DetFamily {
    fn new(k: &DMatrix<f64>, a: &DMatrix<f64>) -> DetFamily {
        let n = k.nrows();
        let mut gen = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            gen[(i, n + i)] = c64(1.0, 0.0);
            for j in 0..n {
                gen[(n + i, j)] = c64(k[(i, j)], 0.0);
            }
        }
        DetFamily { n, gen, a: complexify(a) }
    }

    /// `D` together with a per-row bound `|row_i Φ11| + |row_i Φ12| |A|`
    /// that never vanishes.
    fn from_top(&self, top: &CMatrix) -> (CMatrix, Vec<f64>) {
        let n = self.n;
        let p11 = top.view((0, 0), (n, n));
        let p12 = top.view((0, n), (n, n));
        let an = self.a.norm();
        let rows = (0..n).map(|i| p11.row(i).norm() + p12.row(i).norm() * an).collect();
        (p11 - p12 * &self.a, rows)
    }

    fn eval(&self, z: Complex64) -> (CMatrix, Vec<f64>) {
        let phi = (&self.gen * z).exp();
        self.from_top(&phi.rows(0, self.n).into_owned())
    }
}

/// `|det D|` over the product of row bounds; lies in `[0, 1]`.
fn normalized_det(d: &CMatrix, rows: &[f64]) -> f64 {
    let p: f64 = rows.iter().product();
    if p == 0.0 {
        return 0.0;
    }
    d.clone().lu().determinant().norm() / p
}

fn kernel_dim(d: &CMatrix, rows: &[f64]) -> usize {
    let top = rows.iter().cloned().fold(0.0, f64::max);
    linalg::singular_values(d).iter().filter(|&&s| s <= ZERO_TOL * top).count()
}

/// Log-derivative `tr(D^-1 D')` of the determinant, `None` on a singular `D`.
fn log_derivative(fam: &DetFamily, z: Complex64) -> Option<Complex64> {
    let (d, _) = fam.eval(z);
    let dp = (fam.eval(z + NEWTON_DIFF).0 - fam.eval(z - NEWTON_DIFF).0) / c64(2.0 * NEWTON_DIFF, 0.0);
    d.lu().solve(&dp).map(|sol| sol.trace()).filter(|l| l.is_finite())
}

/// Modified Newton on the determinant. The multiplicity comes from
/// `L^2 / -L'` with `L` the log-derivative, which tends to the order of the
/// zero; it is only trusted when close to an integer.
fn newton(fam: &DetFamily, seed: Complex64, limit: f64) -> (Option<Complex64>, usize) {
    let mut z = seed;
    for it in 1..=NEWTON_MAX {
        let Some(l) = log_derivative(fam, z) else {
            return (Some(z), it);
        };
        if l.norm() == 0.0 {
            return (None, it);
        }
        let h = (1e-3 / l.norm()).min(1e-3);
        let m = match (log_derivative(fam, z + h), log_derivative(fam, z - h)) {
            (Some(lp), Some(lm)) => {
                let est = -(l * l) / ((lp - lm) / c64(2.0 * h, 0.0));
                let r = est.re.round();
                if r >= 1.0 && r <= fam.n as f64 && (est - r).norm() < 0.25 {
                    r
                } else {
                    1.0
                }
            }
            _ => 1.0,
        };
        let step = m / l;
        z -= step;
        if z.norm() > limit {
            return (None, it);
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return (Some(z), it);
        }
    }
    (Some(z), NEWTON_MAX)
}

/// Scans `z -> det(D^co_z - z D^si_z A)` with `D^co = cosh(z sqrt K)`,
/// `z D^si = sinh(z sqrt K)/sqrt K`, built from `exp(z [[0, I], [K, 0]])`.
pub fn determinant_focal_scan(k: &DMatrix<f64>, a: &DMatrix<f64>, window: f64, resolution: f64) -> Result<ScanReport> {
    if !(resolution > 0.0 && resolution <= 0.1) {
        return Err(Error::InvalidParams(format!("resolution {resolution} outside (0, 0.1]")));
    }
    if !(window > 0.0) {
        return Err(Error::InvalidParams("window must be positive".into()));
    }
    if k.nrows() != a.nrows() || k.ncols() != a.ncols() || k.nrows() != k.ncols() {
        return Err(Error::InvalidParams("K and A must be square of equal size".into()));
    }
    let mut report = ScanReport {
        zeros_found: vec![],
        grid_resolution: resolution,
        newton_iterations: 0,
        max_residual: 0.0,
        divergences: vec![],
    };
    if k.nrows() == 0 {
        return Ok(report);
    }
    let fam = DetFamily::new(k, a);
    let steps = (window / resolution).ceil() as i64 + 1;
    let coords: Vec<f64> = (-steps..=steps).map(|i| i as f64 * resolution).collect();
    let m = coords.len();
    let ex: Vec<CMatrix> = coords.iter().map(|&x| (&fam.gen * c64(x, 0.0)).exp()).collect();
    let ey: Vec<CMatrix> = coords.iter().map(|&y| (&fam.gen * c64(0.0, y)).exp()).collect();
    let reach = window + 2.0 * resolution;
    let mut grid = vec![f64::INFINITY; m * m];
    for (i, x) in coords.iter().enumerate() {
        let top = ex[i].rows(0, fam.n).into_owned();
        for (j, y) in coords.iter().enumerate() {
            if x.hypot(*y) > reach {
                continue;
            }
            let (d, rows) = fam.from_top(&(&top * &ey[j]));
            grid[i * m + j] = normalized_det(&d, &rows);
        }
    }
    let mut candidates: Vec<Complex64> = Vec::new();
    for i in 1..m - 1 {
        for j in 1..m - 1 {
            let v = grid[i * m + j];
            if !v.is_finite() || v > 0.5 {
                continue;
            }
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if (di, dj) != (0, 0) {
                        let u = grid[(i as i64 + di) as usize * m + (j as i64 + dj) as usize];
                        if u < v {
                            is_min = false;
                        }
                    }
                }
            }
            if is_min {
                candidates.push(c64(coords[i], coords[j]));
            }
        }
    }
    for seed in candidates {
        let (found, iters) = newton(&fam, seed, 2.0 * window + 1.0);
        report.newton_iterations += iters;
        let Some(z) = found else {
            report.divergences.push(Error::NewtonDivergence { seed_re: seed.re, seed_im: seed.im });
            continue;
        };
        let (d, rows) = fam.eval(z);
        let res = normalized_det(&d, &rows);
        if res > ZERO_TOL {
            report.divergences.push(Error::NewtonDivergence { seed_re: seed.re, seed_im: seed.im });
            continue;
        }
        if z.norm() > window || report.zeros_found.iter().any(|q| (q.z - z).norm() <= DEDUPE) {
            continue;
        }
        report.max_residual = report.max_residual.max(res);
        report.zeros_found.push(ScanZero {
            z,
            mult: kernel_dim(&d, &rows),
            residual: res,
        });
    }
    report
        .zeros_found
        .sort_by(|p, q| (p.z.re, p.z.im).partial_cmp(&(q.z.re, q.z.im)).unwrap());
    Ok(report)
}

/// Kernel dimension of `D^co_z - z D^si_z A` at a given `z`.
pub fn kernel_dimension(k: &DMatrix<f64>, a: &DMatrix<f64>, z: Complex64) -> usize {
    if k.nrows() == 0 {
        return 0;
    }
    let (d, rows) = DetFamily::new(k, a).eval(z);
    kernel_dim(&d, &rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteRoot {
    #[serde(serialize_with = "crate::json::ser_complex_vec")]
    pub values: Vec<Complex64>,
    pub mult: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BruteRoots {
    /// One representative of each `±` pair.
    pub roots: Vec<BruteRoot>,
    /// Dimension of the joint kernel in `q^c`.
    pub zero_dim: usize,
}

/// Joint eigenspaces of `ad(a_i)^2` and `ad(a_i + a_j)^2` on `q^c`. Cross
/// terms `2 α(a_i) α(a_j)` fix relative signs.
pub fn brute_force_roots(pair: &SymmetricPairData, cartan: &CartanSubspace) -> Result<BruteRoots> {
    let d = pair.dim();
    if d > BRUTE_DIM_LIMIT {
        return Err(Error::DimensionGuard { dim: d, limit: BRUTE_DIM_LIMIT });
    }
    let alg = &pair.algebra;
    let q = &pair.q;
    let r = cartan.dim();
    let nq = q.ncols();
    let square_on_q = |x: &DVector<f64>| {
        let ad = alg.ad_coords(x);
        complexify(&(q.transpose() * &ad * &ad * q))
    };
    let mut ops: Vec<(usize, usize, CMatrix)> = Vec::new();
    for i in 0..r {
        ops.push((i, i, square_on_q(&cartan.basis.column(i).into_owned())));
    }
    for i in 0..r {
        for j in (i + 1)..r {
            let x = cartan.basis.column(i) + cartan.basis.column(j);
            ops.push((i, j, square_on_q(&x)));
        }
    }
    let mut pieces: Vec<(CMatrix, Vec<Complex64>)> = vec![(CMatrix::identity(nq, nq), vec![])];
    for (_, _, op) in &ops {
        let clusters = linalg::eigen_clusters(op, 1e-8)
            .ok_or_else(|| Error::ClusteringAmbiguous("ad(a)^2 is not diagonalizable on q".into()))?;
        let mut next = Vec::new();
        for (space, vals) in &pieces {
            for cl in &clusters {
                let common = linalg::intersect(space, &cl.vectors, 1e-6);
                if common.ncols() > 0 {
                    let mut v = vals.clone();
                    v.push(cl.value);
                    next.push((common, v));
                }
            }
        }
        pieces = next;
    }
    let total: usize = pieces.iter().map(|p| p.0.ncols()).sum();
    if total != nq {
        return Err(Error::ClusteringAmbiguous(format!("joint eigenspaces cover {total} of {nq}")));
    }
    let scale = pieces
        .iter()
        .flat_map(|p| p.1.iter().map(|v| v.norm()))
        .fold(1.0, f64::max);
    let mut out = BruteRoots { roots: vec![], zero_dim: 0 };
    for (space, vals) in pieces {
        let squares = &vals[..r];
        if squares.iter().all(|s| s.norm() <= 1e-8 * scale) {
            out.zero_dim += space.ncols();
            continue;
        }
        let pivot = (0..r)
            .max_by(|&a, &b| squares[a].norm().partial_cmp(&squares[b].norm()).unwrap())
            .expect("rank is positive here");
        let mut values = vec![c64(0.0, 0.0); r];
        values[pivot] = squares[pivot].sqrt();
        for j in 0..r {
            if j == pivot {
                continue;
            }
            let (lo, hi) = (pivot.min(j), pivot.max(j));
            let k = ops.iter().position(|o| o.0 == lo && o.1 == hi).expect("pair operator");
            let cross = (vals[k] - squares[pivot] - squares[j]) / 2.0;
            values[j] = cross / values[pivot];
        }
        if !crate::roots::lex_positive(&values) {
            values.iter_mut().for_each(|v| *v = -*v);
        }
        out.roots.push(BruteRoot {
            values,
            mult: space.ncols(),
        });
    }
    out.roots.sort_by(|a, b| {
        let ka: Vec<f64> = a.values.iter().map(|v| v.re).chain(a.values.iter().map(|v| v.im)).collect();
        let kb: Vec<f64> = b.values.iter().map(|v| v.re).chain(b.values.iter().map(|v| v.im)).collect();
        kb.partial_cmp(&ka).unwrap()
    });
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct JacobiTrajectory {
    pub s: Vec<f64>,
    pub y: Vec<CVector>,
    pub y_prime: Vec<CVector>,
    /// Largest relative change of `Y'^T G Y' - Y^T G K Y` along the run.
    pub energy_drift: f64,
}

impl JacobiTrajectory {
    pub fn end(&self) -> &CVector {
        self.y.last().expect("trajectory is never empty")
    }

    /// Linear interpolation is avoided: returns the sample nearest to `s`.
    pub fn at(&self, s: f64) -> &CVector {
        let i = self
            .s
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - s).abs().partial_cmp(&(b.1 - s).abs()).unwrap())
            .map(|p| p.0)
            .unwrap_or(0);
        &self.y[i]
    }
}

/// RK4 for `Y'' = ad(v)^2 Y` on `q^c`, vectors in the basis `pair.q`.
pub fn jacobi_integrate(
    pair: &SymmetricPairData,
    v: &DVector<f64>,
    x0: &CVector,
    x0_prime: &CVector,
    s_max: f64,
    steps: usize,
) -> Result<JacobiTrajectory> {
    if steps < 100 {
        return Err(Error::InvalidParams(format!("need at least 100 steps, got {steps}")));
    }
    let q = &pair.q;
    let nq = q.ncols();
    if x0.len() != nq || x0_prime.len() != nq {
        return Err(Error::InvalidParams("initial data must have dim q entries".into()));
    }
    let ad = pair.algebra.ad_coords(v);
    let k = complexify(&(q.transpose() * &ad * &ad * q));
    let g = complexify(&(q.transpose() * pair.algebra.killing_matrix() * q));
    let gk = &g * &k;
    let energy = |y: &CVector, yp: &CVector| yp.transpose() * &g * yp - y.transpose() * &gk * y;
    let e0 = energy(x0, x0_prime)[(0, 0)];
    let h = s_max / steps as f64;
    let (mut y, mut yp) = (x0.clone(), x0_prime.clone());
    let mut out = JacobiTrajectory {
        s: vec![0.0],
        y: vec![y.clone()],
        y_prime: vec![yp.clone()],
        energy_drift: 0.0,
    };
    let hc = c64(h, 0.0);
    for i in 1..=steps {
        let k1y = yp.clone();
        let k1p = &k * &y;
        let k2y = &yp + &k1p * (hc / 2.0);
        let k2p = &k * (&y + &k1y * (hc / 2.0));
        let k3y = &yp + &k2p * (hc / 2.0);
        let k3p = &k * (&y + &k2y * (hc / 2.0));
        let k4y = &yp + &k3p * hc;
        let k4p = &k * (&y + &k3y * hc);
        y += (k1y + k2y * c64(2.0, 0.0) + k3y * c64(2.0, 0.0) + k4y) * (hc / 6.0);
        yp += (k1p + k2p * c64(2.0, 0.0) + k3p * c64(2.0, 0.0) + k4p) * (hc / 6.0);
        let e = energy(&y, &yp)[(0, 0)];
        let scale = e0.norm().max(1.0) * (1.0 + y.norm() * yp.norm());
        out.energy_drift = out.energy_drift.max((e - e0).norm() / scale);
        out.s.push(i as f64 * h);
        out.y.push(y.clone());
        out.y_prime.push(yp.clone());
    }
    Ok(out)
}
