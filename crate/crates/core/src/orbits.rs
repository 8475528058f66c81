//! Closed-form geometry of isotropy orbits through `exp(w)H` for `w` in a
//! Cartan subspace: tangent/normal splitting, shape and Jacobi spectra, the
//! `D^co`/`D^si` operators, focal lattices and partial-tube shape operators.
//!
//! Points of `q` are given by Cartan coefficients. Vectors of `q^c` passed to
//! [`dco_dsi`] and [`strong_jacobi_field`] are coordinates in the orthonormal
//! basis `pair.q`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::MatrixLieAlgebra;
use crate::linalg::{self, c64, CMatrix, CVector, I};
use crate::pairs::SymmetricPairData;
use crate::roots::RestrictedRootSystem;

/// Distance below which `α(w)` counts as on the lattice.
pub const LATTICE_TOL: f64 = 1e-9;
/// Distances in `[LATTICE_TOL, SINGULAR_MARGIN)` are refused as borderline.
pub const SINGULAR_MARGIN: f64 = 1e-6;

/// A point `exp(w)H` with `w` in the Cartan subspace.
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    pub w: DVector<f64>,
    /// Coefficients of `w` in the Cartan basis.
    pub coeffs: Vec<f64>,
}

impl OrbitPoint {
    pub fn new(system: &RestrictedRootSystem, w: &DVector<f64>) -> Result<OrbitPoint> {
        let (c, res) = system.cartan.coefficients(w);
        if res > 1e-8 * (1.0 + w.norm()) {
            return Err(Error::WNotInCartan { residual: res });
        }
        Ok(OrbitPoint {
            w: w.clone(),
            coeffs: c.iter().cloned().collect(),
        })
    }

    pub fn from_coeffs(system: &RestrictedRootSystem, c: &[f64]) -> OrbitPoint {
        OrbitPoint {
            w: system.cartan.combine(c),
            coeffs: c.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    QPart,
    HPrimePart,
    ZeroPart,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    /// Index into `RestrictedRootSystem::roots`; `None` on the zero part.
    pub root: Option<usize>,
    #[serde(serialize_with = "crate::json::ser_complex_vec")]
    pub root_values: Vec<Complex64>,
    #[serde(serialize_with = "crate::json::ser_complex")]
    pub eigenvalue: Complex64,
    pub mult: usize,
    pub part: Part,
    /// Eigenspace (complex coordinates in the algebra).
    #[serde(skip)]
    pub space: CMatrix,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OrbitSpectrum {
    pub entries: Vec<SpectrumEntry>,
}

impl OrbitSpectrum {
    pub fn total_mult(&self) -> usize {
        self.entries.iter().map(|e| e.mult).sum()
    }

    /// Eigenvalues repeated by multiplicity.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.mult))
            .collect()
    }

    /// Concatenated eigenbasis with the matching eigenvalue per column.
    pub fn eigenbasis(&self) -> (CMatrix, Vec<Complex64>) {
        let blocks: Vec<&CMatrix> = self.entries.iter().map(|e| &e.space).collect();
        let vals = self
            .entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.eigenvalue, e.space.ncols()))
            .collect();
        (linalg::hstack(&blocks), vals)
    }
}

/// Distance from `z` to `iπZ`.
pub fn lattice_distance(z: Complex64) -> f64 {
    let k = (z.im / std::f64::consts::PI).round();
    c64(z.re, z.im - k * std::f64::consts::PI).norm()
}

/// Distance from `z` to `iπ(Z + 1/2)`.
pub fn half_lattice_distance(z: Complex64) -> f64 {
    lattice_distance(z - I * std::f64::consts::FRAC_PI_2)
}

/// `Ok(true)` on the lattice, `Ok(false)` clear of it, an error when borderline.
pub(crate) fn on_lattice(distance: f64, root: usize) -> Result<bool> {
    if distance < LATTICE_TOL {
        Ok(true)
    } else if distance < SINGULAR_MARGIN {
        Err(Error::SingularDirection { root, distance })
    } else {
        Ok(false)
    }
}

/// `-i β(v) / tan(i β(w))`, the branch carried by `q'`-type root spaces.
pub(crate) fn cot_branch(bw: Complex64, bv: Complex64) -> Complex64 {
    -I * bv / (I * bw).tan()
}

/// `i β(v) tan(i β(w))`, the branch carried by `h'`-type root spaces.
pub(crate) fn tan_branch(bw: Complex64, bv: Complex64) -> Complex64 {
    I * bv * (I * bw).tan()
}

/// Positive root indices.
pub(crate) fn positive_indices(system: &RestrictedRootSystem) -> Vec<usize> {
    (0..system.roots.len()).filter(|&i| system.roots[i].is_positive()).collect()
}

/// Complexified tangent and normal spaces (pulled back to `q^c`).
pub fn isotropy_tangent_split(system: &RestrictedRootSystem, point: &OrbitPoint) -> Result<(CMatrix, CMatrix)> {
    let mut tangent = Vec::new();
    let mut normal = vec![system.zero_q.clone()];
    for i in positive_indices(system) {
        let r = &system.roots[i];
        if on_lattice(lattice_distance(r.eval(&point.coeffs)), i)? {
            normal.push(r.q_space.clone());
        } else {
            tangent.push(r.q_space.clone());
        }
    }
    let d = system.zero_q.nrows();
    let cat = |v: &Vec<CMatrix>| {
        if v.is_empty() {
            CMatrix::zeros(d, 0)
        } else {
            linalg::hstack(&v.iter().collect::<Vec<_>>())
        }
    };
    Ok((cat(&tangent), cat(&normal)))
}

/// Shape operator spectrum of the isotropy orbit through `exp(w)H` in the
/// direction `a` (Cartan coefficients).
pub fn isotropy_shape_spectrum(system: &RestrictedRootSystem, point: &OrbitPoint, a: &[f64]) -> Result<OrbitSpectrum> {
    let mut entries = Vec::new();
    for i in positive_indices(system) {
        let r = &system.roots[i];
        let bw = r.eval(&point.coeffs);
        if on_lattice(lattice_distance(bw), i)? {
            continue;
        }
        let ba = r.eval(a);
        entries.push(SpectrumEntry {
            root: Some(i),
            root_values: r.values.clone(),
            eigenvalue: cot_branch(bw, ba),
            mult: r.mult,
            part: Part::QPart,
            space: r.q_space.clone(),
        });
    }
    Ok(OrbitSpectrum { entries })
}

/// Spectrum of `ad(v)^2` on `q^c`: `α(v)^2` on each root space and zero on
/// the centralizer.
pub fn jacobi_spectrum(system: &RestrictedRootSystem, v: &[f64]) -> OrbitSpectrum {
    let mut entries: Vec<SpectrumEntry> = positive_indices(system)
        .into_iter()
        .map(|i| {
            let r = &system.roots[i];
            let bv = r.eval(v);
            SpectrumEntry {
                root: Some(i),
                root_values: r.values.clone(),
                eigenvalue: bv * bv,
                mult: r.mult,
                part: Part::QPart,
                space: r.q_space.clone(),
            }
        })
        .collect();
    if system.zero_q.ncols() > 0 {
        entries.push(SpectrumEntry {
            root: None,
            root_values: vec![],
            eigenvalue: c64(0.0, 0.0),
            mult: system.zero_q.ncols(),
            part: Part::ZeroPart,
            space: system.zero_q.clone(),
        });
    }
    OrbitSpectrum { entries }
}

/// `ad(v)^2` restricted to `q`, in the basis `pair.q`.
pub fn ad_squared_on_q(pair: &SymmetricPairData, v: &DVector<f64>) -> nalgebra::DMatrix<f64> {
    let ad = pair.algebra.ad_coords(v);
    let aq = &ad * &pair.q;
    pair.q.transpose() * (&ad * aq)
}

fn sinhc(y: Complex64) -> Complex64 {
    if y.norm() < 1e-4 {
        let y2 = y * y;
        1.0 + y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sinh() / y
    }
}

/// `cosh(sqrt(m))` and `sinh(sqrt(m))/sqrt(m)` by scaled Taylor series and
/// doubling.
fn even_series(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    let norm = m.norm();
    let mut s = 0;
    while norm / 4f64.powi(s) > 0.5 {
        s += 1;
    }
    let ms = m / c64(4f64.powi(s), 0.0);
    let id = CMatrix::identity(n, n);
    let mut co = id.clone();
    let mut si = id.clone();
    let mut term = id.clone();
    for k in 1..40 {
        term = &term * &ms;
        let kf = k as f64;
        let c = &term / c64(fact(2.0 * kf), 0.0);
        let t = &term / c64(fact(2.0 * kf + 1.0), 0.0);
        co += &c;
        si += &t;
        if c.norm() < 1e-17 * co.norm() {
            break;
        }
    }
    for _ in 0..s {
        let co2 = &co * &co * c64(2.0, 0.0) - &id;
        si = &si * &co;
        co = co2;
    }
    (co, si)
}

fn fact(x: f64) -> f64 {
    (1..=x as u64).map(|k| k as f64).product()
}

/// `D^co_{zv} = cosh(z ad v)` and `D^si_{zv} = sinh(z ad v)/(z ad v)` on `q^c`,
/// as matrices in the basis `pair.q`.
pub fn dco_dsi(pair: &SymmetricPairData, v: &DVector<f64>, z: Complex64) -> (CMatrix, CMatrix) {
    let k = linalg::complexify(&ad_squared_on_q(pair, v));
    dco_dsi_from(&k, z)
}

/// Same as [`dco_dsi`] given `K = ad(v)^2|_q`.
pub fn dco_dsi_from(k: &CMatrix, z: Complex64) -> (CMatrix, CMatrix) {
    let n = k.nrows();
    if n == 0 {
        return (CMatrix::zeros(0, 0), CMatrix::zeros(0, 0));
    }
    if let Some(cl) = linalg::eigen_clusters(k, 1e-10) {
        let co = linalg::matrix_function(&cl, |mu| (z * mu.sqrt()).cosh());
        let si = linalg::matrix_function(&cl, |mu| sinhc(z * mu.sqrt()));
        if let (Some(co), Some(si)) = (co, si) {
            return (co, si);
        }
    }
    even_series(&(k * (z * z)))
}

/// `Y(s) = D^co_{sv} X - s D^si_{sv} (A_v X)` in the basis `pair.q`.
pub fn strong_jacobi_field(pair: &SymmetricPairData, v: &DVector<f64>, x: &CVector, ax: &CVector, s: f64) -> CVector {
    let (co, si) = dco_dsi(pair, v, c64(s, 0.0));
    co * x - si * ax * c64(s, 0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct FocalFamily {
    pub root: usize,
    #[serde(serialize_with = "crate::json::ser_complex")]
    pub offset: Complex64,
    #[serde(serialize_with = "crate::json::ser_complex")]
    pub step: Complex64,
    pub mult: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FocalPoint {
    #[serde(serialize_with = "crate::json::ser_complex")]
    pub z: Complex64,
    pub mult: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FocalSet {
    pub families: Vec<FocalFamily>,
    pub window: f64,
    /// Lattice points with `|z| <= window`, coincident points merged.
    pub points: Vec<FocalPoint>,
}

/// Complex focal radii of the isotropy orbit along the geodesic in direction
/// `a`: for each tangent root, `z_k = (iπk - β(w)) / β(a)`.
pub fn complex_focal_radii(system: &RestrictedRootSystem, point: &OrbitPoint, a: &[f64], window: f64) -> Result<FocalSet> {
    let spectrum = isotropy_shape_spectrum(system, point, a)?;
    let scale = system
        .roots
        .iter()
        .map(|r| r.eval(a).norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut families = Vec::new();
    let mut raw: Vec<(Complex64, usize)> = Vec::new();
    for e in &spectrum.entries {
        let i = e.root.expect("tangent entries carry a root");
        let r = &system.roots[i];
        let ba = r.eval(a);
        if ba.norm() <= 1e-12 * scale {
            continue;
        }
        let offset = -r.eval(&point.coeffs) / ba;
        let step = -I * std::f64::consts::PI / ba;
        let kmax = ((window + offset.norm()) / step.norm()).ceil() as i64 + 1;
        for k in -kmax..=kmax {
            let z = offset + step * k as f64;
            if z.norm() <= window {
                raw.push((z, r.mult));
            }
        }
        families.push(FocalFamily {
            root: i,
            offset,
            step,
            mult: r.mult,
        });
    }
    let groups = linalg::cluster(&raw.iter().map(|p| p.0).collect::<Vec<_>>(), 1e-9);
    let mut points: Vec<FocalPoint> = groups
        .into_iter()
        .map(|g| FocalPoint {
            z: g.iter().map(|&i| raw[i].0).sum::<Complex64>() / g.len() as f64,
            mult: g.iter().map(|&i| raw[i].1).sum(),
        })
        .collect();
    points.sort_by(|p, q| (p.z.re, p.z.im).partial_cmp(&(q.z.re, q.z.im)).unwrap());
    Ok(FocalSet {
        families,
        window,
        points,
    })
}

/// `(cosh x - 1)/x + (x - sinh x)/x^2`, with its series near zero.
fn tube_kernel(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        x / 3.0 + x * x * x / 30.0
    } else {
        (x.cosh() - 1.0) / x + (x - x.sinh()) / (x * x)
    }
}

fn series_fn(m: &CMatrix, coeff: impl Fn(usize) -> f64) -> CMatrix {
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 0..200 {
        let c = coeff(k);
        if c != 0.0 {
            out += &term * c64(c, 0.0);
        }
        if k > 4 && (&term * c64(c.abs().max(coeff(k + 1).abs()), 0.0)).norm() < 1e-16 * out.norm().max(1e-300) {
            break;
        }
        term = &term * m;
    }
    out
}

/// Horizontal part of the partial-tube shape operator `A^t_w X~_v`, in full
/// complex coordinates. `a_w_x` and `a_v_x` are the base shape operator
/// applied to `X` in the directions `w` and `v`.
pub fn partial_tube_shape(
    alg: &MatrixLieAlgebra,
    v: &DVector<f64>,
    w: &DVector<f64>,
    x: &CVector,
    a_w_x: &CVector,
    a_v_x: &CVector,
) -> Result<CVector> {
    let br = alg.bracket_coords(v, w).norm();
    if br > 1e-10 * (1.0 + v.norm() * w.norm()) {
        return Err(Error::NonAbelianSpan { norm: br });
    }
    let adv = linalg::complexify(&alg.ad_coords(v));
    let adw = linalg::complexify(&alg.ad_coords(w));
    let fs = linalg::eigen_clusters(&adv, 1e-10).and_then(|cl| {
        Some((
            linalg::matrix_function(&cl, |z| z.sinh())?,
            linalg::matrix_function(&cl, sinhc)?,
            linalg::matrix_function(&cl, tube_kernel)?,
        ))
    });
    let (sh, shc, k3) = match fs {
        Some(f) => f,
        None => {
            let odd = |k: usize| if k % 2 == 1 { 1.0 / fact(k as f64) } else { 0.0 };
            let even = |k: usize| if k % 2 == 0 { 1.0 / fact(k as f64 + 1.0) } else { 0.0 };
            // (cosh x - 1)/x + (x - sinh x)/x^2 = sum_{odd k} x^k (1/(k+1)! - 1/(k+2)!)
            let k3c = |k: usize| {
                if k % 2 == 1 {
                    1.0 / fact(k as f64 + 1.0) - 1.0 / fact(k as f64 + 2.0)
                } else {
                    0.0
                }
            };
            (series_fn(&adv, odd), series_fn(&adv, even), series_fn(&adv, k3c))
        }
    };
    let t1 = -(&adw * (&sh * x));
    let t2 = &shc * a_w_x;
    let t3 = &k3 * (&adw * a_v_x);
    Ok(t1 + t2 + t3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{construct_algebra, Family};
    use crate::pairs::{build_pair, Selector};
    use crate::roots::{maximal_abelian, restricted_roots};

    fn sl2() -> (SymmetricPairData, RestrictedRootSystem) {
        let a = construct_algebra(Family::SlR, &[2]).unwrap();
        let pair = build_pair(&a, "negt[I(1,1)]", None).unwrap();
        let cs = maximal_abelian(&pair, Selector::Q, 3).unwrap();
        let sys = restricted_roots(&pair, &cs).unwrap();
        (pair, sys)
    }

    #[test]
    fn sl2_shape_eigenvalue_is_coth() {
        let (_, sys) = sl2();
        let beta = sys.positive().next().unwrap().values[0];
        let (t, s) = (0.3, 0.7);
        let p = OrbitPoint::from_coeffs(&sys, &[t]);
        let sp = isotropy_shape_spectrum(&sys, &p, &[s]).unwrap();
        assert_eq!(sp.total_mult(), 1);
        let want = -beta * s / (beta * t).tanh();
        assert!((sp.entries[0].eigenvalue - want).norm() < 1e-12);
    }

    #[test]
    fn zero_w_has_no_tangent() {
        let (_, sys) = sl2();
        let p = OrbitPoint::from_coeffs(&sys, &[0.0]);
        let (t, n) = isotropy_tangent_split(&sys, &p).unwrap();
        assert_eq!((t.ncols(), n.ncols()), (0, 2));
    }

    #[test]
    fn borderline_is_singular() {
        let (_, sys) = sl2();
        let beta = sys.positive().next().unwrap().values[0].re;
        let p = OrbitPoint::from_coeffs(&sys, &[1e-7 / beta]);
        assert!(matches!(isotropy_shape_spectrum(&sys, &p, &[1.0]), Err(Error::SingularDirection { .. })));
    }

    #[test]
    fn dco_dsi_at_zero_is_identity() {
        let (pair, sys) = sl2();
        let v = sys.cartan.combine(&[1.3]);
        let (co, si) = dco_dsi(&pair, &v, c64(0.0, 0.0));
        let id = CMatrix::identity(2, 2);
        assert!((co - &id).norm() < 1e-14 && (si - id).norm() < 1e-14);
    }

    #[test]
    fn series_fallback_matches_eigen_path() {
        let k = linalg::complexify(&nalgebra::DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 0.0, 9.0]));
        let z = c64(0.7, 0.4);
        let (c1, s1) = dco_dsi_from(&k, z);
        let (c2, s2) = even_series(&(&k * (z * z)));
        assert!((c1 - c2).norm() < 1e-10 && (s1 - s2).norm() < 1e-10);
        // nilpotent input takes the series path
        let n = linalg::complexify(&nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        let (co, si) = dco_dsi_from(&n, c64(2.0, 0.0));
        assert!((co[(0, 1)] - c64(2.0, 0.0)).norm() < 1e-12);
        assert!((si[(0, 1)] - c64(4.0 / 6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn focal_lattice_sl2() {
        let (_, sys) = sl2();
        let p = OrbitPoint::from_coeffs(&sys, &[0.4]);
        let fs = complex_focal_radii(&sys, &p, &[1.0], 8.0).unwrap();
        assert_eq!(fs.families.len(), 1);
        assert!(fs.points.iter().any(|q| (q.z - c64(-0.4, 0.0)).norm() < 1e-12));
        let empty = complex_focal_radii(&sys, &p, &[0.0], 8.0).unwrap();
        assert!(empty.points.is_empty());
    }

    #[test]
    fn tube_kernel_series_is_continuous() {
        let x = c64(1.0001e-4, 0.0);
        let exact = (x.cosh() - 1.0) / x + (x - x.sinh()) / (x * x);
        assert!((tube_kernel(c64(0.99999e-4, 0.0)) - exact).norm() < 1e-8);
    }
}
