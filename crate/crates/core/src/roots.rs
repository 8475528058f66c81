//! Cartan subspaces, restricted root systems and rank.
//!
//! A maximal abelian subspace is found by centralizer descent: the
//! centralizer of a generic element of a Lie triple system is maximal
//! abelian there. For the full `q` the search runs on `q∩p` first and then
//! on the part of `q∩f` commuting with it, so every basis vector lies in one
//! of the two pieces.
//!
//! Roots are read off a single Hermitian operator. In coordinates that are
//! orthonormal for `-B(X, θY)`, `ad(a)` is symmetric for `a ∈ p` and skew for
//! `a ∈ f`, so `Σ t_i ad(a_i) - i Σ t_j ad(a_j)` (p terms, then f terms) is
//! Hermitian and its eigenspaces are the joint root spaces for generic `t`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liealg::{self, MatrixLieAlgebra};
use crate::linalg::{self, c64, CMatrix, CVector};
use crate::pairs::{Selector, SymmetricPairData};

const CENTRALIZER_RTOL: f64 = 1e-6;
const ATTEMPTS: usize = 8;

/// Maximal abelian subspace of a selector, basis ordered `p` members first.
#[derive(Debug, Clone)]
pub struct CartanSubspace {
    pub selector: Selector,
    /// Orthonormal coordinate columns.
    pub basis: DMatrix<f64>,
    /// Number of leading columns lying in `q∩p`.
    pub n_p: usize,
}

impl CartanSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn n_f(&self) -> usize {
        self.dim() - self.n_p
    }

    /// Coordinates of `Σ c_i a_i`.
    pub fn combine(&self, c: &[f64]) -> DVector<f64> {
        assert_eq!(c.len(), self.dim(), "one coefficient per Cartan basis vector");
        &self.basis * DVector::from_column_slice(c)
    }

    /// Coefficients of a coordinate vector in the Cartan basis, with the
    /// distance of the vector from the span.
    pub fn coefficients(&self, x: &DVector<f64>) -> (DVector<f64>, f64) {
        let c = self.basis.transpose() * x;
        let res = (&self.basis * &c - x).norm();
        (c, res)
    }
}

pub(crate) fn random_in(v: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let c = DVector::from_fn(v.ncols(), |_, _| rng.gen_range(-1.0..1.0));
    v * c
}

/// Orthonormal basis of `{Y ∈ span(v) : [x, Y] = 0}`.
pub fn centralizer_in(alg: &MatrixLieAlgebra, x: &DVector<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    if v.ncols() == 0 {
        return v.clone();
    }
    let m = alg.ad_coords(x) * v;
    v * linalg::null_space_gram(&m, CENTRALIZER_RTOL)
}

/// Largest bracket among the columns, relative to the product of their norms.
pub fn abelian_residual(alg: &MatrixLieAlgebra, basis: &DMatrix<f64>) -> f64 {
    let k = basis.ncols();
    let mats: Vec<DMatrix<f64>> = (0..k).map(|i| alg.matrix(&basis.column(i).into_owned())).collect();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            let c = &mats[i] * &mats[j] - &mats[j] * &mats[i];
            let s = mats[i].norm() * mats[j].norm();
            if s > 0.0 {
                worst = worst.max(c.norm() / s);
            }
        }
    }
    worst
}

/// Centralizer of a generic element of `v` inside `v`, accepted when abelian
/// and equal to the centralizer of a second, independent generic element.
fn descend(alg: &MatrixLieAlgebra, v: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> Option<DMatrix<f64>> {
    if v.ncols() == 0 {
        return Some(v.clone());
    }
    let x = random_in(v, rng);
    let a = centralizer_in(alg, &x, v);
    if a.ncols() == 0 || abelian_residual(alg, &a) > 1e-8 {
        return None;
    }
    let y = random_in(&a, rng);
    let z = centralizer_in(alg, &y, v);
    (z.ncols() == a.ncols()).then_some(a)
}

/// Maximal abelian subspace of the selected subspace, by randomized
/// centralizer descent with a bounded number of reseeded retries.
pub fn maximal_abelian(pair: &SymmetricPairData, within: Selector, seed: u64) -> Result<CartanSubspace> {
    let alg = &pair.algebra;
    let (vp, vf) = pair.selector_parts(within)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let Some(b) = descend(alg, &vp, &mut rng) else {
            continue;
        };
        let zf = if b.ncols() > 0 {
            let y = random_in(&b, &mut rng);
            centralizer_in(alg, &y, &vf)
        } else {
            vf.clone()
        };
        let Some(c) = descend(alg, &zf, &mut rng) else {
            continue;
        };
        let basis = linalg::hstack(&[&b, &c]);
        if abelian_residual(alg, &basis) > 1e-8 {
            continue;
        }
        if basis.ncols() > 0 {
            // maximality inside the whole selector
            let full = linalg::hstack(&[&vp, &vf]);
            let x = random_in(&basis, &mut rng);
            if centralizer_in(alg, &x, &full).ncols() != basis.ncols() {
                continue;
            }
            if within == Selector::Q && alg.dim <= 120 && !liealg::is_semisimple_operator(&alg.ad_coords(&x), 1e-8) {
                continue;
            }
        }
        return Ok(CartanSubspace {
            selector: within,
            n_p: b.ncols(),
            basis,
        });
    }
    Err(Error::MaximalityNotReached { attempts: ATTEMPTS })
}

/// Dimensions of the maximal abelian subspaces found with five seeds.
pub fn rank_samples(pair: &SymmetricPairData, selector: Selector, seed: u64) -> Result<Vec<usize>> {
    (0..5u64)
        .map(|k| maximal_abelian(pair, selector, seed.wrapping_mul(31).wrapping_add(k)).map(|c| c.dim()))
        .collect()
}

/// Rank over a selector: the largest dimension across five seeds.
pub fn rank(pair: &SymmetricPairData, selector: Selector) -> Result<usize> {
    Ok(rank_samples(pair, selector, 0)?.into_iter().max().unwrap_or(0))
}

/// One restricted root.
#[derive(Debug, Clone, Serialize)]
pub struct Root {
    /// `α(a_i)` on the ordered Cartan basis.
    #[serde(serialize_with = "crate::json::ser_complex_vec")]
    pub values: Vec<Complex64>,
    pub mult: usize,
    /// Basis of the root space `g_α` (complex coordinates).
    #[serde(skip)]
    pub g_space: CMatrix,
    #[serde(skip)]
    pub q_space: CMatrix,
    #[serde(skip)]
    pub h_space: CMatrix,
    /// `a_α` in the Cartan basis: `α(a) = B(a_α, a)`.
    #[serde(serialize_with = "crate::json::ser_complex_dvec")]
    pub a_alpha: CVector,
}

impl Root {
    /// `α(x)` for `x = Σ c_i a_i`.
    pub fn eval(&self, c: &[f64]) -> Complex64 {
        self.values.iter().zip(c).map(|(v, x)| v * *x).sum()
    }

    pub fn eval_c(&self, c: &[Complex64]) -> Complex64 {
        self.values.iter().zip(c).map(|(v, x)| v * x).sum()
    }

    pub fn is_positive(&self) -> bool {
        lex_positive(&self.values)
    }
}

/// Real parts first, then imaginary parts; the first entry above `1e-9` in
/// size decides the sign.
pub fn lex_positive(values: &[Complex64]) -> bool {
    for x in values.iter().map(|v| v.re).chain(values.iter().map(|v| v.im)) {
        if x.abs() > 1e-9 {
            return x > 0.0;
        }
    }
    false
}

#[derive(Debug, Clone)]
pub struct RestrictedRootSystem {
    pub cartan: CartanSubspace,
    /// Every root, positive and negative.
    pub roots: Vec<Root>,
    /// `z_{q^c}(a^c)` and `z_{h^c}(a^c)`.
    pub zero_q: CMatrix,
    pub zero_h: CMatrix,
    /// Killing Gram matrix of the Cartan basis.
    pub cartan_gram: DMatrix<f64>,
}

impl RestrictedRootSystem {
    pub fn positive(&self) -> impl Iterator<Item = &Root> {
        self.roots.iter().filter(|r| r.is_positive())
    }

    pub fn rank(&self) -> usize {
        self.cartan.dim()
    }

    /// `dim_C q^c` reassembled from the root decomposition.
    pub fn q_dim_from_roots(&self) -> usize {
        self.zero_q.ncols() + self.positive().map(|r| r.q_space.ncols()).sum::<usize>()
    }
}

fn cholesky_frame(pair: &SymmetricPairData) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let l = pair.theta_gram.clone().cholesky()?.l();
    let l_inv_t = l.clone().try_inverse()?.transpose();
    Some((l, l_inv_t))
}

struct RawCluster {
    values: Vec<Complex64>,
    /// Eigenvectors in algebra coordinates.
    space: CMatrix,
}

/// Joint eigenspaces of the `ad(a_i)` in the positive frame.
fn hermitian_clusters(
    pair: &SymmetricPairData,
    cartan: &CartanSubspace,
    l: &DMatrix<f64>,
    l_inv_t: &DMatrix<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<RawCluster>> {
    let alg = &pair.algebra;
    let r = cartan.dim();
    let d = alg.dim;
    let ops: Vec<DMatrix<f64>> = (0..r)
        .map(|i| l.transpose() * alg.ad_coords(&cartan.basis.column(i).into_owned()) * l_inv_t)
        .collect();
    let scale = ops.iter().map(|m| m.norm()).fold(1.0, f64::max);
    let mut last = String::new();
    for _ in 0..ATTEMPTS {
        let mut h = CMatrix::zeros(d, d);
        for (i, op) in ops.iter().enumerate() {
            let t = rng.gen_range(0.5..1.5);
            let w = if i < cartan.n_p { c64(t, 0.0) } else { c64(0.0, -t) };
            h += linalg::complexify(op) * w;
        }
        let h = (&h + h.adjoint()) * c64(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(h);
        let vals: Vec<Complex64> = eig.eigenvalues.iter().map(|&v| c64(v, 0.0)).collect();
        let spread = vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let groups = linalg::cluster(&vals, 1e-8 * spread);
        let mut out = Vec::with_capacity(groups.len());
        let mut ok = true;
        for g in groups {
            let w = linalg::stack_columns(d, &g.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
            let m = g.len() as f64;
            let mut values = Vec::with_capacity(r);
            for op in &ops {
                let aw = linalg::complexify(op) * &w;
                let val = (w.adjoint() * &aw).trace() / m;
                let res = (aw - &w * val).norm();
                if res > 1e-8 * scale * m.sqrt() {
                    ok = false;
                    last = format!("residual {res:.2e} on a cluster of size {}", g.len());
                    break;
                }
                values.push(val);
            }
            if !ok {
                break;
            }
            let space = linalg::complexify(l_inv_t) * &w;
            out.push(RawCluster { values, space });
        }
        if ok {
            return Ok(out);
        }
    }
    Err(Error::ClusteringAmbiguous(last))
}

/// Fallback for a non-Cartan `θ`: eigenspaces of a generic complex
/// combination of the `ad(a_i)`.
fn general_clusters(pair: &SymmetricPairData, cartan: &CartanSubspace, rng: &mut ChaCha8Rng) -> Result<Vec<RawCluster>> {
    let alg = &pair.algebra;
    let r = cartan.dim();
    let ops: Vec<CMatrix> = (0..r)
        .map(|i| linalg::complexify(&alg.ad_coords(&cartan.basis.column(i).into_owned())))
        .collect();
    let scale = ops.iter().map(|m| m.norm()).fold(1.0, f64::max);
    let mut last = String::new();
    for _ in 0..ATTEMPTS {
        let mut m = CMatrix::zeros(alg.dim, alg.dim);
        for op in &ops {
            m += op * c64(rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5));
        }
        let Some(cl) = linalg::eigen_clusters(&m, 1e-8) else {
            last = "combination is not diagonalizable".into();
            continue;
        };
        let mut out = Vec::with_capacity(cl.len());
        let mut ok = true;
        for c in cl {
            let w = c.vectors;
            let k = w.ncols() as f64;
            let mut values = Vec::with_capacity(r);
            for op in &ops {
                let aw = op * &w;
                let val = (w.adjoint() * &aw).trace() / k;
                let res = (aw - &w * val).norm();
                if res > 1e-8 * scale * k.sqrt() {
                    ok = false;
                    last = format!("residual {res:.2e}");
                    break;
                }
                values.push(val);
            }
            if !ok {
                break;
            }
            out.push(RawCluster { values, space: w });
        }
        if ok {
            return Ok(out);
        }
    }
    Err(Error::ClusteringAmbiguous(last))
}

/// Restricted roots of `a` on `g^c`, with root spaces split along `σ`.
pub fn restricted_roots(pair: &SymmetricPairData, cartan: &CartanSubspace) -> Result<RestrictedRootSystem> {
    let alg = &pair.algebra;
    let d = alg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let clusters = match cholesky_frame(pair) {
        Some((l, l_inv_t)) => hermitian_clusters(pair, cartan, &l, &l_inv_t, &mut rng)?,
        None => general_clusters(pair, cartan, &mut rng)?,
    };
    let sigma = linalg::complexify(&pair.sigma.matrix);
    let id = CMatrix::identity(d, d);
    let minus = (&id - &sigma) * c64(0.5, 0.0);
    let plus = (&id + &sigma) * c64(0.5, 0.0);
    let gram = alg.gram(&cartan.basis);
    let gram_inv = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::DegenerateSubspace { name: "cartan".into() })?;
    let gram_inv_c = linalg::complexify(&gram_inv);
    let vscale = clusters
        .iter()
        .flat_map(|c| c.values.iter().map(|v| v.norm()))
        .fold(1.0, f64::max);
    let mut roots = Vec::new();
    let mut zero_q = CMatrix::zeros(d, 0);
    let mut zero_h = CMatrix::zeros(d, 0);
    for c in clusters {
        let q_space = linalg::orth(&(&minus * &c.space), 1e-8);
        let h_space = linalg::orth(&(&plus * &c.space), 1e-8);
        if c.values.iter().all(|v| v.norm() <= 1e-8 * vscale) {
            zero_q = q_space;
            zero_h = h_space;
            continue;
        }
        let values: Vec<Complex64> = c
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                // p values are real, f values imaginary; drop rounding noise
                if i < cartan.n_p {
                    c64(v.re, 0.0)
                } else {
                    c64(0.0, v.im)
                }
            })
            .collect();
        let a_alpha = &gram_inv_c * CVector::from_column_slice(&values);
        roots.push(Root {
            mult: c.space.ncols(),
            values,
            g_space: c.space,
            q_space,
            h_space,
            a_alpha,
        });
    }
    roots.sort_by(|a, b| lex_key(&b.values).partial_cmp(&lex_key(&a.values)).unwrap());
    Ok(RestrictedRootSystem {
        cartan: cartan.clone(),
        roots,
        zero_q,
        zero_h,
        cartan_gram: gram,
    })
}

fn lex_key(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|x| x.re).chain(v.iter().map(|x| x.im)).collect()
}

/// `a_α` as complex coordinates in the algebra.
pub fn dual_vector(system: &RestrictedRootSystem, root: &Root) -> CVector {
    linalg::complexify(&system.cartan.basis) * &root.a_alpha
}

/// Normalized pairs `(Z, Y)` in `h_α^c × q_α^c` with `ad(a)Z = α(a)Y`,
/// `ad(a)Y = α(a)Z` and `[Z, Y] = α(a_α) a_α`, one per dimension of `g_α`.
pub fn root_vectors(pair: &SymmetricPairData, system: &RestrictedRootSystem, root: &Root) -> Result<Vec<(CVector, CVector)>> {
    let alg = &pair.algebra;
    let index = system
        .roots
        .iter()
        .position(|r| std::ptr::eq(r, root) || r.values == root.values)
        .unwrap_or(0);
    let sigma = linalg::complexify(&pair.sigma.matrix);
    let form = |x: &CVector, y: &CVector| alg.killing_c(x, &(&sigma * y));
    let mut es: Vec<CVector> = (0..root.g_space.ncols()).map(|j| root.g_space.column(j).into_owned()).collect();
    let scale = es.iter().map(|e| form(e, e).norm()).fold(0.0, f64::max).max(1e-300);
    let mut done: Vec<(CVector, Complex64)> = Vec::new();
    while !es.is_empty() {
        let diag: Vec<f64> = es.iter().map(|e| form(e, e).norm()).collect();
        let (k, &best) = diag
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .expect("non-empty");
        if best <= 1e-10 * scale {
            // isotropic pivots: try a sum of two vectors
            let mut fixed = false;
            'outer: for i in 0..es.len() {
                for j in (i + 1)..es.len() {
                    if form(&es[i], &es[j]).norm() > 1e-8 * scale {
                        let s = &es[i] + &es[j];
                        es[i] = s;
                        fixed = true;
                        break 'outer;
                    }
                }
            }
            if !fixed {
                return Err(Error::NormalizationSingular { root: index });
            }
            continue;
        }
        let e = es.remove(k);
        let s = form(&e, &e);
        for other in es.iter_mut() {
            let f = form(other, &e) / s;
            *other -= &e * f;
        }
        done.push((e, s));
    }
    let alpha_a = root.eval_c(root.a_alpha.as_slice());
    let mut out = Vec::with_capacity(done.len());
    for (e, s) in done {
        let c = (alpha_a / (s * -2.0)).sqrt();
        let se = &sigma * &e;
        out.push(((&e + &se) * c, (&e - &se) * c));
    }
    Ok(out)
}

/// `ad(x)` on complex coordinates for a real Cartan element.
pub fn ad_c(alg: &MatrixLieAlgebra, x: &DVector<f64>) -> CMatrix {
    linalg::complexify(&alg.ad_coords(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{construct_algebra, Family};
    use crate::pairs::build_pair;

    #[test]
    fn sl2_so11_has_one_root_pair() {
        let a = construct_algebra(Family::SlR, &[2]).unwrap();
        let pair = build_pair(&a, "negt[I(1,1)]", None).unwrap();
        let cs = maximal_abelian(&pair, Selector::Q, 1).unwrap();
        assert_eq!(cs.dim(), 1);
        let sys = restricted_roots(&pair, &cs).unwrap();
        assert_eq!(sys.positive().count(), 1);
        let r = sys.positive().next().unwrap();
        assert_eq!(r.mult, 1);
        assert_eq!(sys.q_dim_from_roots(), 2);
    }

    #[test]
    fn sl3_so3_is_a2() {
        let a = construct_algebra(Family::SlR, &[3]).unwrap();
        let pair = build_pair(&a, "theta", None).unwrap();
        let cs = maximal_abelian(&pair, Selector::Q, 7).unwrap();
        assert_eq!(cs.dim(), 2);
        let sys = restricted_roots(&pair, &cs).unwrap();
        assert_eq!(sys.positive().count(), 3);
        assert!(sys.positive().all(|r| r.mult == 1));
        for r in sys.positive() {
            for (z, y) in root_vectors(&pair, &sys, r).unwrap() {
                let br = a.bracket_c(&z, &y);
                let want = dual_vector(&sys, r) * r.eval_c(r.a_alpha.as_slice());
                assert!((br - want).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn rank_examples() {
        let a = construct_algebra(Family::SlR, &[2]).unwrap();
        let pair = build_pair(&a, "negt[I(1,1)]", None).unwrap();
        assert_eq!(rank(&pair, Selector::QF).unwrap(), 1);
        let pair = build_pair(&a, "theta", None).unwrap();
        assert_eq!(rank(&pair, Selector::QF).unwrap(), 0);
    }
}
