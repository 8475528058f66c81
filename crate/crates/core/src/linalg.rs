//! Dense helpers shared by every module: null spaces, ranges, clustering and
//! eigendecomposition of (possibly complex) matrices.

use nalgebra::{ComplexField, DMatrix, DVector, Schur};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn complexify_vec(v: &DVector<f64>) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Full singular value decomposition `m = u diag(s) v^*`, singular values in
/// nonincreasing order. Backed by faer: the nalgebra SVD loses accuracy on
/// rank-deficient matrices with repeated singular values.
pub struct Svd<T> {
    pub u: DMatrix<T>,
    pub s: Vec<f64>,
    pub v: DMatrix<T>,
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for f64 {}
    impl Sealed for num_complex::Complex64 {}
}

/// Scalars the dense helpers accept (`f64` and `Complex64`).
pub trait Scalar: ComplexField<RealField = f64> + faer::traits::ComplexField + sealed::Sealed {
    fn svd(m: &DMatrix<Self>) -> Svd<Self>;
}

fn faer_svd<T>(m: &DMatrix<T>) -> Svd<T>
where
    T: ComplexField<RealField = f64> + faer::traits::ComplexField<Canonical = T, Real = f64>,
{
    let (r, c) = m.shape();
    let fm = faer::Mat::<T>::from_fn(r, c, |i, j| m[(i, j)].clone());
    let svd = faer::linalg::solvers::Svd::new(fm.as_ref()).expect("svd did not converge");
    let u = DMatrix::from_fn(r, r, |i, j| svd.U()[(i, j)].clone());
    let v = DMatrix::from_fn(c, c, |i, j| svd.V()[(i, j)].clone());
    let sd = svd.S().column_vector();
    let s = (0..r.min(c)).map(|i| ComplexField::real(sd[i].clone())).collect();
    Svd { u, s, v }
}

impl Scalar for f64 {
    fn svd(m: &DMatrix<f64>) -> Svd<f64> {
        faer_svd(m)
    }
}

impl Scalar for Complex64 {
    fn svd(m: &DMatrix<Complex64>) -> Svd<Complex64> {
        faer_svd(m)
    }
}

pub fn svd<T: Scalar>(m: &DMatrix<T>) -> Svd<T> {
    T::svd(m)
}

/// Singular values in nonincreasing order.
pub fn singular_values<T: Scalar>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    T::svd(m).s
}

fn null_from_svd<T: Scalar>(m: &DMatrix<T>, keep: impl Fn(f64) -> bool) -> DMatrix<T> {
    let c = m.ncols();
    let d = T::svd(m);
    let cols: Vec<DVector<T>> = (0..c)
        .filter(|&i| keep(d.s.get(i).cloned().unwrap_or(0.0)))
        .map(|i| d.v.column(i).into_owned())
        .collect();
    stack_columns(c, &cols)
}

/// Orthonormal basis (columns) of the null space of `m`; singular values at most
/// `rtol * max(sigma)` count as zero.
pub fn null_space<T: Scalar>(m: &DMatrix<T>, rtol: f64) -> DMatrix<T> {
    let (r, c) = m.shape();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if r == 0 {
        return DMatrix::identity(c, c);
    }
    let smax = singular_values(m).first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return DMatrix::identity(c, c);
    }
    null_from_svd(m, |s| s <= rtol * smax)
}

/// Same as [`null_space`] but with an absolute threshold.
pub fn null_space_abs<T: Scalar>(m: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let (r, c) = m.shape();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if r == 0 {
        return DMatrix::identity(c, c);
    }
    null_from_svd(m, |s| s <= tol)
}

/// Orthonormal basis of the column space of `m`.
pub fn orth<T: Scalar>(m: &DMatrix<T>, rtol: f64) -> DMatrix<T> {
    let (r, c) = m.shape();
    if c == 0 || r == 0 {
        return DMatrix::zeros(r, 0);
    }
    let d = T::svd(m);
    let smax = d.s.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return DMatrix::zeros(r, 0);
    }
    let cols: Vec<DVector<T>> = (0..d.s.len())
        .filter(|&i| d.s[i] > rtol * smax)
        .map(|i| d.u.column(i).into_owned())
        .collect();
    stack_columns(r, &cols)
}

/// Numerical rank with relative threshold.
pub fn rank<T: Scalar>(m: &DMatrix<T>, rtol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = singular_values(m);
    let smax = sv.first().cloned().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > rtol * smax && smax > 0.0).count()
}

pub fn stack_columns<T: Scalar>(rows: usize, cols: &[DVector<T>]) -> DMatrix<T> {
    let mut out = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

pub fn hstack<T: Scalar>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let rows = blocks.iter().map(|b| b.nrows()).max().unwrap_or(0);
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        if b.ncols() > 0 {
            out.view_mut((0, at), (b.nrows(), b.ncols())).copy_from(b);
        }
        at += b.ncols();
    }
    out
}

pub fn vstack<T: Scalar>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let cols = blocks.iter().map(|b| b.ncols()).max().unwrap_or(0);
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        if b.nrows() > 0 {
            out.view_mut((at, 0), (b.nrows(), b.ncols())).copy_from(b);
        }
        at += b.nrows();
    }
    out
}

/// Intersection of two column spans (both given by orthonormal bases).
pub fn intersect<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>, rtol: f64) -> DMatrix<T> {
    if a.ncols() == 0 || b.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let m = hstack(&[a, &(-b)]);
    let k = null_space(&m, rtol);
    if k.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let part = k.rows(0, a.ncols()).into_owned();
    orth(&(a * part), rtol)
}

/// Single-linkage clustering of complex numbers; clusters are returned in
/// order of their first member.
pub fn cluster(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let nx = p[j];
            p[j] = r;
            j = nx;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut root_index: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_index[r] {
            Some(k) => out[k].push(i),
            None => {
                root_index[r] = Some(out.len());
                out.push(vec![i]);
            }
        }
    }
    out
}

/// Eigenvalues of a complex matrix from its Schur form. Returns `None` when the
/// QR iteration does not converge.
pub fn eigenvalues(m: &CMatrix) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Some(vec![]);
    }
    if n == 1 {
        return Some(vec![m[(0, 0)]]);
    }
    let schur = Schur::try_new(m.clone(), 1e-15, 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

pub fn eigenvalues_real(m: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    eigenvalues(&complexify(m))
}

/// One eigenvalue cluster with an orthonormal basis of its eigenspace.
#[derive(Debug, Clone)]
pub struct EigenCluster {
    pub value: Complex64,
    pub vectors: CMatrix,
}

/// Eigenspace decomposition of a diagonalizable matrix. Eigenvalues within
/// `ctol * max(1, |spectrum|)` are merged; each eigenspace is the null space of
/// `m - value`. Returns `None` when the eigenspaces do not fill the space
/// (non-semisimple input) or the eigensolver fails.
pub fn eigen_clusters(m: &CMatrix, ctol: f64) -> Option<Vec<EigenCluster>> {
    let n = m.nrows();
    if n == 0 {
        return Some(vec![]);
    }
    let vals = eigenvalues(m)?;
    let scale = vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let groups = cluster(&vals, ctol * scale);
    let mut out = Vec::with_capacity(groups.len());
    let mut total = 0;
    let mnorm = m.norm().max(1.0);
    for g in groups {
        let mean = g.iter().map(|&i| vals[i]).sum::<Complex64>() / g.len() as f64;
        let shifted = m - CMatrix::identity(n, n) * mean;
        let mut ns = null_space_abs(&shifted, 1e-7 * mnorm);
        if ns.ncols() > g.len() {
            ns = null_space_abs(&shifted, 1e-10 * mnorm);
        }
        if ns.ncols() != g.len() {
            return None;
        }
        total += ns.ncols();
        out.push(EigenCluster {
            value: mean,
            vectors: ns,
        });
    }
    if total != n {
        return None;
    }
    Some(out)
}

/// Applies a scalar function through an eigen decomposition:
/// returns `P diag(f(lambda)) P^{-1}`.
pub fn matrix_function(clusters: &[EigenCluster], f: impl Fn(Complex64) -> Complex64) -> Option<CMatrix> {
    let n: usize = clusters.iter().map(|c| c.vectors.ncols()).sum();
    if n == 0 {
        return Some(CMatrix::zeros(0, 0));
    }
    let rows = clusters[0].vectors.nrows();
    let mut p = CMatrix::zeros(rows, n);
    let mut d = Vec::with_capacity(n);
    let mut at = 0;
    for c in clusters {
        p.view_mut((0, at), (rows, c.vectors.ncols())).copy_from(&c.vectors);
        let fv = f(c.value);
        for _ in 0..c.vectors.ncols() {
            d.push(fv);
        }
        at += c.vectors.ncols();
    }
    let pinv = p.clone().try_inverse()?;
    let mut pd = p;
    for (j, fv) in d.iter().enumerate() {
        let mut col = pd.column_mut(j);
        col *= *fv;
    }
    Some(pd * pinv)
}

/// Greedy matching of two multisets of complex numbers; returns the largest
/// pairwise distance (relative to `max(1, |a|)`) or `None` if lengths differ.
pub fn match_multisets(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a[j].norm().partial_cmp(&a[i].norm()).unwrap());
    for i in order {
        let mut best = None;
        let mut bd = f64::INFINITY;
        for (j, bj) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (a[i] - bj).norm();
            if d < bd {
                bd = d;
                best = Some(j);
            }
        }
        let j = best?;
        used[j] = true;
        worst = worst.max(bd / a[i].norm().max(1.0));
    }
    Some(worst)
}

/// Orthonormal basis of the span of `k` columns of `m`, chosen greedily by
/// largest residual norm (pivoted modified Gram-Schmidt).
pub fn pivoted_basis(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut work = m.clone();
    let mut out = DMatrix::zeros(r, k);
    let mut used = vec![false; c];
    for step in 0..k {
        let mut best = None;
        let mut bn = 0.0;
        for j in 0..c {
            if used[j] {
                continue;
            }
            let n = work.column(j).norm();
            if n > bn {
                bn = n;
                best = Some(j);
            }
        }
        let Some(j) = best else { break };
        used[j] = true;
        let v = work.column(j) / bn;
        // re-orthogonalize against earlier picks to keep the basis tight
        let mut v = v.into_owned();
        for i in 0..step {
            let d = out.column(i).dot(&v);
            v.axpy(-d, &out.column(i).into_owned(), 1.0);
        }
        let vn = v.norm();
        v /= vn;
        out.set_column(step, &v);
        for jj in 0..c {
            if !used[jj] {
                let d = v.dot(&work.column(jj));
                let mut col = work.column_mut(jj);
                col.axpy(-d, &v, 1.0);
            }
        }
    }
    out
}

/// Splits the span of the orthonormal columns of `basis` into the `+1` and
/// `-1` eigenspaces of an involution `op` that preserves the span.
pub fn split_by_involution(basis: &DMatrix<f64>, op: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let r = basis.ncols();
    if r == 0 {
        return (basis.clone(), basis.clone());
    }
    let m = basis.transpose() * (op * basis);
    let id = DMatrix::<f64>::identity(r, r);
    let plus = (&id + &m) * 0.5;
    let minus = (&id - &m) * 0.5;
    let kp = plus.trace().round().max(0.0) as usize;
    let km = r.saturating_sub(kp);
    (basis * pivoted_basis(&plus, kp), basis * pivoted_basis(&minus, km))
}

/// Null space of `m` (real) through the eigen decomposition of `m^T m`;
/// singular values below `rtol * max` count as zero. Much cheaper than a full
/// SVD for tall matrices.
pub fn null_space_gram(m: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let c = m.ncols();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    let g = m.transpose() * m;
    let eig = nalgebra::SymmetricEigen::new(g);
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if top <= 0.0 {
        return DMatrix::identity(c, c);
    }
    let thr = rtol * rtol * top;
    let cols: Vec<DVector<f64>> = (0..c)
        .filter(|&i| eig.eigenvalues[i] <= thr)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    stack_columns(c, &cols)
}

/// Least-squares coefficients of `v` in the column span of `basis`.
pub fn solve_ls<T: Scalar>(basis: &DMatrix<T>, v: &DVector<T>) -> DVector<T> {
    if basis.ncols() == 0 {
        return DVector::zeros(0);
    }
    let d = T::svd(basis);
    let smax = d.s.first().cloned().unwrap_or(0.0);
    let mut out = DVector::zeros(basis.ncols());
    for (i, &s) in d.s.iter().enumerate() {
        if s > 1e-12 * smax {
            let coef = d.u.column(i).dotc(v) / T::from_real(s);
            out += d.v.column(i) * coef;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let n = null_space(&m, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).norm() < 1e-12);
    }

    #[test]
    fn clusters_merge_close_values() {
        let v = [c64(1.0, 0.0), c64(2.0, 0.0), c64(1.0 + 1e-12, 0.0)];
        let cl = cluster(&v, 1e-9);
        assert_eq!(cl, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn jordan_block_is_not_semisimple() {
        let m = complexify(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        assert!(eigen_clusters(&m, 1e-8).is_none());
    }

    #[test]
    fn split_recovers_eigenspaces() {
        let op = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0, 1.0]));
        let (p, m) = split_by_involution(&DMatrix::identity(3, 3), &op);
        assert_eq!((p.ncols(), m.ncols()), (2, 1));
        assert!((&op * &p - &p).norm() < 1e-14);
        assert!((&op * &m + &m).norm() < 1e-14);
    }

    #[test]
    fn rotation_has_imaginary_spectrum() {
        let m = complexify(&DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]));
        let cl = eigen_clusters(&m, 1e-8).unwrap();
        assert_eq!(cl.len(), 2);
        let f = matrix_function(&cl, |z| z * z).unwrap();
        let sq = &m * &m;
        assert!((f - sq).norm() < 1e-12);
    }
}
