//! Matrix realizations of the classical real Lie algebras.
//!
//! Complex entries are stored in real-doubled form: `a + bi` becomes the
//! block `[[a, -b], [b, a]]`, so every algebra lives in `gl(N, R)`. The algebra
//! is the solution space of a family of sparse linear constraints on the
//! ambient entries; the basis is read off a reduced row echelon form, which
//! makes the coordinates of `X` equal to its entries at the free positions.

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    #[serde(rename = "sl_n_R")]
    SlR,
    #[serde(rename = "su_p_q")]
    SuPq,
    #[serde(rename = "su_star_2n")]
    SuStar,
    #[serde(rename = "so_p_q")]
    SoPq,
    #[serde(rename = "so_star_2n")]
    SoStar,
    #[serde(rename = "sp_n_R")]
    SpR,
    #[serde(rename = "sp_p_q")]
    SpPq,
    #[serde(rename = "sl_n_C_as_real")]
    SlC,
    #[serde(rename = "so_n_C_as_real")]
    SoC,
    #[serde(rename = "sp_n_C_as_real")]
    SpC,
}

impl Family {
    pub fn is_complex(self) -> bool {
        matches!(self, Family::SlC | Family::SoC | Family::SpC)
    }

    /// True when the ambient matrices are real-doubled complex matrices.
    pub fn is_doubled(self) -> bool {
        !matches!(self, Family::SlR | Family::SoPq | Family::SpR)
    }
}

/// A family tag with its integer parameters. `SuStar` and `SoStar` carry `n`
/// for `su*(2n)` / `so*(2n)`; the two-parameter families carry `(p, q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AlgebraDescriptor {
    pub family: Family,
    pub params: Vec<usize>,
}

impl AlgebraDescriptor {
    pub fn new(family: Family, params: &[usize]) -> Self {
        AlgebraDescriptor {
            family,
            params: params.to_vec(),
        }
    }

    /// Size of the complex (or real) defining representation.
    pub fn defining_size(&self) -> usize {
        let p = &self.params;
        match self.family {
            Family::SlR | Family::SpR | Family::SlC | Family::SoC | Family::SpC => {
                if matches!(self.family, Family::SpR | Family::SpC) {
                    2 * p[0]
                } else {
                    p[0]
                }
            }
            Family::SuPq | Family::SoPq => p[0] + p[1],
            Family::SpPq => 2 * (p[0] + p[1]),
            Family::SuStar | Family::SoStar => 2 * p[0],
        }
    }

    pub fn ambient_size(&self) -> usize {
        let n = self.defining_size();
        if self.family.is_doubled() {
            2 * n
        } else {
            n
        }
    }

    /// Closed-form real dimension.
    pub fn expected_dim(&self) -> usize {
        let p = &self.params;
        match self.family {
            Family::SlR => p[0] * p[0] - 1,
            Family::SuPq => {
                let n = p[0] + p[1];
                n * n - 1
            }
            Family::SuStar => 4 * p[0] * p[0] - 1,
            Family::SoPq => {
                let n = p[0] + p[1];
                n * (n - 1) / 2
            }
            Family::SoStar => p[0] * (2 * p[0] - 1),
            Family::SpR => p[0] * (2 * p[0] + 1),
            Family::SpPq => {
                let n = p[0] + p[1];
                n * (2 * n + 1)
            }
            Family::SlC => 2 * (p[0] * p[0] - 1),
            Family::SoC => p[0] * (p[0] - 1),
            Family::SpC => 2 * p[0] * (2 * p[0] + 1),
        }
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        let want = match self.family {
            Family::SuPq | Family::SoPq | Family::SpPq => 2,
            _ => 1,
        };
        if p.len() != want {
            return Err(Error::InvalidParams(format!("{self} expects {want} parameter(s)")));
        }
        let ok = match self.family {
            Family::SlR | Family::SlC => p[0] >= 2,
            Family::SuPq => p[0] + p[1] >= 2,
            Family::SoPq => p[0] + p[1] >= 3,
            Family::SpPq => p[0] + p[1] >= 1,
            Family::SuStar | Family::SpR | Family::SpC => p[0] >= 1,
            Family::SoStar => p[0] >= 2,
            Family::SoC => p[0] >= 3,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("{self} is not semisimple or is empty")))
        }
    }

    /// Parses descriptors such as `sl(3,R)`, `su(1,2)`, `su*(4)`, `so*(6)`,
    /// `sp(2,C)`. Case-insensitive; whitespace is ignored; `so0` is accepted
    /// for `so`; a single argument for `su`, `so`, `sp` means the compact form.
    pub fn parse(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let open = t.find('(').ok_or_else(|| Error::InvalidParams(format!("cannot parse '{s}'")))?;
        if !t.ends_with(')') {
            return Err(Error::InvalidParams(format!("cannot parse '{s}'")));
        }
        let name = t[..open].replace('_', "");
        let name = name.trim_end_matches('0');
        let args: Vec<&str> = t[open + 1..t.len() - 1].split(',').collect();
        let num = |a: &str| -> Result<usize> {
            a.parse::<usize>()
                .map_err(|_| Error::InvalidParams(format!("bad integer '{a}' in '{s}'")))
        };
        let field = args.get(1).copied();
        let d = match (name, args.len(), field) {
            ("sl", 2, Some("r")) => AlgebraDescriptor::new(Family::SlR, &[num(args[0])?]),
            ("sl", 2, Some("c")) => AlgebraDescriptor::new(Family::SlC, &[num(args[0])?]),
            ("so", 2, Some("c")) => AlgebraDescriptor::new(Family::SoC, &[num(args[0])?]),
            ("sp", 2, Some("r")) => AlgebraDescriptor::new(Family::SpR, &[num(args[0])?]),
            ("sp", 2, Some("c")) => AlgebraDescriptor::new(Family::SpC, &[num(args[0])?]),
            ("su", 2, _) => AlgebraDescriptor::new(Family::SuPq, &[num(args[0])?, num(args[1])?]),
            ("so", 2, _) => AlgebraDescriptor::new(Family::SoPq, &[num(args[0])?, num(args[1])?]),
            ("sp", 2, _) => AlgebraDescriptor::new(Family::SpPq, &[num(args[0])?, num(args[1])?]),
            ("su", 1, _) => AlgebraDescriptor::new(Family::SuPq, &[num(args[0])?, 0]),
            ("so", 1, _) => AlgebraDescriptor::new(Family::SoPq, &[num(args[0])?, 0]),
            ("sp", 1, _) => AlgebraDescriptor::new(Family::SpPq, &[num(args[0])?, 0]),
            ("su*", 1, _) | ("so*", 1, _) => {
                let m = num(args[0])?;
                if m % 2 != 0 {
                    return Err(Error::InvalidParams(format!("'{s}' needs an even size")));
                }
                let fam = if name == "su*" { Family::SuStar } else { Family::SoStar };
                AlgebraDescriptor::new(fam, &[m / 2])
            }
            ("e6" | "e7" | "e8" | "f4" | "g2", _, _) => {
                return Err(Error::UnsupportedFamily(s.to_string()))
            }
            _ if name.starts_with('e') || name.starts_with('f') || name.starts_with('g') => {
                return Err(Error::UnsupportedFamily(s.to_string()))
            }
            _ => return Err(Error::InvalidParams(format!("cannot parse '{s}'"))),
        };
        Ok(d)
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        match self.family {
            Family::SlR => write!(f, "sl({},R)", p[0]),
            Family::SuPq => write!(f, "su({},{})", p[0], p[1]),
            Family::SuStar => write!(f, "su*({})", 2 * p[0]),
            Family::SoPq => write!(f, "so({},{})", p[0], p[1]),
            Family::SoStar => write!(f, "so*({})", 2 * p[0]),
            Family::SpR => write!(f, "sp({},R)", p[0]),
            Family::SpPq => write!(f, "sp({},{})", p[0], p[1]),
            Family::SlC => write!(f, "sl({},C)", p[0]),
            Family::SoC => write!(f, "so({},C)", p[0]),
            Family::SpC => write!(f, "sp({},C)", p[0]),
        }
    }
}

// ---------------------------------------------------------------------------
// Standard ambient matrices.

/// `diag(1,..,1,-1,..,-1)` with `p` plus signs.
pub fn signature(p: usize, q: usize) -> DMatrix<f64> {
    let mut d = vec![1.0; p];
    d.extend(vec![-1.0; q]);
    DMatrix::from_diagonal(&DVector::from_vec(d))
}

/// `[[0, I], [-I, 0]]` of size `2n`.
pub fn symplectic(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// `[[0, I], [I, 0]]` of size `2n`.
pub fn swap(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// Real doubling of a real matrix: each entry `a` becomes `a * I_2`.
pub fn double(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.kronecker(&DMatrix::identity(2, 2))
}

/// Real doubling of `i * m` for real `m`.
pub fn double_imag(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.kronecker(&DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]))
}

/// Complex conjugation in doubled form (`n` complex dimensions).
pub fn conjugation(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n).kronecker(&DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]))
}

/// Multiplication by `i` in doubled form.
pub fn complex_unit(n: usize) -> DMatrix<f64> {
    double_imag(&DMatrix::identity(n, n))
}

pub fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

// ---------------------------------------------------------------------------
// Sparse constraint system.

/// Signed permutation matrix: row `i` has entry `sign[i]` in column `col[i]`.
#[derive(Debug, Clone)]
struct Mono {
    col: Vec<usize>,
    sign: Vec<f64>,
    inv: Vec<usize>,
}

impl Mono {
    fn from_dense(m: &DMatrix<f64>) -> Mono {
        let n = m.nrows();
        let mut col = vec![0; n];
        let mut sign = vec![0.0; n];
        for i in 0..n {
            let mut found = false;
            for j in 0..n {
                if m[(i, j)] != 0.0 {
                    assert!(!found, "not a monomial matrix");
                    found = true;
                    col[i] = j;
                    sign[i] = m[(i, j)];
                }
            }
            assert!(found, "singular monomial matrix");
        }
        let mut inv = vec![0; n];
        for i in 0..n {
            inv[col[i]] = i;
        }
        Mono { col, sign, inv }
    }
}

/// One summand `coef * A * op(X) * B` of a linear constraint on `X`.
struct Term {
    coef: f64,
    a: Mono,
    transpose: bool,
    b: Mono,
}

enum Constraint {
    /// Sum of terms vanishes entrywise.
    Entrywise(Vec<Term>),
    /// `sum w * X[r, c] = 0`.
    Linear(Vec<(usize, usize, f64)>),
}

fn term(coef: f64, a: &DMatrix<f64>, transpose: bool, b: &DMatrix<f64>) -> Term {
    Term {
        coef,
        a: Mono::from_dense(a),
        transpose,
        b: Mono::from_dense(b),
    }
}

fn equations(n: usize, cons: &[Constraint]) -> Vec<Vec<(usize, f64)>> {
    let mut eqs = Vec::new();
    for c in cons {
        match c {
            Constraint::Entrywise(terms) => {
                for i in 0..n {
                    for j in 0..n {
                        let mut row: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
                        for t in terms {
                            // (A op(X) B)[i,j] = a_i * op(X)[col_a(i), inv_b(j)] * b_{inv_b(j)}
                            let r = t.a.col[i];
                            let k = t.b.inv[j];
                            let w = t.coef * t.a.sign[i] * t.b.sign[k];
                            let (rr, cc) = if t.transpose { (k, r) } else { (r, k) };
                            row.push((rr * n + cc, w));
                        }
                        push_equation(&mut eqs, row);
                    }
                }
            }
            Constraint::Linear(entries) => {
                let row = entries.iter().map(|&(r, c, w)| (r * n + c, w)).collect();
                push_equation(&mut eqs, row);
            }
        }
    }
    eqs
}

fn push_equation(eqs: &mut Vec<Vec<(usize, f64)>>, mut row: Vec<(usize, f64)>) {
    row.sort_by_key(|e| e.0);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
    for (u, w) in row {
        if let Some(last) = merged.last_mut() {
            if last.0 == u {
                last.1 += w;
                continue;
            }
        }
        merged.push((u, w));
    }
    merged.retain(|e| e.1.abs() > 1e-14);
    if !merged.is_empty() {
        eqs.push(merged);
    }
}

/// Basis of the solution space as sparse ambient matrices, sorted by free
/// position, plus the free positions themselves.
fn solve_constraints(n: usize, cons: &[Constraint]) -> (Vec<Vec<(usize, usize, f64)>>, Vec<usize>) {
    let nu = n * n;
    let eqs = equations(n, cons);
    let mut parent: Vec<usize> = (0..nu).collect();
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
    for e in &eqs {
        let a = find(&mut parent, e[0].0);
        for &(u, _) in &e[1..] {
            let b = find(&mut parent, u);
            if a != b {
                parent[b] = a;
            }
        }
    }
    let mut comp_of = vec![usize::MAX; nu];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for u in 0..nu {
        let r = find(&mut parent, u);
        if comp_of[r] == usize::MAX {
            comp_of[r] = comps.len();
            comps.push(Vec::new());
        }
        let c = comp_of[r];
        comp_of[u] = c;
        comps[c].push(u);
    }
    let mut comp_eqs: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    for (k, e) in eqs.iter().enumerate() {
        comp_eqs[comp_of[e[0].0]].push(k);
    }
    let mut basis: Vec<(usize, Vec<(usize, usize, f64)>)> = Vec::new();
    for (ci, unk) in comps.iter().enumerate() {
        let local = |u: usize| unk.binary_search(&u).unwrap();
        let m = unk.len();
        let rows = comp_eqs[ci].len();
        let mut a = vec![vec![0.0f64; m]; rows];
        for (ri, &k) in comp_eqs[ci].iter().enumerate() {
            for &(u, w) in &eqs[k] {
                a[ri][local(u)] += w;
            }
        }
        let pivots = rref(&mut a, m);
        let pivot_row: Vec<Option<usize>> = {
            let mut pr = vec![None; m];
            for (r, &c) in pivots.iter().enumerate() {
                pr[c] = Some(r);
            }
            pr
        };
        for f in 0..m {
            if pivot_row[f].is_some() {
                continue;
            }
            let mut entries = vec![(unk[f] / n, unk[f] % n, 1.0)];
            for (c, pr) in pivot_row.iter().enumerate() {
                if let Some(r) = pr {
                    let v = -a[*r][f];
                    if v.abs() > 1e-13 {
                        entries.push((unk[c] / n, unk[c] % n, snap(v)));
                    }
                }
            }
            entries.sort_by_key(|e| (e.0, e.1));
            basis.push((unk[f], entries));
        }
    }
    basis.sort_by_key(|b| b.0);
    let free = basis.iter().map(|b| b.0).collect();
    (basis.into_iter().map(|b| b.1).collect(), free)
}

/// Rounds values that are within roundoff of a simple fraction.
fn snap(v: f64) -> f64 {
    for den in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0] {
        let x = v * den;
        if (x - x.round()).abs() < 1e-11 {
            return x.round() / den;
        }
    }
    v
}

/// In-place reduced row echelon form; returns pivot columns in row order.
fn rref(a: &mut Vec<Vec<f64>>, m: usize) -> Vec<usize> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        if r >= rows {
            break;
        }
        let (mut best, mut bv) = (r, a[r][c].abs());
        for i in (r + 1)..rows {
            if a[i][c].abs() > bv {
                best = i;
                bv = a[i][c].abs();
            }
        }
        if bv < 1e-10 {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c];
        for x in a[r].iter_mut() {
            *x /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = a[i][c];
                if f != 0.0 {
                    for j in 0..m {
                        a[i][j] -= f * a[r][j];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    pivots
}

fn constraints(desc: &AlgebraDescriptor) -> Vec<Constraint> {
    let p = &desc.params;
    let nn = desc.ambient_size();
    let id = DMatrix::<f64>::identity(nn, nn);
    let mut cons = Vec::new();
    if desc.family.is_doubled() {
        // commutes with multiplication by i
        let j = complex_unit(nn / 2);
        cons.push(Constraint::Entrywise(vec![term(1.0, &j, false, &id), term(-1.0, &id, false, &j)]));
    }
    let real_trace = |cons: &mut Vec<Constraint>| {
        cons.push(Constraint::Linear((0..nn).map(|i| (i, i, 1.0)).collect()));
    };
    let complex_trace = |cons: &mut Vec<Constraint>| {
        let n = nn / 2;
        cons.push(Constraint::Linear((0..n).map(|k| (2 * k, 2 * k, 1.0)).collect()));
        cons.push(Constraint::Linear((0..n).map(|k| (2 * k + 1, 2 * k, 1.0)).collect()));
    };
    // X^T F + F X = 0 with F a signed permutation
    let preserve = |cons: &mut Vec<Constraint>, f: &DMatrix<f64>| {
        cons.push(Constraint::Entrywise(vec![term(1.0, &id, true, f), term(1.0, f, false, &id)]));
    };
    // complex transpose K X^T K, composed with F
    let preserve_complex = |cons: &mut Vec<Constraint>, f: &DMatrix<f64>| {
        let k = conjugation(nn / 2);
        cons.push(Constraint::Entrywise(vec![term(1.0, &k, true, &(&k * f)), term(1.0, f, false, &id)]));
    };
    match desc.family {
        Family::SlR => real_trace(&mut cons),
        Family::SoPq => preserve(&mut cons, &signature(p[0], p[1])),
        Family::SpR => preserve(&mut cons, &symplectic(p[0])),
        Family::SuPq => {
            preserve(&mut cons, &double(&signature(p[0], p[1])));
            complex_trace(&mut cons);
        }
        Family::SuStar => {
            // X J = J conj(X)
            let j = double(&symplectic(p[0]));
            let k = conjugation(nn / 2);
            cons.push(Constraint::Entrywise(vec![term(1.0, &id, false, &j), term(-1.0, &(&j * &k), false, &k)]));
            complex_trace(&mut cons);
        }
        Family::SoStar => {
            preserve_complex(&mut cons, &id);
            preserve(&mut cons, &double(&symplectic(p[0])));
        }
        Family::SpPq => {
            let n = p[0] + p[1];
            preserve_complex(&mut cons, &double(&symplectic(n)));
            let s = signature(p[0], p[1]);
            preserve(&mut cons, &double(&block_diag(&s, &s)));
        }
        Family::SlC => complex_trace(&mut cons),
        Family::SoC => preserve_complex(&mut cons, &id),
        Family::SpC => preserve_complex(&mut cons, &double(&symplectic(p[0]))),
    }
    cons
}

// ---------------------------------------------------------------------------

/// A real Lie algebra realized by sparse basis matrices in `gl(N, R)`.
pub struct MatrixLieAlgebra {
    pub descriptor: AlgebraDescriptor,
    pub ambient_size: usize,
    pub dim: usize,
    basis: Vec<Vec<(usize, usize, f64)>>,
    free: Vec<usize>,
    complex_structure: Option<DMatrix<f64>>,
    ad_basis: OnceLock<Vec<DMatrix<f64>>>,
    killing: OnceLock<DMatrix<f64>>,
    ratio: OnceLock<f64>,
}

impl fmt::Debug for MatrixLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixLieAlgebra({}, dim {})", self.descriptor, self.dim)
    }
}

/// Builds the realization of a classical family.
pub fn construct_algebra(family: Family, params: &[usize]) -> Result<Arc<MatrixLieAlgebra>> {
    MatrixLieAlgebra::new(AlgebraDescriptor::new(family, params))
}

impl MatrixLieAlgebra {
    pub fn new(descriptor: AlgebraDescriptor) -> Result<Arc<MatrixLieAlgebra>> {
        descriptor.validate()?;
        let n = descriptor.ambient_size();
        let (basis, free) = solve_constraints(n, &constraints(&descriptor));
        let dim = basis.len();
        if dim != descriptor.expected_dim() {
            return Err(Error::InvalidParams(format!(
                "{descriptor}: realization has dim {dim}, expected {}",
                descriptor.expected_dim()
            )));
        }
        let mut alg = MatrixLieAlgebra {
            descriptor,
            ambient_size: n,
            dim,
            basis,
            free,
            complex_structure: None,
            ad_basis: OnceLock::new(),
            killing: OnceLock::new(),
            ratio: OnceLock::new(),
        };
        if alg.descriptor.family.is_complex() {
            let j = complex_unit(n / 2);
            let mut m = DMatrix::zeros(dim, dim);
            for k in 0..dim {
                let bk = alg.basis_matrix(k);
                m.set_column(k, &alg.coords(&(&j * bk)));
            }
            alg.complex_structure = Some(m);
        }
        Ok(Arc::new(alg))
    }

    pub fn parse(s: &str) -> Result<Arc<MatrixLieAlgebra>> {
        MatrixLieAlgebra::new(AlgebraDescriptor::parse(s)?)
    }

    /// Dense ambient matrix of basis element `k`.
    pub fn basis_matrix(&self, k: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.ambient_size, self.ambient_size);
        for &(r, c, v) in &self.basis[k] {
            m[(r, c)] = v;
        }
        m
    }

    /// Sparse entries `(row, col, value)` of basis element `k`.
    pub fn basis_entries(&self, k: usize) -> &[(usize, usize, f64)] {
        &self.basis[k]
    }

    /// Ambient positions (row-major index) whose entries are the coordinates.
    pub fn free_positions(&self) -> &[usize] {
        &self.free
    }

    /// Ambient matrix with the given coordinates.
    pub fn matrix(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.ambient_size, self.ambient_size);
        for (k, &x) in coords.iter().enumerate() {
            if x != 0.0 {
                for &(r, c, v) in &self.basis[k] {
                    m[(r, c)] += x * v;
                }
            }
        }
        m
    }

    /// Coordinates of an ambient matrix assumed to lie in the algebra.
    pub fn coords(&self, m: &DMatrix<f64>) -> DVector<f64> {
        let n = self.ambient_size;
        DVector::from_iterator(self.dim, self.free.iter().map(|&u| m[(u / n, u % n)]))
    }

    /// Distance of an ambient matrix from the algebra.
    pub fn membership_residual(&self, m: &DMatrix<f64>) -> f64 {
        (self.matrix(&self.coords(m)) - m).norm()
    }

    /// Coordinates of `[x, y]` via the matrix commutator.
    pub fn bracket_coords(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let a = self.matrix(x);
        let b = self.matrix(y);
        self.coords(&(&a * &b - &b * &a))
    }

    /// `ad(x)` as a `dim x dim` matrix, column `k` holding `[x, b_k]`.
    pub fn ad_coords(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.ad_of_matrix(&self.matrix(x))
    }

    /// `ad` of an ambient matrix of the algebra, exploiting sparse basis elements.
    pub fn ad_of_matrix(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.ambient_size;
        let mut out = DMatrix::zeros(self.dim, self.dim);
        let mut scratch = DMatrix::<f64>::zeros(n, n);
        for k in 0..self.dim {
            scratch.fill(0.0);
            for &(r, c, v) in &self.basis[k] {
                // x * b: column c gains v * x[:, r]; b * x: row r loses v * x[c, :]
                for i in 0..n {
                    scratch[(i, c)] += v * x[(i, r)];
                    scratch[(r, i)] -= v * x[(c, i)];
                }
            }
            for (row, &u) in self.free.iter().enumerate() {
                out[(row, k)] = scratch[(u / n, u % n)];
            }
        }
        out
    }

    /// Operator of multiplication by `i` on coordinates (complex families only).
    pub fn complex_structure(&self) -> Option<&DMatrix<f64>> {
        self.complex_structure.as_ref()
    }

    /// `ad(b_i)` for every basis element (computed once).
    pub fn ad_basis(&self) -> &[DMatrix<f64>] {
        self.ad_basis.get_or_init(|| {
            (0..self.dim)
                .map(|i| self.ad_of_matrix(&self.basis_matrix(i)))
                .collect()
        })
    }

    /// Structure constant `c[i][j][k]` with `[b_i, b_j] = sum_k c[i][j][k] b_k`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.ad_basis()[i][(k, j)]
    }

    /// Killing matrix `B(b_i, b_j) = tr(ad b_i ad b_j)` from the structure constants.
    pub fn killing_matrix(&self) -> &DMatrix<f64> {
        self.killing.get_or_init(|| {
            let ads = self.ad_basis();
            let d = self.dim;
            let mut b = DMatrix::zeros(d, d);
            for i in 0..d {
                for j in i..d {
                    let mut s = 0.0;
                    let (ai, aj) = (&ads[i], &ads[j]);
                    for k in 0..d {
                        for l in 0..d {
                            s += ai[(k, l)] * aj[(l, k)];
                        }
                    }
                    b[(i, j)] = s;
                    b[(j, i)] = s;
                }
            }
            b
        })
    }

    /// `B(x, y)` for coordinate vectors.
    pub fn killing(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * self.killing_matrix() * y)[(0, 0)]
    }

    /// `tr(ad x ad y)` computed directly from adjoint matrices.
    pub fn killing_direct(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.ad_coords(x).component_mul(&self.ad_coords(y).transpose()).sum()
    }

    /// The constant `c` with `B(X, Y) = c tr(XY)`, measured once from the
    /// adjoint representation on a symmetric element of the algebra.
    pub fn killing_ratio(&self) -> f64 {
        *self.ratio.get_or_init(|| {
            for k in 0..self.dim {
                let b = self.basis_matrix(k);
                let x = &b + b.transpose();
                let t = self.trace_form(&x, &x);
                if t > 0.5 && self.membership_residual(&x) < 1e-10 {
                    let ad = self.ad_of_matrix(&x);
                    return ad.component_mul(&ad.transpose()).sum() / t;
                }
            }
            let x = self.basis_matrix(0);
            let ad = self.ad_of_matrix(&x);
            ad.component_mul(&ad.transpose()).sum() / self.trace_form(&x, &x)
        })
    }

    /// Killing form through the measured trace-form ratio; agrees with
    /// [`MatrixLieAlgebra::killing`] and avoids the structure constants.
    pub fn killing_fast(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.killing_ratio() * self.trace_form(&self.matrix(x), &self.matrix(y))
    }

    /// Killing Gram matrix of the columns of `basis` (coordinate vectors).
    pub fn gram(&self, basis: &DMatrix<f64>) -> DMatrix<f64> {
        let k = basis.ncols();
        let n = self.ambient_size;
        let mut v = DMatrix::zeros(n * n, k);
        let mut w = DMatrix::zeros(n * n, k);
        for j in 0..k {
            let m = self.matrix(&basis.column(j).into_owned());
            for r in 0..n {
                for c in 0..n {
                    v[(r * n + c, j)] = m[(r, c)];
                    w[(c * n + r, j)] = m[(r, c)];
                }
            }
        }
        (v.transpose() * w) * self.killing_ratio()
    }

    /// Ambient matrix of a complex coordinate vector.
    pub fn matrix_c(&self, coords: &CVector) -> CMatrix {
        let mut m = CMatrix::zeros(self.ambient_size, self.ambient_size);
        for (k, &x) in coords.iter().enumerate() {
            if x != Complex64::new(0.0, 0.0) {
                for &(r, c, v) in &self.basis[k] {
                    m[(r, c)] += x * v;
                }
            }
        }
        m
    }

    pub fn coords_c(&self, m: &CMatrix) -> CVector {
        let n = self.ambient_size;
        CVector::from_iterator(self.dim, self.free.iter().map(|&u| m[(u / n, u % n)]))
    }

    /// Complex bilinear extension of the Killing form.
    pub fn killing_c(&self, x: &CVector, y: &CVector) -> Complex64 {
        let a = self.matrix_c(x);
        let b = self.matrix_c(y);
        a.component_mul(&b.transpose()).sum() * self.killing_ratio()
    }

    /// `[x, y]` for complex coordinate vectors.
    pub fn bracket_c(&self, x: &CVector, y: &CVector) -> CVector {
        let a = self.matrix_c(x);
        let b = self.matrix_c(y);
        self.coords_c(&(&a * &b - &b * &a))
    }

    /// Ambient trace form `tr(XY)`, a positive multiple of the Killing form on
    /// every realized family; used for cheap non-degeneracy screens.
    pub fn trace_form(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        a.component_mul(&b.transpose()).sum()
    }

    pub fn element(self: &Arc<Self>, coords: DVector<f64>) -> AlgebraElement {
        assert_eq!(coords.len(), self.dim);
        AlgebraElement {
            algebra: self.clone(),
            coords,
        }
    }

    pub fn element_from_matrix(self: &Arc<Self>, m: &DMatrix<f64>) -> AlgebraElement {
        self.element(self.coords(m))
    }

    pub fn zero(self: &Arc<Self>) -> AlgebraElement {
        self.element(DVector::zeros(self.dim))
    }
}

/// An element of a realized algebra, stored by coordinates.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    pub algebra: Arc<MatrixLieAlgebra>,
    pub coords: DVector<f64>,
}

impl AlgebraElement {
    pub fn matrix(&self) -> DMatrix<f64> {
        self.algebra.matrix(&self.coords)
    }

    fn same_algebra(&self, other: &AlgebraElement) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra.descriptor == other.algebra.descriptor
    }
}

pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    if !x.same_algebra(y) {
        return Err(Error::AlgebraMismatch);
    }
    let c = x.algebra.bracket_coords(&x.coords, &y.coords);
    Ok(x.algebra.element(c))
}

pub fn ad_operator(x: &AlgebraElement) -> DMatrix<f64> {
    x.algebra.ad_coords(&x.coords)
}

/// True iff the complexified `ad(x)` is diagonalizable: at every clustered
/// eigenvalue the ranks of `ad x - lambda` and its square agree.
pub fn is_semisimple_element(x: &AlgebraElement, tol: f64) -> bool {
    is_semisimple_operator(&ad_operator(x), tol)
}

pub fn is_semisimple_operator(ad: &DMatrix<f64>, tol: f64) -> bool {
    let scale = ad.norm();
    if scale == 0.0 {
        return true;
    }
    let a = linalg::complexify(&(ad / scale));
    let n = a.nrows();
    let Some(vals) = linalg::eigenvalues(&a) else {
        return false;
    };
    for g in linalg::cluster(&vals, tol.sqrt()) {
        let mean = g.iter().map(|&i| vals[i]).sum::<num_complex::Complex64>() / g.len() as f64;
        let shifted = &a - linalg::CMatrix::identity(n, n) * mean;
        let r1 = linalg::rank(&shifted, tol);
        let r2 = linalg::rank(&(&shifted * &shifted), tol);
        if r1 != r2 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2() -> Arc<MatrixLieAlgebra> {
        construct_algebra(Family::SlR, &[2]).unwrap()
    }

    fn e(alg: &Arc<MatrixLieAlgebra>, entries: &[(usize, usize, f64)]) -> AlgebraElement {
        let mut m = DMatrix::zeros(alg.ambient_size, alg.ambient_size);
        for &(r, c, v) in entries {
            m[(r, c)] = v;
        }
        assert!(alg.membership_residual(&m) < 1e-12);
        alg.element_from_matrix(&m)
    }

    #[test]
    fn dims_match_formulas() {
        for s in [
            "sl(2,R)", "sl(4,R)", "su(1,2)", "su*(4)", "so(1,3)", "so*(6)", "sp(2,R)", "sp(1,1)", "sl(3,C)",
            "so(4,C)", "sp(2,C)",
        ] {
            let d = AlgebraDescriptor::parse(s).unwrap();
            let a = MatrixLieAlgebra::new(d.clone()).unwrap();
            assert_eq!(a.dim, d.expected_dim(), "{s}");
        }
        assert_eq!(construct_algebra(Family::SpR, &[2]).unwrap().dim, 10);
    }

    #[test]
    fn sl2_brackets() {
        let a = sl2();
        let h = e(&a, &[(0, 0, 1.0), (1, 1, -1.0)]);
        let x = e(&a, &[(0, 1, 1.0)]);
        let y = e(&a, &[(1, 0, 1.0)]);
        let hx = bracket(&h, &x).unwrap();
        assert!((hx.coords - &x.coords * 2.0).norm() < 1e-14);
        let xy = bracket(&x, &y).unwrap();
        assert!((xy.coords - &h.coords).norm() < 1e-14);
        assert!(bracket(&x, &x).unwrap().coords.norm() < 1e-14);
        assert!((a.killing(&h.coords, &h.coords) - 8.0).abs() < 1e-12);
        assert!((a.killing_fast(&h.coords, &h.coords) - 8.0).abs() < 1e-12);
        assert!((a.killing_fast(&x.coords, &y.coords) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn fast_killing_matches_structure_constants() {
        for s in ["su(1,2)", "so*(6)", "sl(2,C)", "sp(1,1)", "so(2,2)"] {
            let a = MatrixLieAlgebra::parse(s).unwrap();
            let g = a.gram(&DMatrix::identity(a.dim, a.dim));
            assert!((g - a.killing_matrix()).norm() < 1e-9 * a.killing_matrix().norm(), "{s}");
        }
    }

    #[test]
    fn semisimple_tests() {
        let a = sl2();
        let h = e(&a, &[(0, 0, 1.0), (1, 1, -1.0)]);
        let x = e(&a, &[(0, 1, 1.0)]);
        assert!(is_semisimple_element(&h, 1e-8));
        assert!(!is_semisimple_element(&x, 1e-8));
        assert!(is_semisimple_element(&a.zero(), 1e-8));
    }

    #[test]
    fn parse_rejects_exceptional_and_garbage() {
        assert!(matches!(AlgebraDescriptor::parse("e6(6)"), Err(Error::UnsupportedFamily(_))));
        assert!(matches!(AlgebraDescriptor::parse("xx"), Err(Error::InvalidParams(_))));
        assert!(matches!(construct_algebra(Family::SoPq, &[1, 1]), Err(Error::InvalidParams(_))));
        assert_eq!(AlgebraDescriptor::parse(" SO0(1, 2) ").unwrap(), AlgebraDescriptor::new(Family::SoPq, &[1, 2]));
        assert_eq!(AlgebraDescriptor::parse("SU*(4)").unwrap(), AlgebraDescriptor::new(Family::SuStar, &[2]));
    }

    #[test]
    fn mismatch_is_reported() {
        let a = sl2();
        let b = construct_algebra(Family::SlR, &[3]).unwrap();
        assert_eq!(bracket(&a.zero(), &b.zero()).unwrap_err(), Error::AlgebraMismatch);
    }
}
