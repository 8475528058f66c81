//! Involutions of a realized algebra and the eigenspace pieces they cut out.
//!
//! Every involution used here has the form `X -> S X S^-1` or
//! `X -> -S X^T S^-1` for an ambient matrix `S`. They are written in a small
//! grammar:
//!
//! ```text
//! spec    := "theta" | "ad[" product "]" | "negt[" product "]" | <subgroup label>
//! product := factor ("*" factor)*
//! factor  := "-" factor | "1" | "K" | "I(p,q)" | "J(n)" | "S(n)"
//!          | "diag(s1,...)" | "blk(" product (";" product)* ")" | "dbl(" product ")"
//! ```
//!
//! `I(p,q)` is the signature matrix, `J(n)` the standard symplectic form,
//! `S(n)` the block swap `[[0,I],[I,0]]` and `K` complex conjugation in the
//! doubled realization. In doubled families a factor of half the ambient size
//! is doubled automatically, so `ad[I(1,2)]` works inside `su(1,2)`. A
//! subgroup label such as `SO0(1,2)` is looked up in the catalog for the
//! algebra at hand.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::catalog;
use crate::error::{Error, Result};
use crate::liealg::{self, MatrixLieAlgebra};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `X -> S X S^-1`
    Conjugation,
    /// `X -> -S X^T S^-1`
    NegativeTranspose,
}

/// Human-readable description of how an involution was built.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    NegativeTranspose,
    ConjugationBySignature { p: usize, q: usize },
    ConjugationBySymplecticForm { n: usize },
    ComplexConjugation,
    ConjugationByForm { form: String },
    Composition(Vec<Recipe>),
}

#[derive(Debug, Clone)]
enum Factor {
    One,
    Conj,
    Sig(usize, usize),
    Symp(usize),
    Swap(usize),
    Diag(Vec<f64>),
    Blk(Vec<Vec<Factor>>),
    Dbl(Vec<Factor>),
    Neg(Box<Factor>),
}

struct Parser<'a> {
    s: &'a [u8],
    at: usize,
    text: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> Error {
        Error::UnsupportedSigma(format!("{what} at offset {} in '{}'", self.at, self.text))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.at).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn starts(&mut self, word: &str) -> bool {
        if self.s[self.at..].starts_with(word.as_bytes()) {
            self.at += word.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.at;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || c == b'.' || c == b'-' || c == b'+' {
                self.at += 1;
            } else {
                break;
            }
        }
        std::str::from_utf8(&self.s[start..self.at])
            .ok()
            .and_then(|t| t.parse::<f64>().ok())
            .ok_or_else(|| self.err("expected a number"))
    }

    fn int(&mut self) -> Result<usize> {
        let v = self.number()?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(self.err("expected a non-negative integer"));
        }
        Ok(v as usize)
    }

    fn product(&mut self) -> Result<Vec<Factor>> {
        let mut out = vec![self.factor()?];
        while self.peek() == Some(b'*') {
            self.at += 1;
            out.push(self.factor()?);
        }
        Ok(out)
    }

    fn factor(&mut self) -> Result<Factor> {
        if self.starts("-") {
            return Ok(Factor::Neg(Box::new(self.factor()?)));
        }
        if self.starts("1") {
            return Ok(Factor::One);
        }
        if self.starts("K") {
            return Ok(Factor::Conj);
        }
        if self.starts("I(") {
            let p = self.int()?;
            self.eat(b',')?;
            let q = self.int()?;
            self.eat(b')')?;
            return Ok(Factor::Sig(p, q));
        }
        if self.starts("J(") {
            let n = self.int()?;
            self.eat(b')')?;
            return Ok(Factor::Symp(n));
        }
        if self.starts("S(") {
            let n = self.int()?;
            self.eat(b')')?;
            return Ok(Factor::Swap(n));
        }
        if self.starts("diag(") {
            let mut v = vec![self.number()?];
            while self.peek() == Some(b',') {
                self.at += 1;
                v.push(self.number()?);
            }
            self.eat(b')')?;
            return Ok(Factor::Diag(v));
        }
        if self.starts("blk(") {
            let mut blocks = vec![self.product()?];
            while self.peek() == Some(b';') {
                self.at += 1;
                blocks.push(self.product()?);
            }
            self.eat(b')')?;
            return Ok(Factor::Blk(blocks));
        }
        if self.starts("dbl(") {
            let inner = self.product()?;
            self.eat(b')')?;
            return Ok(Factor::Dbl(inner));
        }
        Err(self.err("unknown factor"))
    }
}

fn natural(f: &Factor) -> Result<Option<DMatrix<f64>>> {
    Ok(match f {
        Factor::One | Factor::Conj => None,
        Factor::Sig(p, q) => Some(liealg::signature(*p, *q)),
        Factor::Symp(n) => Some(liealg::symplectic(*n)),
        Factor::Swap(n) => Some(liealg::swap(*n)),
        Factor::Diag(v) => Some(DMatrix::from_diagonal(&DVector::from_vec(v.clone()))),
        Factor::Neg(inner) => natural(inner)?.map(|m| -m),
        Factor::Dbl(inner) => Some(liealg::double(&natural_product(inner)?)),
        Factor::Blk(blocks) => {
            let mut acc = DMatrix::zeros(0, 0);
            for b in blocks {
                acc = liealg::block_diag(&acc, &natural_product(b)?);
            }
            Some(acc)
        }
    })
}

fn natural_product(fs: &[Factor]) -> Result<DMatrix<f64>> {
    let mut acc: Option<DMatrix<f64>> = None;
    for f in fs {
        let m = natural(f)?
            .ok_or_else(|| Error::UnsupportedSigma("'1' and 'K' need a known size; use them at top level".into()))?;
        acc = Some(match acc {
            None => m,
            Some(a) if a.nrows() == m.nrows() => a * m,
            Some(_) => return Err(Error::UnsupportedSigma("factor sizes disagree".into())),
        });
    }
    acc.ok_or_else(|| Error::UnsupportedSigma("empty product".into()))
}

fn at_size(f: &Factor, n: usize, doubled: bool) -> Result<DMatrix<f64>> {
    match f {
        Factor::One => Ok(DMatrix::identity(n, n)),
        Factor::Conj if doubled => Ok(liealg::conjugation(n / 2)),
        Factor::Conj => Err(Error::UnsupportedSigma("'K' needs a complex-entry realization".into())),
        Factor::Neg(inner) => Ok(-at_size(inner, n, doubled)?),
        _ => {
            let m = natural(f)?.expect("sized factor");
            if m.nrows() == n {
                Ok(m)
            } else if doubled && 2 * m.nrows() == n {
                Ok(liealg::double(&m))
            } else {
                Err(Error::UnsupportedSigma(format!(
                    "factor of size {} does not fit ambient size {n}",
                    m.nrows()
                )))
            }
        }
    }
}

fn recipe_of(f: &Factor, text: String) -> Option<Recipe> {
    match f {
        Factor::One => None,
        Factor::Conj => Some(Recipe::ComplexConjugation),
        Factor::Sig(p, q) => Some(Recipe::ConjugationBySignature { p: *p, q: *q }),
        Factor::Symp(n) => Some(Recipe::ConjugationBySymplecticForm { n: *n }),
        _ => Some(Recipe::ConjugationByForm { form: text }),
    }
}

/// Parses `ad[...]` / `negt[...]` into the map kind, ambient form and recipe.
fn parse_ambient(spec: &str, n: usize, doubled: bool) -> Result<(MapKind, DMatrix<f64>, Recipe)> {
    let t: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    let (kind, body) = if let Some(b) = t.strip_prefix("ad[") {
        (MapKind::Conjugation, b)
    } else if let Some(b) = t.strip_prefix("negt[") {
        (MapKind::NegativeTranspose, b)
    } else {
        return Err(Error::UnsupportedSigma(format!("cannot parse '{spec}'")));
    };
    let body = body
        .strip_suffix(']')
        .ok_or_else(|| Error::UnsupportedSigma(format!("missing ']' in '{spec}'")))?;
    let mut p = Parser {
        s: body.as_bytes(),
        at: 0,
        text: body,
    };
    let mut factors = Vec::new();
    let mut texts = Vec::new();
    loop {
        let start = p.at;
        factors.push(p.factor()?);
        texts.push(body[start..p.at].to_string());
        match p.peek() {
            Some(b'*') => p.at += 1,
            None => break,
            Some(_) => return Err(p.err("unexpected character")),
        }
    }
    let mut form = DMatrix::identity(n, n);
    let mut parts = Vec::new();
    if kind == MapKind::NegativeTranspose {
        parts.push(Recipe::NegativeTranspose);
    }
    for (f, text) in factors.iter().zip(texts) {
        form *= at_size(f, n, doubled)?;
        if let Some(r) = recipe_of(f, text) {
            parts.push(r);
        }
    }
    let recipe = match parts.len() {
        0 => Recipe::ConjugationByForm { form: "1".into() },
        1 => parts.pop().unwrap(),
        _ => Recipe::Composition(parts),
    };
    Ok((kind, form, recipe))
}

/// An involutive automorphism of a realized algebra.
#[derive(Debug, Clone)]
pub struct Involution {
    pub algebra: Arc<MatrixLieAlgebra>,
    pub kind: MapKind,
    /// Ambient matrix `S`.
    pub form: DMatrix<f64>,
    /// Action on coordinates.
    pub matrix: DMatrix<f64>,
    pub recipe: Recipe,
    pub spec: String,
}

impl Involution {
    /// Resolves an involution spec (see the module docs) for `algebra`.
    pub fn parse(algebra: &Arc<MatrixLieAlgebra>, spec: &str) -> Result<Involution> {
        let t = spec.trim();
        let lower = t.to_lowercase();
        let grammar = if lower == "theta" || lower == "cartan" {
            "negt[1]".to_string()
        } else if lower.starts_with("ad[") || lower.starts_with("negt[") {
            t.to_string()
        } else {
            catalog::sigma_for_subgroup(&algebra.descriptor, t)
                .ok_or_else(|| Error::UnsupportedSigma(format!("no involution of {} fixes '{t}'", algebra.descriptor)))?
        };
        let doubled = algebra.descriptor.family.is_doubled();
        let (kind, form, recipe) = parse_ambient(&grammar, algebra.ambient_size, doubled)?;
        Involution::from_form(algebra, kind, form, recipe, grammar)
    }

    pub fn from_form(
        algebra: &Arc<MatrixLieAlgebra>,
        kind: MapKind,
        form: DMatrix<f64>,
        recipe: Recipe,
        spec: String,
    ) -> Result<Involution> {
        let n = algebra.ambient_size;
        let inv = form
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::UnsupportedSigma(format!("'{spec}' has a singular form")))?;
        let d = algebra.dim;
        let mut matrix = DMatrix::zeros(d, d);
        let mut img = DMatrix::<f64>::zeros(n, n);
        for k in 0..d {
            img.fill(0.0);
            for &(r, c, v) in algebra.basis_entries(k) {
                // S E_rc S^-1 = S[:,r] inv[c,:];  -S E_cr S^-1 = -S[:,c] inv[r,:]
                let (a, b, w) = match kind {
                    MapKind::Conjugation => (r, c, v),
                    MapKind::NegativeTranspose => (c, r, -v),
                };
                for i in 0..n {
                    let s = form[(i, a)];
                    if s == 0.0 {
                        continue;
                    }
                    for j in 0..n {
                        img[(i, j)] += w * s * inv[(b, j)];
                    }
                }
            }
            let coords = algebra.coords(&img);
            let res = algebra.membership_residual(&img);
            if res > 1e-9 * (1.0 + img.norm()) {
                return Err(Error::UnsupportedSigma(format!(
                    "'{spec}' does not preserve {} (residual {res:.2e})",
                    algebra.descriptor
                )));
            }
            matrix.set_column(k, &coords);
        }
        let sq = &matrix * &matrix - DMatrix::<f64>::identity(d, d);
        if sq.amax() > 1e-10 {
            return Err(Error::UnsupportedSigma(format!("'{spec}' is not an involution")));
        }
        Ok(Involution {
            algebra: algebra.clone(),
            kind,
            form,
            matrix,
            recipe,
            spec,
        })
    }

    /// The Cartan involution `X -> -X^T` of the realization.
    pub fn cartan(algebra: &Arc<MatrixLieAlgebra>) -> Result<Involution> {
        let n = algebra.ambient_size;
        Involution::from_form(
            algebra,
            MapKind::NegativeTranspose,
            DMatrix::identity(n, n),
            Recipe::NegativeTranspose,
            "negt[1]".into(),
        )
    }

    pub fn apply(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.matrix * coords
    }

    /// Largest violation of `[sX, sY] = s[X, Y]` over basis pairs.
    pub fn automorphism_residual(&self) -> f64 {
        let a = &self.algebra;
        let d = a.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                let ei = DVector::from_fn(d, |k, _| if k == i { 1.0 } else { 0.0 });
                let ej = DVector::from_fn(d, |k, _| if k == j { 1.0 } else { 0.0 });
                let lhs = a.bracket_coords(&self.apply(&ei), &self.apply(&ej));
                let rhs = self.apply(&a.bracket_coords(&ei, &ej));
                worst = worst.max((lhs - rhs).amax());
            }
        }
        worst
    }
}

fn commutator_residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a * b - b * a).amax()
}

/// Which subspace a Cartan subspace is sought in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Selector {
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "q_p")]
    QP,
    #[serde(rename = "q_f")]
    QF,
    #[serde(rename = "q_qprime")]
    QQPrime,
}

impl Selector {
    pub fn parse(s: &str) -> Option<Selector> {
        match s.to_lowercase().replace(['∩', ' ', '_', '^'], "").as_str() {
            "q" => Some(Selector::Q),
            "qp" => Some(Selector::QP),
            "qf" => Some(Selector::QF),
            "qq'" | "qqprime" => Some(Selector::QQPrime),
            _ => None,
        }
    }
}

/// Subspaces cut out by a third involution `sigma'`.
#[derive(Debug, Clone)]
pub struct PrimeSplit {
    pub h_prime: DMatrix<f64>,
    pub q_prime: DMatrix<f64>,
    /// Fixed algebra of `sigma sigma'`.
    pub l: DMatrix<f64>,
    /// `-1` eigenspace of `sigma sigma'`.
    pub l_perp: DMatrix<f64>,
    pub q_hprime: DMatrix<f64>,
    pub q_qprime: DMatrix<f64>,
    /// Joint eigenspaces of `(sigma, theta, sigma')`, keyed by signs.
    pub octants: Vec<([i8; 3], DMatrix<f64>)>,
}

impl PrimeSplit {
    pub fn octant(&self, signs: [i8; 3]) -> &DMatrix<f64> {
        &self.octants.iter().find(|o| o.0 == signs).expect("all eight octants stored").1
    }
}

/// An algebra with commuting involutions and the induced eigenspaces. Every
/// subspace is stored as orthonormal columns in coordinate space.
#[derive(Debug, Clone)]
pub struct SymmetricPairData {
    pub algebra: Arc<MatrixLieAlgebra>,
    pub sigma: Involution,
    pub theta: Involution,
    pub sigma_prime: Option<Involution>,
    pub h: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub q_f: DMatrix<f64>,
    pub q_p: DMatrix<f64>,
    pub h_f: DMatrix<f64>,
    pub h_p: DMatrix<f64>,
    pub prime: Option<PrimeSplit>,
    /// Gram matrix of the positive form `-B(X, theta Y)` on coordinates.
    pub theta_gram: DMatrix<f64>,
}

fn theta_gram(algebra: &MatrixLieAlgebra, theta: &Involution) -> DMatrix<f64> {
    let d = algebra.dim;
    let ratio = algebra.killing_ratio();
    let mut g = DMatrix::zeros(d, d);
    for j in 0..d {
        let y = algebra.matrix(&theta.matrix.column(j).into_owned());
        for i in 0..d {
            // tr(b_i Y)
            let mut t = 0.0;
            for &(r, c, v) in algebra.basis_entries(i) {
                t += v * y[(c, r)];
            }
            g[(i, j)] = -ratio * t;
        }
    }
    (&g + g.transpose()) * 0.5
}

fn check_nondegenerate(algebra: &MatrixLieAlgebra, basis: &DMatrix<f64>, name: &str) -> Result<()> {
    if basis.ncols() == 0 {
        return Ok(());
    }
    let g = algebra.gram(basis);
    let eig = nalgebra::SymmetricEigen::new(g);
    let top = eig.eigenvalues.amax();
    let low = eig.eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if top == 0.0 || low <= 1e-10 * top {
        return Err(Error::DegenerateSubspace { name: name.into() });
    }
    Ok(())
}

/// Builds `(g, sigma, theta)`. Without `theta_spec` the Cartan involution
/// `X -> -X^T` of the realization is used; commutation is always verified.
pub fn build_pair(
    algebra: &Arc<MatrixLieAlgebra>,
    sigma_spec: &str,
    theta_spec: Option<&str>,
) -> Result<SymmetricPairData> {
    let sigma = Involution::parse(algebra, sigma_spec)?;
    let theta = match theta_spec {
        Some(t) => Involution::parse(algebra, t)?,
        None => Involution::cartan(algebra)?,
    };
    pair_from_involutions(sigma, theta)
}

pub fn pair_from_involutions(sigma: Involution, theta: Involution) -> Result<SymmetricPairData> {
    let algebra = sigma.algebra.clone();
    let res = commutator_residual(&sigma.matrix, &theta.matrix);
    if res > 1e-10 {
        return Err(Error::NonCommutingInvolutions { residual: res });
    }
    let d = algebra.dim;
    let id = DMatrix::<f64>::identity(d, d);
    let (h, q) = linalg::split_by_involution(&id, &sigma.matrix);
    let (f, p) = linalg::split_by_involution(&id, &theta.matrix);
    let (q_f, q_p) = linalg::split_by_involution(&q, &theta.matrix);
    let (h_f, h_p) = linalg::split_by_involution(&h, &theta.matrix);
    let tg = theta_gram(&algebra, &theta);
    if tg.clone().cholesky().is_none() {
        // theta is not a Cartan involution: definiteness gives no shortcut
        for (name, b) in [("q∩f", &q_f), ("q∩p", &q_p), ("h∩f", &h_f), ("h∩p", &h_p)] {
            check_nondegenerate(&algebra, b, name)?;
        }
    }
    Ok(SymmetricPairData {
        algebra,
        sigma,
        theta,
        sigma_prime: None,
        h,
        q,
        f,
        p,
        q_f,
        q_p,
        h_f,
        h_p,
        prime: None,
        theta_gram: tg,
    })
}

/// Adds `sigma'` to a pair. It must commute with both `sigma` and `theta`.
pub fn hermann_setup(pair: &SymmetricPairData, sigma_prime_spec: &str) -> Result<SymmetricPairData> {
    let sp = Involution::parse(&pair.algebra, sigma_prime_spec)?;
    with_sigma_prime(pair, sp)
}

pub fn with_sigma_prime(pair: &SymmetricPairData, sp: Involution) -> Result<SymmetricPairData> {
    let r1 = commutator_residual(&pair.sigma.matrix, &sp.matrix);
    let r2 = commutator_residual(&pair.theta.matrix, &sp.matrix);
    let res = r1.max(r2);
    if res > 1e-10 {
        return Err(Error::NonCommutingInvolutions { residual: res });
    }
    let d = pair.algebra.dim;
    let id = DMatrix::<f64>::identity(d, d);
    let (h_prime, q_prime) = linalg::split_by_involution(&id, &sp.matrix);
    let ss = &pair.sigma.matrix * &sp.matrix;
    let (l, l_perp) = linalg::split_by_involution(&id, &ss);
    let (q_hprime, q_qprime) = linalg::split_by_involution(&pair.q, &sp.matrix);
    let mut octants = Vec::with_capacity(8);
    for (s1, s2, base) in [(1i8, 1i8, &pair.h_f), (1, -1, &pair.h_p), (-1, 1, &pair.q_f), (-1, -1, &pair.q_p)] {
        let (plus, minus) = linalg::split_by_involution(base, &sp.matrix);
        octants.push(([s1, s2, 1], plus));
        octants.push(([s1, s2, -1], minus));
    }
    let mut out = pair.clone();
    out.sigma_prime = Some(sp);
    out.prime = Some(PrimeSplit {
        h_prime,
        q_prime,
        l,
        l_perp,
        q_hprime,
        q_qprime,
        octants,
    });
    Ok(out)
}

impl SymmetricPairData {
    pub fn dim(&self) -> usize {
        self.algebra.dim
    }

    /// Orthonormal basis of the selected subspace.
    pub fn selector_basis(&self, sel: Selector) -> Result<&DMatrix<f64>> {
        Ok(match sel {
            Selector::Q => &self.q,
            Selector::QP => &self.q_p,
            Selector::QF => &self.q_f,
            Selector::QQPrime => {
                &self
                    .prime
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParams("selector q∩q' needs sigma'".into()))?
                    .q_qprime
            }
        })
    }

    /// Splits of a selector into its theta-fixed and theta-negated parts.
    pub fn selector_parts(&self, sel: Selector) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        Ok(match sel {
            Selector::Q => (self.q_p.clone(), self.q_f.clone()),
            Selector::QP => (self.q_p.clone(), DMatrix::zeros(self.dim(), 0)),
            Selector::QF => (DMatrix::zeros(self.dim(), 0), self.q_f.clone()),
            Selector::QQPrime => {
                let pr = self
                    .prime
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParams("selector q∩q' needs sigma'".into()))?;
                (pr.octant([-1, -1, -1]).clone(), pr.octant([-1, 1, -1]).clone())
            }
        })
    }

    /// B-orthonormal basis of a subspace: `B` is diagonal with entries `±1`
    /// on the returned columns. Also returns the signature `(pos, neg)`.
    pub fn b_orthonormal(&self, basis: &DMatrix<f64>) -> Result<(DMatrix<f64>, (usize, usize))> {
        let k = basis.ncols();
        if k == 0 {
            return Ok((basis.clone(), (0, 0)));
        }
        let g = self.algebra.gram(basis);
        let eig = nalgebra::SymmetricEigen::new(g);
        let top = eig.eigenvalues.amax();
        let mut out = DMatrix::zeros(basis.nrows(), k);
        let (mut pos, mut neg) = (0, 0);
        for i in 0..k {
            let l = eig.eigenvalues[i];
            if l.abs() <= 1e-10 * top {
                return Err(Error::DegenerateSubspace { name: "requested subspace".into() });
            }
            if l > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
            out.set_column(i, &(basis * eig.eigenvectors.column(i) / l.abs().sqrt()));
        }
        Ok((out, (pos, neg)))
    }

    /// Dimensions of the four pieces `(q∩f, q∩p, h∩f, h∩p)`.
    pub fn piece_dims(&self) -> [usize; 4] {
        [self.q_f.ncols(), self.q_p.ncols(), self.h_f.ncols(), self.h_p.ncols()]
    }

    /// Orthogonal projector (coordinates) onto the span of orthonormal columns.
    pub fn projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
        basis * basis.transpose()
    }

    /// Largest bracket-relation violation of `[h,h]⊆h, [h,q]⊆q, [q,q]⊆h`.
    pub fn bracket_relation_residual(&self) -> f64 {
        let a = &self.algebra;
        let ph = Self::projector(&self.h);
        let pq = Self::projector(&self.q);
        let mut worst: f64 = 0.0;
        let cols = |m: &DMatrix<f64>| (0..m.ncols()).map(|j| m.column(j).into_owned()).collect::<Vec<_>>();
        let hs = cols(&self.h);
        let qs = cols(&self.q);
        for (xs, ys, target) in [(&hs, &hs, &ph), (&hs, &qs, &pq), (&qs, &qs, &ph)] {
            for x in xs.iter() {
                for y in ys.iter() {
                    let b = a.bracket_coords(x, y);
                    worst = worst.max((target * &b - &b).amax());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{construct_algebra, Family};

    #[test]
    fn sl2_split_by_diagonal_conjugation() {
        let a = construct_algebra(Family::SlR, &[2]).unwrap();
        let pair = build_pair(&a, "ad[diag(1,-1)]", None).unwrap();
        assert_eq!(pair.h.ncols(), 1);
        assert_eq!(pair.q.ncols(), 2);
        assert!(pair.bracket_relation_residual() < 1e-12);
        assert_eq!(pair.piece_dims(), [1, 1, 0, 1]);
    }

    #[test]
    fn riemannian_case_has_no_compact_q() {
        let a = construct_algebra(Family::SlR, &[2]).unwrap();
        let pair = build_pair(&a, "theta", None).unwrap();
        assert_eq!(pair.q_f.ncols(), 0);
        assert_eq!(pair.q_p.ncols(), 2);
    }

    #[test]
    fn grammar_and_labels_agree() {
        let a = construct_algebra(Family::SlR, &[3]).unwrap();
        let s1 = Involution::parse(&a, "negt[I(1,2)]").unwrap();
        let s2 = Involution::parse(&a, "SO0(1,2)").unwrap();
        assert!((&s1.matrix - &s2.matrix).amax() < 1e-14);
        assert!(s1.automorphism_residual() < 1e-12);
        assert!(matches!(Involution::parse(&a, "ad[J(1)]"), Err(Error::UnsupportedSigma(_))));
        assert!(matches!(Involution::parse(&a, "nonsense"), Err(Error::UnsupportedSigma(_))));
    }

    #[test]
    fn non_commuting_sigma_prime_is_rejected() {
        let a = construct_algebra(Family::SlR, &[4]).unwrap();
        let pair = build_pair(&a, "Sp(2,R)", None).unwrap();
        let err = hermann_setup(&pair, "SO0(1,3)").unwrap_err();
        assert!(matches!(err, Error::NonCommutingInvolutions { .. }));
        let pair = build_pair(&a, "SO0(2,2)", None).unwrap();
        let full = hermann_setup(&pair, "Sp(2,R)").unwrap();
        let pr = full.prime.as_ref().unwrap();
        assert_eq!(pr.l.ncols() + pr.l_perp.ncols(), 15);
        let total: usize = pr.octants.iter().map(|o| o.1.ncols()).sum();
        assert_eq!(total, 15);
    }

    #[test]
    fn theta_as_sigma_prime_recovers_cartan_pieces() {
        let a = construct_algebra(Family::SuPq, &[1, 2]).unwrap();
        let pair = build_pair(&a, "ad[K]", None).unwrap();
        let full = hermann_setup(&pair, "theta").unwrap();
        let pr = full.prime.as_ref().unwrap();
        assert_eq!(pr.q_qprime.ncols(), pair.q_p.ncols());
        assert_eq!(pr.q_hprime.ncols(), pair.q_f.ncols());
        let pqp = SymmetricPairData::projector(&pr.q_qprime);
        assert!((&pqp * &pair.q_p - &pair.q_p).amax() < 1e-12);
    }

    #[test]
    fn so11_with_theta_gives_one_dim_l() {
        // any involution of sl(2,R) other than the identity fixes a line
        let a = construct_algebra(Family::SlR, &[2]).unwrap();
        let pair = build_pair(&a, "SO0(1,1)", None).unwrap();
        let full = hermann_setup(&pair, "theta").unwrap();
        let pr = full.prime.as_ref().unwrap();
        assert_eq!(pr.l.ncols(), 1);
        assert_eq!(pr.l_perp.ncols(), 2);
    }
}
