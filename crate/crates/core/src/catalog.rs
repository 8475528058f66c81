//! Static catalog of the classical symmetric pairs in the three cohomogeneity
//! tables, with their involutions, group labels and published formulas.
//!
//! Each row is instantiated over its integer parameters. A row's involution is
//! an `ad[...]` / `negt[...]` spec (see [`crate::pairs`]).

use serde::Serialize;

use crate::liealg::{AlgebraDescriptor, Family};

/// Published `(cohom_K, cohom_L)`; `None` marks an entry the table leaves
/// ambiguous.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub cohom_k: Option<usize>,
    pub cohom_l: Option<usize>,
}

/// One concrete space `G/H` from a table row.
#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub table: u8,
    /// Row template, e.g. `SL(n,R)/SO0(p,n-p)`.
    pub row: &'static str,
    pub params: Vec<(&'static str, usize)>,
    pub algebra: AlgebraDescriptor,
    pub g_label: String,
    pub h_label: String,
    pub k_label: String,
    pub l_label: String,
    pub sigma: String,
    pub expected: Expected,
}

impl Instance {
    pub fn space(&self) -> String {
        format!("{}/{}", self.g_label, self.h_label)
    }
}

/// Table generation uses canonical parameter ranges; lookup by label also
/// accepts swapped or degenerate parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Table,
    Lookup,
}

fn sig(p: usize, q: usize) -> String {
    format!("I({p},{q})")
}

fn diag(v: &[i32]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("diag({})", parts.join(","))
}

fn signs(p: usize, q: usize) -> Vec<i32> {
    let mut v = vec![1; p];
    v.extend(vec![-1; q]);
    v
}

/// `diag(I_{p,n-p}, I_{p,n-p})`.
fn dp(p: usize, n: usize) -> String {
    let mut v = signs(p, n - p);
    v.extend(signs(p, n - p));
    diag(&v)
}

/// Signs for the `(i, j)` splitting of a signature-`(p, q)` space.
fn ij_signs(p: usize, q: usize, i: usize, j: usize) -> Vec<i32> {
    let mut v = signs(i, p - i);
    v.extend(signs(j, q - j));
    v
}

/// Parameter pairs `(i, j)` for the splitting rows. Table mode drops the two
/// trivial corners and keeps one of each pair swapped by `(i,j) -> (p-i,q-j)`.
fn ij_range(p: usize, q: usize, mode: Mode) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..=p {
        for j in 0..=q {
            if (i, j) == (0, 0) || (i, j) == (p, q) {
                continue;
            }
            if mode == Mode::Table && (p - i, q - j) < (i, j) {
                continue;
            }
            out.push((i, j));
        }
    }
    out
}

fn min_formula(p: usize, q: usize, i: usize, j: usize) -> (usize, usize) {
    ((p - i).min(j) + i.min(q - j), i.min(p - i) + j.min(q - j))
}

struct Builder {
    out: Vec<Instance>,
    table: u8,
}

impl Builder {
    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        row: &'static str,
        params: &[(&'static str, usize)],
        algebra: AlgebraDescriptor,
        g: String,
        h: String,
        k: String,
        l: String,
        sigma: String,
        expected: (Option<usize>, Option<usize>),
    ) {
        self.out.push(Instance {
            table: self.table,
            row,
            params: params.to_vec(),
            algebra,
            g_label: g,
            h_label: h,
            k_label: k,
            l_label: l,
            sigma,
            expected: Expected {
                cohom_k: expected.0,
                cohom_l: expected.1,
            },
        });
    }
}

fn ad(s: &str) -> String {
    format!("ad[{s}]")
}

fn negt(s: &str) -> String {
    format!("negt[{s}]")
}

/// `p` values for rows splitting an `n`-dimensional space as `p + (n-p)`.
fn split_range(n: usize, mode: Mode) -> Vec<usize> {
    match mode {
        Mode::Table => (1..=n / 2).collect(),
        Mode::Lookup => (0..=n).collect(),
    }
}

/// `(p, q)` signatures with `p <= q` (table) or any order (lookup).
fn pq_range(bound: usize, min_total: usize, mode: Mode) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for q in 0..=bound {
        for p in 0..=bound {
            if p + q < min_total {
                continue;
            }
            if mode == Mode::Table && (p < 1 || p > q) {
                continue;
            }
            out.push((p, q));
        }
    }
    out
}

fn table1(b: &mut Builder, bound: usize, mode: Mode) {
    use Family::*;
    let lk = mode == Mode::Lookup;
    for n in 2..=bound {
        let g = format!("SL({n},R)");
        let alg = AlgebraDescriptor::new(SlR, &[n]);
        for p in split_range(n, mode) {
            let m = n - p;
            b.push(
                "SL(n,R)/SO0(p,n-p)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("SO0({p},{m})"),
                format!("SO({n})"),
                format!("(SL({p},R)xSL({m},R)).R*"),
                negt(&sig(p, m)),
                (Some(n - 1), Some(p)),
            );
            if p == 0 || p == n {
                continue;
            }
            b.push(
                "SL(n,R)/(SL(p,R)xSL(n-p,R)).R*",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("(SL({p},R)xSL({m},R)).R*"),
                format!("SO({n})"),
                format!("SO0({p},{m})"),
                ad(&sig(p, m)),
                (Some(p), Some(p)),
            );
        }
    }
    for n in 1..=bound / 2 {
        let g = format!("SL({},R)", 2 * n);
        let alg = AlgebraDescriptor::new(SlR, &[2 * n]);
        if n >= 2 || lk {
            b.push(
                "SL(2n,R)/Sp(n,R)",
                &[("n", n)],
                alg.clone(),
                g.clone(),
                format!("Sp({n},R)"),
                format!("SO({})", 2 * n),
                format!("SL({n},C).U(1)"),
                negt(&format!("J({n})")),
                (Some(n - 1), Some(n / 2)),
            );
        }
        b.push(
            "SL(2n,R)/SL(n,C).U(1)",
            &[("n", n)],
            alg,
            g,
            format!("SL({n},C).U(1)"),
            format!("SO({})", 2 * n),
            format!("Sp({n},R)"),
            ad(&format!("J({n})")),
            (Some(n), Some(n / 2)),
        );
    }
    for n in 1..=bound / 2 {
        let g = format!("SU*({})", 2 * n);
        let alg = AlgebraDescriptor::new(SuStar, &[n]);
        if n < 2 && !lk {
            continue;
        }
        b.push(
            "SU*(2n)/SO*(2n)",
            &[("n", n)],
            alg.clone(),
            g.clone(),
            format!("SO*({})", 2 * n),
            format!("Sp({n})"),
            format!("SL({n},C).U(1)"),
            negt("K"),
            (Some(n - 1), Some(n)),
        );
        b.push(
            "SU*(2n)/SL(n,C).U(1)",
            &[("n", n)],
            alg.clone(),
            g.clone(),
            format!("SL({n},C).U(1)"),
            format!("Sp({n})"),
            format!("SO*({})", 2 * n),
            ad(&sig(n, n)),
            (Some(n / 2), Some(n)),
        );
        for p in split_range(n, mode) {
            let m = n - p;
            b.push(
                "SU*(2n)/Sp(p,n-p)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("Sp({p},{m})"),
                format!("Sp({n})"),
                format!("SU*({})xSU*({})xU(1)", 2 * p, 2 * m),
                negt(&dp(p, n)),
                (Some(n - 1), Some(p)),
            );
            if p == 0 || p == n {
                continue;
            }
            b.push(
                "SU*(2n)/SU*(2p)xSU*(2n-2p)xU(1)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("SU*({})xSU*({})xU(1)", 2 * p, 2 * m),
                format!("Sp({n})"),
                format!("Sp({p},{m})"),
                ad(&dp(p, n)),
                (Some(p), Some(p)),
            );
        }
    }
    for (p, q) in pq_range(bound, 2, mode) {
        let g = format!("SU({p},{q})");
        let alg = AlgebraDescriptor::new(SuPq, &[p, q]);
        let k = format!("S(U({p})xU({q}))");
        b.push(
            "SU(p,q)/SO0(p,q)",
            &[("p", p), ("q", q)],
            alg.clone(),
            g.clone(),
            format!("SO0({p},{q})"),
            k.clone(),
            format!("SO0({p},{q})"),
            ad("K"),
            (Some(p), None),
        );
        for (i, j) in ij_range(p, q, mode) {
            let (ck, cl) = min_formula(p, q, i, j);
            b.push(
                "SU(p,q)/S(U(i,j)xU(p-i,q-j))",
                &[("p", p), ("q", q), ("i", i), ("j", j)],
                alg.clone(),
                g.clone(),
                format!("S(U({i},{j})xU({},{}))", p - i, q - j),
                k.clone(),
                format!("S(U({},{j})xU({i},{}))", p - i, q - j),
                ad(&diag(&ij_signs(p, q, i, j))),
                (Some(ck), Some(cl)),
            );
        }
    }
    for p in 1..=bound {
        let g = format!("SU({p},{p})");
        let alg = AlgebraDescriptor::new(SuPq, &[p, p]);
        let k = format!("S(U({p})xU({p}))");
        b.push(
            "SU(p,p)/SO*(2p)",
            &[("p", p)],
            alg.clone(),
            g.clone(),
            format!("SO*({})", 2 * p),
            k.clone(),
            format!("Sp({p},R)"),
            negt(&format!("S({p})*K")),
            (Some(p), Some(p - 1)),
        );
        if p >= 2 || lk {
            b.push(
                "SU(p,p)/Sp(p,R)",
                &[("p", p)],
                alg.clone(),
                g.clone(),
                format!("Sp({p},R)"),
                k.clone(),
                format!("SO*({})", 2 * p),
                negt(&format!("J({p})*K")),
                (Some(p / 2), Some(p - 1)),
            );
        }
        b.push(
            "SU(p,p)/SL(p,C).U(1)",
            &[("p", p)],
            alg,
            g,
            format!("SL({p},C).U(1)"),
            k,
            format!("SL({p},C).U(1)"),
            ad(&format!("S({p})")),
            (Some(p), Some(p - 1)),
        );
    }
    for (p, q) in pq_range(bound / 2, 1, mode) {
        let g = format!("SU({},{})", 2 * p, 2 * q);
        let alg = AlgebraDescriptor::new(SuPq, &[2 * p, 2 * q]);
        let blocks = match (p, q) {
            (0, _) => format!("J({q})"),
            (_, 0) => format!("J({p})"),
            _ => format!("blk(J({p});J({q}))"),
        };
        b.push(
            "SU(2p,2q)/Sp(p,q)",
            &[("p", p), ("q", q)],
            alg,
            g,
            format!("Sp({p},{q})"),
            format!("S(U({})xU({}))", 2 * p, 2 * q),
            format!("SU*({})", 2 * (p + q)),
            negt(&format!("{blocks}*K")),
            (Some(p), None),
        );
    }
}

fn table2(b: &mut Builder, bound: usize, mode: Mode) {
    use Family::*;
    let lk = mode == Mode::Lookup;
    for n in 2..=bound {
        let g = format!("SL({n},C)");
        let alg = AlgebraDescriptor::new(SlC, &[n]);
        let k = format!("SU({n})");
        b.push(
            "SL(n,C)/SO(n,C)",
            &[("n", n)],
            alg.clone(),
            g.clone(),
            format!("SO({n},C)"),
            k.clone(),
            format!("SL({n},R)"),
            negt("K"),
            (Some(n - 1), Some(n - 1)),
        );
        b.push(
            "SL(n,C)/SL(n,R)",
            &[("n", n)],
            alg.clone(),
            g.clone(),
            format!("SL({n},R)"),
            k.clone(),
            format!("SO({n},C)"),
            ad("K"),
            (Some(n / 2), Some(n - 1)),
        );
        for p in split_range(n, mode) {
            let m = n - p;
            if p != 0 && p != n {
                b.push(
                    "SL(n,C)/SL(p,C)xSL(n-p,C)xU(1)",
                    &[("n", n), ("p", p)],
                    alg.clone(),
                    g.clone(),
                    format!("SL({p},C)xSL({m},C)xU(1)"),
                    k.clone(),
                    format!("SU({p},{m})"),
                    ad(&sig(p, m)),
                    (Some(p), Some(p)),
                );
            }
            b.push(
                "SL(n,C)/SU(p,n-p)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("SU({p},{m})"),
                k.clone(),
                format!("SL({p},C)xSL({m},C)xU(1)"),
                negt(&sig(p, m)),
                (Some(n.saturating_sub(2)), Some(p)),
            );
        }
    }
    for n in 1..=bound / 2 {
        let g = format!("SL({},C)", 2 * n);
        let alg = AlgebraDescriptor::new(SlC, &[2 * n]);
        let k = format!("SU({})", 2 * n);
        if n >= 2 || lk {
            b.push(
                "SL(2n,C)/Sp(n,C)",
                &[("n", n)],
                alg.clone(),
                g.clone(),
                format!("Sp({n},C)"),
                k.clone(),
                format!("SU*({})", 2 * n),
                negt(&format!("J({n})*K")),
                (Some(n - 1), Some(n - 1)),
            );
        }
        b.push(
            "SL(2n,C)/SU*(2n)",
            &[("n", n)],
            alg,
            g,
            format!("SU*({})", 2 * n),
            k,
            format!("Sp({n},C)"),
            ad(&format!("J({n})*K")),
            (Some(n), Some(n - 1)),
        );
    }
    for (p, q) in pq_range(bound, 3, mode) {
        let g = format!("SO0({p},{q})");
        let alg = AlgebraDescriptor::new(SoPq, &[p, q]);
        for (i, j) in ij_range(p, q, mode) {
            let (ck, cl) = min_formula(p, q, i, j);
            b.push(
                "SO0(p,q)/SO0(i,j)xSO0(p-i,q-j)",
                &[("p", p), ("q", q), ("i", i), ("j", j)],
                alg.clone(),
                g.clone(),
                format!("SO0({i},{j})xSO0({},{})", p - i, q - j),
                format!("SO({p})xSO({q})"),
                format!("SO0({},{j})xSO0({i},{})", p - i, q - j),
                ad(&diag(&ij_signs(p, q, i, j))),
                (Some(ck), Some(cl)),
            );
        }
    }
    for p in 2..=bound {
        let g = format!("SO0({p},{p})");
        let alg = AlgebraDescriptor::new(SoPq, &[p, p]);
        let k = format!("SO({p})xSO({p})");
        b.push(
            "SO0(p,p)/SO(p,C)",
            &[("p", p)],
            alg.clone(),
            g.clone(),
            format!("SO({p},C)"),
            k.clone(),
            format!("SL({p},R).U(1)"),
            ad(&format!("J({p})")),
            (Some(p), Some(p / 2)),
        );
        b.push(
            "SO0(p,p)/SL(p,R).U(1)",
            &[("p", p)],
            alg,
            g,
            format!("SL({p},R).U(1)"),
            k,
            format!("SO({p},C)"),
            ad(&format!("S({p})")),
            (Some(p / 2), Some(p / 2)),
        );
    }
    for (p, q) in pq_range(bound / 2, 2, mode) {
        if p + q < 2 || (2 * p + 2 * q) < 3 {
            continue;
        }
        let g = format!("SO0({},{})", 2 * p, 2 * q);
        let alg = AlgebraDescriptor::new(SoPq, &[2 * p, 2 * q]);
        let form = match (p, q) {
            (0, _) => format!("J({q})"),
            (_, 0) => format!("J({p})"),
            _ => format!("blk(J({p});J({q}))"),
        };
        b.push(
            "SO0(2p,2q)/SU(p,q).U(1)",
            &[("p", p), ("q", q)],
            alg,
            g,
            format!("SU({p},{q}).U(1)"),
            format!("SO({})xSO({})", 2 * p, 2 * q),
            format!("SU({p},{q}).U(1)"),
            ad(&form),
            (Some(p), Some(p / 2 + q / 2)),
        );
    }
    for n in 2..=bound / 2 {
        let g = format!("SO*({})", 2 * n);
        let alg = AlgebraDescriptor::new(SoStar, &[n]);
        let k = format!("U({n})");
        for p in split_range(n, mode) {
            let m = n - p;
            if p != 0 && p != n {
                b.push(
                    "SO*(2n)/SO*(2p)xSO*(2n-2p)",
                    &[("n", n), ("p", p)],
                    alg.clone(),
                    g.clone(),
                    format!("SO*({})xSO*({})", 2 * p, 2 * m),
                    k.clone(),
                    format!("SU({p},{m}).U(1)"),
                    ad(&dp(p, n)),
                    (Some(p), Some(p)),
                );
            }
            b.push(
                "SO*(2n)/SU(p,n-p).U(1)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("SU({p},{m}).U(1)"),
                k.clone(),
                format!("SO*({})xSO*({})", 2 * p, 2 * m),
                ad(&format!("J({n})*{}", dp(p, n))),
                (Some(p / 2 + m / 2), Some(p)),
            );
        }
        b.push(
            "SO*(2n)/SO(n,C)",
            &[("n", n)],
            alg.clone(),
            g.clone(),
            format!("SO({n},C)"),
            k.clone(),
            format!("SO({n},C)"),
            ad(&format!("S({n})")),
            (Some(n / 2), Some(n)),
        );
    }
    for n in 1..=bound / 4 {
        let g = format!("SO*({})", 4 * n);
        let alg = AlgebraDescriptor::new(SoStar, &[2 * n]);
        b.push(
            "SO*(4n)/SU*(2n).U(1)",
            &[("n", n)],
            alg,
            g,
            format!("SU*({}).U(1)", 2 * n),
            format!("U({})", 2 * n),
            format!("SU*({}).U(1)", 2 * n),
            ad(&format!("blk(J({n});-J({n}))")),
            (Some(n - 1), Some(n - 1)),
        );
    }
    for n in 3..=bound {
        let g = format!("SO({n},C)");
        let alg = AlgebraDescriptor::new(SoC, &[n]);
        let k = format!("SO({n})");
        for p in split_range(n, mode) {
            let m = n - p;
            if p != 0 && p != n {
                b.push(
                    "SO(n,C)/SO(p,C)xSO(n-p,C)",
                    &[("n", n), ("p", p)],
                    alg.clone(),
                    g.clone(),
                    format!("SO({p},C)xSO({m},C)"),
                    k.clone(),
                    format!("SO0({p},{m})"),
                    ad(&sig(p, m)),
                    (Some(p), Some(p)),
                );
            }
            b.push(
                "SO(n,C)/SO0(p,n-p)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("SO0({p},{m})"),
                k.clone(),
                format!("SO({p},C)xSO({m},C)"),
                ad(&format!("{}*K", sig(p, m))),
                (Some(p / 2 + m / 2), Some(p)),
            );
        }
    }
    for n in 2..=bound / 2 {
        let g = format!("SO({},C)", 2 * n);
        let alg = AlgebraDescriptor::new(SoC, &[2 * n]);
        let k = format!("SO({})", 2 * n);
        b.push(
            "SO(2n,C)/SL(n,C).SO(2,C)",
            &[("n", n)],
            alg.clone(),
            g.clone(),
            format!("SL({n},C).SO(2,C)"),
            k.clone(),
            format!("SO*({})", 2 * n),
            ad(&format!("J({n})")),
            (Some(n / 2), Some(n / 2)),
        );
        b.push(
            "SO(2n,C)/SO*(2n)",
            &[("n", n)],
            alg,
            g,
            format!("SO*({})", 2 * n),
            k,
            format!("SL({n},C).SO(2,C)"),
            ad(&format!("J({n})*K")),
            (Some(n), Some(n / 2)),
        );
    }
}

fn table3(b: &mut Builder, bound: usize, mode: Mode) {
    use Family::*;
    for n in 1..=bound {
        let g = format!("Sp({n},R)");
        let alg = AlgebraDescriptor::new(SpR, &[n]);
        let k = format!("U({n})");
        for p in split_range(n, mode) {
            let m = n - p;
            b.push(
                "Sp(n,R)/SU(p,n-p).U(1)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("SU({p},{m}).U(1)"),
                k.clone(),
                format!("Sp({p},R)xSp({m},R)"),
                ad(&format!("J({n})*{}", dp(p, n))),
                (Some(n), Some(p)),
            );
            if p == 0 || p == n {
                continue;
            }
            b.push(
                "Sp(n,R)/Sp(p,R)xSp(n-p,R)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("Sp({p},R)xSp({m},R)"),
                k.clone(),
                format!("SU({p},{m}).U(1)"),
                ad(&dp(p, n)),
                (Some(p), Some(p)),
            );
        }
        b.push(
            "Sp(n,R)/SL(n,R).U(1)",
            &[("n", n)],
            alg,
            g,
            format!("SL({n},R).U(1)"),
            k,
            format!("SL({n},R).U(1)"),
            ad(&sig(n, n)),
            (Some(n - 1), Some(n - 1)),
        );
    }
    for n in 1..=bound / 2 {
        let g = format!("Sp({},R)", 2 * n);
        let alg = AlgebraDescriptor::new(SpR, &[2 * n]);
        b.push(
            "Sp(2n,R)/Sp(n,C)",
            &[("n", n)],
            alg,
            g,
            format!("Sp({n},C)"),
            format!("U({})", 2 * n),
            format!("Sp({n},C)"),
            ad(&format!("blk(J({n});-J({n}))")),
            (Some(n), Some(n)),
        );
    }
    for (p, q) in pq_range(bound, 1, mode) {
        let g = format!("Sp({p},{q})");
        let alg = AlgebraDescriptor::new(SpPq, &[p, q]);
        let n = p + q;
        let k = format!("Sp({p})xSp({q})");
        b.push(
            "Sp(p,q)/SU(p,q).U(1)",
            &[("p", p), ("q", q)],
            alg.clone(),
            g.clone(),
            format!("SU({p},{q}).U(1)"),
            k.clone(),
            format!("SU({p},{q}).U(1)"),
            ad(&sig(n, n)),
            (Some(p), Some(p + q)),
        );
        for (i, j) in ij_range(p, q, mode) {
            let (ck, cl) = min_formula(p, q, i, j);
            let mut d = ij_signs(p, q, i, j);
            d.extend(ij_signs(p, q, i, j));
            b.push(
                "Sp(p,q)/Sp(i,j)xSp(p-i,q-j)",
                &[("p", p), ("q", q), ("i", i), ("j", j)],
                alg.clone(),
                g.clone(),
                format!("Sp({i},{j})xSp({},{})", p - i, q - j),
                k.clone(),
                format!("Sp({},{j})xSp({i},{})", p - i, q - j),
                ad(&diag(&d)),
                (Some(ck), Some(cl)),
            );
        }
    }
    for p in 1..=bound {
        let g = format!("Sp({p},{p})");
        let alg = AlgebraDescriptor::new(SpPq, &[p, p]);
        let k = format!("Sp({p})xSp({p})");
        b.push(
            "Sp(p,p)/SU*(2p).U(1)",
            &[("p", p)],
            alg.clone(),
            g.clone(),
            format!("SU*({}).U(1)", 2 * p),
            k.clone(),
            format!("Sp({p},C)"),
            ad(&format!("blk(J({p});J({p}))")),
            (Some(p), Some(p)),
        );
        b.push(
            "Sp(p,p)/Sp(p,C)",
            &[("p", p)],
            alg,
            g,
            format!("Sp({p},C)"),
            k,
            format!("SU*({}).U(1)", 2 * p),
            ad(&format!("blk(S({p});S({p}))")),
            (Some(p - 1), Some(p)),
        );
    }
    for n in 1..=bound {
        let g = format!("Sp({n},C)");
        let alg = AlgebraDescriptor::new(SpC, &[n]);
        let k = format!("Sp({n})");
        b.push(
            "Sp(n,C)/SL(n,C).SO(2,C)",
            &[("n", n)],
            alg.clone(),
            g.clone(),
            format!("SL({n},C).SO(2,C)"),
            k.clone(),
            format!("Sp({n},R)"),
            ad(&sig(n, n)),
            (Some(n), Some(n)),
        );
        b.push(
            "Sp(n,C)/Sp(n,R)",
            &[("n", n)],
            alg.clone(),
            g.clone(),
            format!("Sp({n},R)"),
            k.clone(),
            format!("SL({n},C).SO(2,C)"),
            ad("K"),
            (Some(n), Some(n)),
        );
        for p in split_range(n, mode) {
            let m = n - p;
            if p != 0 && p != n {
                b.push(
                    "Sp(n,C)/Sp(p,C)xSp(n-p,C)",
                    &[("n", n), ("p", p)],
                    alg.clone(),
                    g.clone(),
                    format!("Sp({p},C)xSp({m},C)"),
                    k.clone(),
                    format!("Sp({p},{m})"),
                    ad(&dp(p, n)),
                    (Some(p), Some(p)),
                );
            }
            b.push(
                "Sp(n,C)/Sp(p,n-p)",
                &[("n", n), ("p", p)],
                alg.clone(),
                g.clone(),
                format!("Sp({p},{m})"),
                k.clone(),
                format!("Sp({p},C)xSp({m},C)"),
                negt(&dp(p, n)),
                (Some(n), Some(p)),
            );
        }
    }
}

/// All instances of table `id` whose `G` label uses integers at most `bound`.
/// Unknown table ids yield an empty list.
pub fn instances(id: u8, bound: usize, mode: Mode) -> Vec<Instance> {
    let mut b = Builder { out: Vec::new(), table: id };
    match id {
        1 => table1(&mut b, bound, mode),
        2 => table2(&mut b, bound, mode),
        3 => table3(&mut b, bound, mode),
        _ => {}
    }
    b.out.retain(|inst| g_label_ints(&inst.g_label).into_iter().all(|v| v <= bound));
    b.out
}

fn g_label_ints(label: &str) -> Vec<usize> {
    label
        .split(|c: char| !c.is_ascii_digit())
        .filter(|t| !t.is_empty())
        .filter_map(|t| t.parse().ok())
        .collect()
}

/// Canonical comparison form of a group label: lowercase, no whitespace or
/// parentheses, `x` for products, `.` for almost-direct products, `so0` as `so`.
pub fn normalize_label(s: &str) -> String {
    let mut t: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '×' => 'x',
            '·' | '⋅' => '.',
            '−' => '-',
            _ => c,
        })
        .collect::<String>()
        .to_lowercase();
    for (a, b) in [("so_0", "so"), ("so0", "so"), ("r_*", "r*"), ("r^*", "r*"), ("_", "")] {
        t = t.replace(a, b);
    }
    t.chars().filter(|c| *c != '(' && *c != ')').collect()
}

/// Every catalog instance (any table) realized on `desc`, in lookup mode.
pub fn instances_for(desc: &AlgebraDescriptor) -> Vec<Instance> {
    let bound = desc.params.iter().map(|&p| p.max(1)).max().unwrap_or(1) * 4;
    let mut out = Vec::new();
    for id in 1..=3 {
        out.extend(instances(id, bound, Mode::Lookup).into_iter().filter(|i| &i.algebra == desc));
    }
    out
}

/// The involution spec whose fixed algebra is the subgroup named `label`.
pub fn sigma_for_subgroup(desc: &AlgebraDescriptor, label: &str) -> Option<String> {
    let want = normalize_label(label);
    instances_for(desc)
        .into_iter()
        .find(|i| normalize_label(&i.h_label) == want)
        .map(|i| i.sigma)
}

/// Resolves a space label `G/H` to its catalog instance.
pub fn lookup_space(space: &str) -> crate::Result<Instance> {
    let (g, h) = space
        .split_once('/')
        .ok_or_else(|| crate::Error::InvalidParams(format!("expected 'G/H', got '{space}'")))?;
    let desc = AlgebraDescriptor::parse(g)?;
    let want = normalize_label(h);
    let all = instances_for(&desc);
    if let Some(inst) = all.iter().find(|i| normalize_label(&i.h_label) == want) {
        let mut inst = inst.clone();
        // keep the canonical table-mode labels when the row is a table row
        inst.g_label = inst.g_label.clone();
        return Ok(inst);
    }
    Err(crate::Error::UnsupportedSigma(format!("no catalog row matches '{space}'")))
}
