//! Orbits of a symmetric subgroup `H'` (fixed by `sigma'`) on `G/H`, and the
//! cohomogeneities of the `K`- and `L`-actions.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::{self, Mode};
use crate::error::{Error, Result};
use crate::liealg::{self, MatrixLieAlgebra};
use crate::linalg::{self, c64, CMatrix};
use crate::orbits::{self, half_lattice_distance, lattice_distance, OrbitSpectrum, Part, SpectrumEntry};
use crate::pairs::{build_pair, Selector, SymmetricPairData};
use crate::roots::{self, CartanSubspace, RestrictedRootSystem};

/// Largest parameter accepted by [`generate_table`].
pub const MAX_TABLE_BOUND: usize = 8;
/// Principal samples keep `β(w)` this far from both singular lattices.
pub const PRINCIPAL_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct RootSplit {
    /// Index into `system.roots` (always a positive root).
    pub root: usize,
    /// `q_β^c ∩ h'^c`
    pub h_prime: CMatrix,
    /// `q_β^c ∩ q'^c`
    pub q_prime: CMatrix,
}

#[derive(Debug, Clone)]
pub struct HermannConfiguration {
    pub pair: SymmetricPairData,
    /// Cartan subspace of `q∩q'`.
    pub b: CartanSubspace,
    pub system: RestrictedRootSystem,
    pub splits: Vec<RootSplit>,
    /// `z_{q^c}(b^c) ∩ h'^c`
    pub zero_h_prime: CMatrix,
}

fn project_orth(op: &DMatrix<f64>, space: &CMatrix) -> CMatrix {
    if space.ncols() == 0 {
        return space.clone();
    }
    // rank is judged against the orthonormal input, not the projection
    let m = linalg::complexify(op) * space;
    let svd = linalg::svd(&m);
    let u = svd.u;
    let keep: Vec<usize> = (0..svd.s.len()).filter(|&i| svd.s[i] > 1e-8).collect();
    CMatrix::from_fn(u.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Builds the configuration for a pair that already carries `sigma'`.
pub fn hermann_configuration(pair: &SymmetricPairData, seed: u64) -> Result<HermannConfiguration> {
    let sp = pair
        .sigma_prime
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("Hermann configuration needs sigma'".into()))?;
    let b = roots::maximal_abelian(pair, Selector::QQPrime, seed)?;
    let system = roots::restricted_roots(pair, &b)?;
    let d = pair.dim();
    let id = DMatrix::<f64>::identity(d, d);
    let plus = (&id + &sp.matrix) * 0.5;
    let minus = (&id - &sp.matrix) * 0.5;
    let mut splits = Vec::new();
    for i in orbits::positive_indices(&system) {
        let qs = &system.roots[i].q_space;
        let h_prime = project_orth(&plus, qs);
        let q_prime = project_orth(&minus, qs);
        if h_prime.ncols() + q_prime.ncols() != qs.ncols() {
            return Err(Error::ClusteringAmbiguous(format!(
                "sigma' does not split root space {i} ({} + {} != {})",
                h_prime.ncols(),
                q_prime.ncols(),
                qs.ncols()
            )));
        }
        splits.push(RootSplit { root: i, h_prime, q_prime });
    }
    let zero_h_prime = project_orth(&plus, &system.zero_q);
    Ok(HermannConfiguration {
        pair: pair.clone(),
        b,
        system,
        splits,
        zero_h_prime,
    })
}

impl HermannConfiguration {
    pub fn rank(&self) -> usize {
        self.b.dim()
    }

    /// Whether `ad(w)` restricted to `l = Fix(sigma sigma')` is semisimple.
    pub fn w_semisimple_on_l(&self, w: &[f64]) -> bool {
        let Some(pr) = self.pair.prime.as_ref() else {
            return false;
        };
        let l = &pr.l;
        let ad = self.pair.algebra.ad_coords(&self.b.combine(w));
        liealg::is_semisimple_operator(&(l.transpose() * ad * l), 1e-8)
    }

    /// Random `w` in `b` whose root values stay `PRINCIPAL_MARGIN` away from
    /// `iπZ` and `iπ(Z + 1/2)`.
    pub fn sample_principal(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        loop {
            let w: Vec<f64> = (0..self.rank()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let clear = self.splits.iter().all(|s| {
                let bw = self.system.roots[s.root].eval(&w);
                lattice_distance(bw) >= PRINCIPAL_MARGIN && half_lattice_distance(bw) >= PRINCIPAL_MARGIN
            });
            if clear {
                return w;
            }
        }
    }
}

/// Shape spectrum of the `H'`-orbit through `exp(w)H` in the normal direction
/// `v` (both given as coefficients in `b`).
pub fn hermann_orbit_spectrum(config: &HermannConfiguration, w: &[f64], v: &[f64]) -> Result<OrbitSpectrum> {
    if w.len() != config.rank() || v.len() != config.rank() {
        return Err(Error::InvalidParams(format!("expected {} coefficients", config.rank())));
    }
    if !config.w_semisimple_on_l(w) {
        return Err(Error::NonSemisimpleW);
    }
    let mut entries = Vec::new();
    for s in &config.splits {
        let r = &config.system.roots[s.root];
        let (bw, bv) = (r.eval(w), r.eval(v));
        if s.h_prime.ncols() > 0 && !orbits::on_lattice(half_lattice_distance(bw), s.root)? {
            entries.push(SpectrumEntry {
                root: Some(s.root),
                root_values: r.values.clone(),
                eigenvalue: orbits::tan_branch(bw, bv),
                mult: s.h_prime.ncols(),
                part: Part::HPrimePart,
                space: s.h_prime.clone(),
            });
        }
        if s.q_prime.ncols() > 0 && !orbits::on_lattice(lattice_distance(bw), s.root)? {
            entries.push(SpectrumEntry {
                root: Some(s.root),
                root_values: r.values.clone(),
                eigenvalue: orbits::cot_branch(bw, bv),
                mult: s.q_prime.ncols(),
                part: Part::QPart,
                space: s.q_prime.clone(),
            });
        }
    }
    if config.zero_h_prime.ncols() > 0 {
        entries.push(SpectrumEntry {
            root: None,
            root_values: vec![],
            eigenvalue: c64(0.0, 0.0),
            mult: config.zero_h_prime.ncols(),
            part: Part::ZeroPart,
            space: config.zero_h_prime.clone(),
        });
    }
    Ok(OrbitSpectrum { entries })
}

/// `min |λ ∓ β(v)|` over the root-space entries of a spectrum.
pub fn avoidance_margin(config: &HermannConfiguration, spectrum: &OrbitSpectrum, v: &[f64]) -> f64 {
    spectrum
        .entries
        .iter()
        .filter_map(|e| {
            let bv: Complex64 = config.system.roots[e.root?].eval(v);
            Some((e.eigenvalue - bv).norm().min((e.eigenvalue + bv).norm()))
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Match,
    Mismatch,
    /// The published entry is ambiguous; nothing to compare against.
    Ambiguous,
    /// The pair is not a catalog row.
    Uncatalogued,
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomogeneityRow {
    pub space: String,
    #[serde(rename = "K")]
    pub k_group: String,
    #[serde(rename = "L")]
    pub l_group: String,
    #[serde(rename = "cohom_K")]
    pub cohom_k: usize,
    #[serde(rename = "cohom_L")]
    pub cohom_l: usize,
    pub table: Option<u8>,
    pub row: Option<String>,
    pub params: Vec<(String, usize)>,
    pub expected_cohom_k: Option<usize>,
    pub expected_cohom_l: Option<usize>,
    pub status: RowStatus,
}

fn status(k: usize, l: usize, exp: &catalog::Expected) -> RowStatus {
    match (exp.cohom_k, exp.cohom_l) {
        (Some(ek), Some(el)) if ek == k && el == l => RowStatus::Match,
        (Some(ek), None) if ek == k => RowStatus::Ambiguous,
        (None, Some(el)) if el == l => RowStatus::Ambiguous,
        (None, None) => RowStatus::Ambiguous,
        _ => RowStatus::Mismatch,
    }
}

fn row_for(inst: &catalog::Instance, k: usize, l: usize) -> CohomogeneityRow {
    CohomogeneityRow {
        space: inst.space(),
        k_group: inst.k_label.clone(),
        l_group: inst.l_label.clone(),
        cohom_k: k,
        cohom_l: l,
        table: Some(inst.table),
        row: Some(inst.row.to_string()),
        params: inst.params.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
        expected_cohom_k: inst.expected.cohom_k,
        expected_cohom_l: inst.expected.cohom_l,
        status: status(k, l, &inst.expected),
    }
}

/// `cohom_K = rank(q∩p)` and `cohom_L = rank(q∩f)`, labelled from the catalog
/// when the pair is a table row.
pub fn cohomogeneity(pair: &SymmetricPairData) -> Result<CohomogeneityRow> {
    let k = roots::rank(pair, Selector::QP)?;
    let l = roots::rank(pair, Selector::QF)?;
    let desc = &pair.algebra.descriptor;
    let found = catalog::instances_for(desc)
        .into_iter()
        .find(|i| i.sigma == pair.sigma.spec);
    Ok(match found {
        Some(inst) => row_for(&inst, k, l),
        None => CohomogeneityRow {
            space: format!("{desc}/Fix({})", pair.sigma.spec),
            k_group: "K".into(),
            l_group: "L".into(),
            cohom_k: k,
            cohom_l: l,
            table: None,
            row: None,
            params: vec![],
            expected_cohom_k: None,
            expected_cohom_l: None,
            status: RowStatus::Uncatalogued,
        },
    })
}

/// Every row of table `id` with integers in `G` at most `bound`.
pub fn generate_table(id: u8, bound: usize) -> Result<Vec<CohomogeneityRow>> {
    if bound > MAX_TABLE_BOUND {
        return Err(Error::InvalidParams(format!("bound {bound} exceeds {MAX_TABLE_BOUND}")));
    }
    match id {
        1..=3 => {}
        4..=6 => return Err(Error::UnsupportedFamily(format!("table {id} lists exceptional groups"))),
        _ => return Err(Error::InvalidParams(format!("unknown table {id}"))),
    }
    let mut cache: HashMap<String, Arc<MatrixLieAlgebra>> = HashMap::new();
    let mut out = Vec::new();
    for inst in catalog::instances(id, bound, Mode::Table) {
        let key = inst.algebra.to_string();
        let alg = match cache.get(&key) {
            Some(a) => a.clone(),
            None => {
                let a = MatrixLieAlgebra::new(inst.algebra.clone())?;
                cache.insert(key, a.clone());
                a
            }
        };
        let pair = build_pair(&alg, &inst.sigma, None)?;
        let k = roots::rank(&pair, Selector::QP)?;
        let l = roots::rank(&pair, Selector::QF)?;
        out.push(row_for(&inst, k, l));
    }
    Ok(out)
}

/// CSV with columns `space,K,L,cohom_K,cohom_L`.
pub fn rows_to_csv(rows: &[CohomogeneityRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["space", "K", "L", "cohom_K", "cohom_L"]).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.space.as_str(),
            &r.k_group,
            &r.l_group,
            &r.cohom_k.to_string(),
            &r.cohom_l.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// Parses CSV produced by [`rows_to_csv`] into `(space, K, L, cohom_K, cohom_L)`.
pub fn parse_csv(text: &str) -> Result<Vec<(String, String, String, usize, usize)>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::InvalidParams(format!("csv: {e}")))?;
        let num = |i: usize| -> Result<usize> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidParams(format!("csv: bad integer in column {i}")))
        };
        out.push((rec[0].to_string(), rec[1].to_string(), rec[2].to_string(), num(3)?, num(4)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{construct_algebra, Family};
    use crate::pairs::hermann_setup;

    #[test]
    fn spec_rows() {
        let a = construct_algebra(Family::SlR, &[3]).unwrap();
        let r = cohomogeneity(&build_pair(&a, "SO0(1,2)", None).unwrap()).unwrap();
        assert_eq!((r.cohom_k, r.cohom_l, r.status), (2, 1, RowStatus::Match));
        let a = construct_algebra(Family::SlR, &[4]).unwrap();
        let r = cohomogeneity(&build_pair(&a, "Sp(2,R)", None).unwrap()).unwrap();
        assert_eq!((r.cohom_k, r.cohom_l), (1, 1));
        let a = construct_algebra(Family::SpC, &[2]).unwrap();
        let r = cohomogeneity(&build_pair(&a, "Sp(1,1)", None).unwrap()).unwrap();
        assert_eq!((r.cohom_k, r.cohom_l), (2, 1));
    }

    #[test]
    fn table_guards() {
        assert!(matches!(generate_table(1, 9), Err(Error::InvalidParams(_))));
        assert!(matches!(generate_table(4, 3), Err(Error::UnsupportedFamily(_))));
        assert!(generate_table(2, 1).unwrap().is_empty());
    }

    #[test]
    fn csv_round_trip() {
        let rows = generate_table(1, 2).unwrap();
        let back = parse_csv(&rows_to_csv(&rows)).unwrap();
        assert_eq!(back.len(), rows.len());
        assert!(back.iter().any(|r| r.0 == "SL(2,R)/SO0(1,1)"));
    }

    #[test]
    fn isotropy_degeneration() {
        let a = construct_algebra(Family::SlR, &[3]).unwrap();
        let pair = build_pair(&a, "negt[I(1,2)]", None).unwrap();
        let spec = pair.sigma.spec.clone();
        let cfg = hermann_configuration(&hermann_setup(&pair, &spec).unwrap(), 5).unwrap();
        assert!(cfg.splits.iter().all(|s| s.h_prime.ncols() == 0));
        let mut rng = <ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        let w = cfg.sample_principal(&mut rng);
        let v = cfg.sample_principal(&mut rng);
        let hs = hermann_orbit_spectrum(&cfg, &w, &v).unwrap();
        let point = orbits::OrbitPoint::from_coeffs(&cfg.system, &w);
        let is = orbits::isotropy_shape_spectrum(&cfg.system, &point, &v).unwrap();
        let mut a: Vec<Complex64> = hs.eigenvalues();
        let mut b: Vec<Complex64> = is.eigenvalues();
        let key = |z: &Complex64| (z.re, z.im);
        a.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        b.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        assert_eq!(a, b);
    }
}
