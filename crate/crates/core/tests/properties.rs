//! Property tests: structural invariants of the root systems and orbit
//! formulas, each checked against an independent computation.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use symorbit::catalog::lookup_space;
use symorbit::hermann::{hermann_configuration, hermann_orbit_spectrum, HermannConfiguration};
use symorbit::json::round12;
use symorbit::linalg::{self, c64, complexify, CMatrix};
use symorbit::orbits::{
    ad_squared_on_q, complex_focal_radii, dco_dsi_from, isotropy_shape_spectrum, jacobi_spectrum, lattice_distance,
    OrbitPoint,
};
use symorbit::oracle::{brute_force_roots, kernel_dimension, shape_operator};
use symorbit::pairs::{build_pair, hermann_setup, Selector, SymmetricPairData};
use symorbit::roots::{maximal_abelian, restricted_roots, CartanSubspace, RestrictedRootSystem};
use symorbit::MatrixLieAlgebra;

const SPACES: [&str; 4] = [
    "SL(3,R)/SO0(1,2)",
    "SU(1,2)/S(U(0,1)xU(1,1))",
    "Sp(2,R)/SU(1,1).U(1)",
    "SO0(2,2)/SO0(1,1)xSO0(1,1)",
];

struct Fixture {
    pair: SymmetricPairData,
    cartan: CartanSubspace,
    system: RestrictedRootSystem,
}

fn fixtures() -> &'static Vec<Fixture> {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        SPACES
            .iter()
            .map(|space| {
                let inst = lookup_space(space).unwrap();
                let alg = MatrixLieAlgebra::new(inst.algebra.clone()).unwrap();
                let pair = build_pair(&alg, &inst.sigma, None).unwrap();
                let cartan = maximal_abelian(&pair, Selector::Q, 1).unwrap();
                let system = restricted_roots(&pair, &cartan).unwrap();
                Fixture { pair, cartan, system }
            })
            .collect()
    })
}

/// `sigma' = sigma`: the Hermann orbit through `exp(w)` is the isotropy orbit.
fn degenerate_hermann() -> &'static HermannConfiguration {
    static CELL: OnceLock<HermannConfiguration> = OnceLock::new();
    CELL.get_or_init(|| {
        let inst = lookup_space("SL(3,R)/SO0(1,2)").unwrap();
        let alg = MatrixLieAlgebra::new(inst.algebra.clone()).unwrap();
        let pair = build_pair(&alg, &inst.sigma, None).unwrap();
        let pair = hermann_setup(&pair, &inst.sigma).unwrap();
        hermann_configuration(&pair, 3).unwrap()
    })
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn regular(system: &RestrictedRootSystem, w: &[f64]) -> bool {
    system.roots.iter().all(|r| lattice_distance(r.eval(w)) >= 1e-3)
}

fn fixture_and_point() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (0..SPACES.len()).prop_flat_map(|i| {
        let r = fixtures()[i].system.rank();
        (Just(i), coords(r), coords(r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn roots_come_in_opposite_pairs(i in 0..SPACES.len()) {
        let sys = &fixtures()[i].system;
        for r in &sys.roots {
            let neg: Vec<Complex64> = r.values.iter().map(|z| -z).collect();
            let partner = sys.roots.iter().find(|s| {
                s.values.iter().zip(&neg).all(|(a, b)| (a - b).norm() < 1e-8)
            });
            prop_assert!(partner.is_some());
            prop_assert_eq!(partner.unwrap().mult, r.mult);
        }
        prop_assert_eq!(sys.q_dim_from_roots(), fixtures()[i].pair.q.ncols());
    }

    #[test]
    fn jacobi_spectrum_matches_ad_squared((i, _w, v) in fixture_and_point()) {
        let f = &fixtures()[i];
        let k = ad_squared_on_q(&f.pair, &f.cartan.combine(&v));
        let direct = linalg::eigenvalues_real(&k).unwrap();
        let closed = jacobi_spectrum(&f.system, &v).eigenvalues();
        let scale = k.norm().max(1.0);
        let err = linalg::match_multisets(&closed, &direct).unwrap();
        prop_assert!(err <= 1e-8 * scale, "err {err}");
    }

    #[test]
    fn shape_spectrum_is_linear_in_the_normal((i, w, a) in fixture_and_point(), t in -3.0f64..3.0) {
        let sys = &fixtures()[i].system;
        prop_assume!(regular(sys, &w));
        let p = OrbitPoint::from_coeffs(sys, &w);
        let one = isotropy_shape_spectrum(sys, &p, &a).unwrap();
        let ta: Vec<f64> = a.iter().map(|x| x * t).collect();
        let scaled = isotropy_shape_spectrum(sys, &p, &ta).unwrap();
        prop_assert_eq!(one.entries.len(), scaled.entries.len());
        for (e, s) in one.entries.iter().zip(&scaled.entries) {
            prop_assert!((e.eigenvalue * t - s.eigenvalue).norm() <= 1e-10 * (1.0 + e.eigenvalue.norm() * t.abs()));
        }
    }

    #[test]
    fn shape_spectrum_matches_oracle((i, w, a) in fixture_and_point()) {
        let f = &fixtures()[i];
        prop_assume!(regular(&f.system, &w));
        let spec = isotropy_shape_spectrum(&f.system, &OrbitPoint::from_coeffs(&f.system, &w), &a).unwrap();
        let oracle = shape_operator(&f.pair, &f.pair.h, &f.cartan.combine(&w), &f.cartan.combine(&a)).unwrap();
        let err = linalg::match_multisets(&spec.eigenvalues(), &oracle.eigenvalues()).unwrap();
        let scale = spec.eigenvalues().iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(err <= 1e-8 * scale, "err {err}");
    }

    #[test]
    fn focal_points_are_kernel_points((i, w, a) in fixture_and_point()) {
        let f = &fixtures()[i];
        prop_assume!(regular(&f.system, &w));
        prop_assume!(a.iter().map(|x| x.abs()).sum::<f64>() > 0.1);
        let set = complex_focal_radii(&f.system, &OrbitPoint::from_coeffs(&f.system, &w), &a, 4.0).unwrap();
        let oracle = shape_operator(&f.pair, &f.pair.h, &f.cartan.combine(&w), &f.cartan.combine(&a)).unwrap();
        for p in &set.points {
            prop_assert_eq!(kernel_dimension(&oracle.jacobi, &oracle.shape, p.z), p.mult, "z = {}", p.z);
        }
    }

    #[test]
    fn isotropy_degeneration(w in coords(2), v in coords(2)) {
        let cfg = degenerate_hermann();
        prop_assume!(cfg.system.rank() == 2);
        prop_assume!(regular(&cfg.system, &w));
        let iso = isotropy_shape_spectrum(&cfg.system, &OrbitPoint::from_coeffs(&cfg.system, &w), &v).unwrap();
        let her = hermann_orbit_spectrum(cfg, &w, &v).unwrap();
        for e in &iso.entries {
            let m = her.entries.iter().find(|h| h.root == e.root && h.root.is_some());
            prop_assert!(m.is_some());
            prop_assert_eq!(m.unwrap().eigenvalue, e.eigenvalue);
            prop_assert_eq!(m.unwrap().mult, e.mult);
        }
    }

    #[test]
    fn cosh_sinh_identity(entries in prop::collection::vec(-2.0f64..2.0, 9), zr in -2.0f64..2.0, zi in -2.0f64..2.0) {
        let m = DMatrix::from_vec(3, 3, entries);
        let k = complexify(&(&m + m.transpose()));
        let z = c64(zr, zi);
        let (co, si) = dco_dsi_from(&k, z);
        let lhs = &co * &co - &k * &si * &si * (z * z);
        let err = (lhs - CMatrix::identity(3, 3)).norm();
        prop_assert!(err <= 1e-8 * (1.0 + co.norm() * co.norm()), "err {err}");
    }

    #[test]
    fn rounding_is_idempotent(x in -1e12f64..1e12) {
        prop_assert_eq!(round12(round12(x)), round12(x));
        prop_assert!((round12(x) - x).abs() <= 1e-11 * x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn brute_force_roots_agree(i in 0..SPACES.len(), seed in 0u64..1000) {
        let f = &fixtures()[i];
        let cs = maximal_abelian(&f.pair, Selector::Q, seed).unwrap();
        let sys = restricted_roots(&f.pair, &cs).unwrap();
        let brute = brute_force_roots(&f.pair, &cs).unwrap();
        prop_assert_eq!(brute.zero_dim, sys.zero_q.ncols());
        prop_assert_eq!(brute.roots.len(), sys.positive().count());
        for b in &brute.roots {
            let hit = sys.roots.iter().find(|r| {
                r.values.iter().zip(&b.values).all(|(x, y)| (x - y).norm() < 1e-8)
            });
            prop_assert!(hit.is_some());
            prop_assert_eq!(hit.unwrap().mult, b.mult);
        }
    }

    #[test]
    fn jordan_generator_uses_the_series(t in 0.1f64..2.0) {
        // nilpotent K: cosh(z sqrt K) = I + z^2 K / 2 exactly
        let mut k = CMatrix::zeros(2, 2);
        k[(0, 1)] = c64(t, 0.0);
        let z = c64(0.7, 0.3);
        let (co, si) = dco_dsi_from(&k, z);
        let want_co = CMatrix::identity(2, 2) + &k * (z * z / 2.0);
        let want_si = CMatrix::identity(2, 2) + &k * (z * z / 6.0);
        prop_assert!((co - want_co).norm() < 1e-12);
        prop_assert!((si - want_si).norm() < 1e-12);
    }
}
