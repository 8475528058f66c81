//! Shared fixtures for the criterion benches.

use symorbit::catalog::lookup_space;
use symorbit::{build_pair, maximal_abelian, restricted_roots, MatrixLieAlgebra, RestrictedRootSystem, Selector, SymmetricPairData};

pub struct Fixture {
    pub pair: SymmetricPairData,
    pub system: RestrictedRootSystem,
    /// A regular point and a normal direction, Cartan coordinates.
    pub w: Vec<f64>,
    pub a: Vec<f64>,
}

pub fn pair(space: &str) -> SymmetricPairData {
    let inst = lookup_space(space).expect("catalog space");
    let alg = MatrixLieAlgebra::new(inst.algebra.clone()).expect("algebra");
    build_pair(&alg, &inst.sigma, None).expect("pair")
}

pub fn fixture(space: &str) -> Fixture {
    let pair = pair(space);
    let cs = maximal_abelian(&pair, Selector::Q, 0).expect("cartan");
    let system = restricted_roots(&pair, &cs).expect("roots");
    let r = system.rank();
    let w = (0..r).map(|i| 0.37 + 0.21 * i as f64).collect();
    let a = (0..r).map(|i| 0.8 - 0.45 * i as f64).collect();
    Fixture { pair, system, w, a }
}
