//! Restricted root systems, orbit shape spectra, complex focal radii and
//! cohomogeneities for classical semisimple pseudo-Riemannian symmetric pairs.

pub mod error;
pub mod linalg;
pub mod liealg;
pub mod catalog;
pub mod pairs;
pub mod json;
pub mod roots;
pub mod orbits;
pub mod oracle;
pub mod hermann;

pub use nalgebra;
pub use num_complex;

pub use error::{Error, Result};
pub use hermann::{
    cohomogeneity, generate_table, hermann_configuration, hermann_orbit_spectrum, CohomogeneityRow,
    HermannConfiguration, RowStatus,
};
pub use linalg::{CMatrix, CVector};
pub use liealg::{
    ad_operator, bracket, construct_algebra, is_semisimple_element, AlgebraDescriptor, AlgebraElement, Family,
    MatrixLieAlgebra,
};
pub use orbits::{
    complex_focal_radii, isotropy_shape_spectrum, jacobi_spectrum, FocalSet, OrbitPoint, OrbitSpectrum, Part,
    SpectrumEntry,
};
pub use oracle::{determinant_focal_scan, shape_operator, variation_shape_estimate, ScanReport};
pub use pairs::{build_pair, hermann_setup, Involution, Selector, SymmetricPairData};
pub use roots::{maximal_abelian, rank, restricted_roots, root_vectors, CartanSubspace, RestrictedRootSystem, Root};
