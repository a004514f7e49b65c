//! Dense complex linear algebra for the finite-dimensional backend.

mod hermitian;
mod matrix;
mod polar;
mod radius;
pub mod random;
mod schur;
mod split;
mod svd;

pub use hermitian::{hermitian_defect, hermitian_eigen, psd_power, HermitianEigen};
pub use matrix::{vec_norm, ComplexMatrix, MAX_DIM};
pub use polar::{polar_decompose, PolarFactors};
pub use radius::{gelfand_radius, MAX_DOUBLINGS};
pub use schur::{
    eigenvalue_order, eigenvalues, hausdorff_distance, multiset_distance, schur_decompose, schur_with_budget,
    SchurForm, SWEEPS_PER_DIM,
};
pub use split::{classify_matrix, spectral_split, MatrixClass, MatrixVerdict, SpectralSplit, BOUND_HORIZON};
pub use svd::{min_singular_value, operator_norm, svd, Svd};

pub(crate) use polar::invertible_svd;
pub(crate) use split::shadowing_constant_from;
