//! Numerical laboratory for the dynamics of linear operators.
//!
//! Two backends are provided: bilateral weighted shifts with eventually
//! constant positive weights, handled exactly ([`shift`]), and dense complex
//! matrices ([`linalg`]). On top of them sit orbit analysis and shadowing
//! ([`dynamics`]) and the lambda-Aluthge transform engine ([`aluthge`]).

pub mod aluthge;
pub mod dynamics;
pub mod error;
pub mod format;
pub mod linalg;
pub mod shift;

pub use error::{LabError, Result};
pub use linalg::{ComplexMatrix, PolarFactors, SchurForm, SpectralSplit};
pub use num_complex::Complex64;

/// Moduli closer than this to 1 count as on the unit circle.
pub const SPECTRAL_TOL: f64 = 1e-6;
/// Relative residual accepted from factorizations.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
