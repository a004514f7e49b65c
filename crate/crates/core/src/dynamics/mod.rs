//! Orbits, homoclinic points, pseudo-orbits and shadowing.

mod operator;
mod orbit;
mod shadow;
mod vector;

pub use operator::{DenseOperator, LinearDynamics};
pub use orbit::{
    homoclinic_scaling_check, invariance_check, shift_log_orbit_norm, shift_orbit_norm, Backend, EcReport,
    HomoclinicReport, OrbitAnalysis, OrbitSegment, DENSE_HORIZON_LIMIT, SHIFT_HORIZON_LIMIT,
};
pub use shadow::{
    build_pseudo_orbit_from_bounded, shadow, shadow_solve, shadowing_constant_estimate,
    telescoping_residual, DenseSplitting, PseudoOrbit, ShadowResult, ShiftSplitting, Splitting,
    PSEUDO_ORBIT_LIMIT,
};
pub use vector::{DenseVector, LatticeVector, StateVector};
