//! The lambda-Aluthge transform `|T|^lambda U |T|^(1-lambda)` and its iterates.

mod dense;
mod probe;
mod shift;

pub use dense::{aluthge_dense, iterate_dense, spectrum_drift, DenseTrace, MAX_DENSE_ITERS};
pub use probe::{hyperbolic_limit_probe, CrossingReport, LimitProbe, LimitVerdict, PROBE_TRIALS};
pub use shift::{
    default_probe, dense_consistency_gap, divergence_certificate_shift, hyponormal_divergence_check,
    iterate_shift, DivergenceCertificate, HyponormalReport, ShiftTrace,
};

use serde::{Deserialize, Serialize};

/// `lambda` used wherever no other value is given.
pub const DEFAULT_LAMBDA: f64 = 0.5;
pub const DEFAULT_STOP_TOL: f64 = 1e-10;
/// Grid used by the invariance suites.
pub const LAMBDA_GRID: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StopReason {
    /// A step gap fell below the stopping tolerance at this iterate.
    Converged { iteration: usize },
    Budget,
}

/// Iterates `Delta^(k)` with per-step diagnostics; `iterates[0]` is the input.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AluthgeTrace<T, S> {
    pub lambda: f64,
    pub iterates: Vec<T>,
    /// `|Delta^(k+1) - Delta^(k)|` for `k = 0, 1, ...`.
    pub step_gaps: Vec<f64>,
    /// `|T*T - TT*|` per iterate.
    pub commutator_defects: Vec<f64>,
    pub spectra: Vec<S>,
    pub stop: StopReason,
}

impl<T, S> AluthgeTrace<T, S> {
    pub fn last(&self) -> &T {
        self.iterates.last().expect("trace holds its input")
    }

    pub fn converged(&self) -> bool {
        matches!(self.stop, StopReason::Converged { .. })
    }

    pub fn final_defect(&self) -> f64 {
        self.commutator_defects.last().copied().unwrap_or(0.0)
    }
}

pub(crate) fn check_lambda(lambda: f64) -> crate::Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(crate::LabError::InvalidInput(format!("lambda {lambda} outside (0, 1)")))
    }
}
