use thiserror::Error;

/// Errors surfaced by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("{op}: iteration budget of {budget} exhausted")]
    NonConvergence { op: &'static str, budget: usize },

    #[error("singular input: smallest singular value {sigma_min:e} <= {threshold:e}")]
    SingularInput { sigma_min: f64, threshold: f64 },

    #[error("iterate {iteration} became singular (smallest singular value {sigma_min:e})")]
    SingularIterate { iteration: usize, sigma_min: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("operator is not hyperbolic: eigenvalue modulus {modulus} within {tol:e} of the unit circle")]
    NotHyperbolic { modulus: f64, tol: f64 },

    #[error("weighted shift has no hyperbolic coordinate splitting ({verdict})")]
    NotGeneralizedHyperbolic { verdict: String },

    #[error("diagonal conjugator has unequal tails ({left} vs {right}); H or its inverse is unbounded")]
    UnboundedConjugator { left: f64, right: f64 },

    #[error("truncation window of {size} exceeds the limit of {limit}")]
    WindowTooLarge { size: i64, limit: i64 },

    #[error("horizon {horizon} exceeds the limit of {limit}")]
    HorizonTooLarge { horizon: usize, limit: usize },

    #[error("orbit is not certified bounded")]
    NotBoundedOrbit,

    #[error("delta {delta} is not admissible for a pseudo-orbit")]
    DeltaTooLarge { delta: f64 },

    #[error("weights are constant ({value}); the Aluthge orbit is a fixed point")]
    ConstantWeights { value: f64 },

    #[error("weighted shift is not hyponormal (alpha_{index} > alpha_{next})", next = .index + 1)]
    NotHyponormal { index: i64 },

    #[error("Aluthge trace never reached step gap {tol:e} (last gap {last_gap:e})")]
    TraceDiverged { tol: f64, last_gap: f64 },

    #[error("pseudo-orbit defect {defect:e} is not below delta {delta:e}")]
    InvalidPseudoOrbit { defect: f64, delta: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
