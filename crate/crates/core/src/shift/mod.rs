//! Bilateral weighted shifts with eventually constant positive weights.

mod algebra;
mod library;
mod weights;

pub use algebra::{
    aluthge_weight_closed_form, aluthge_weights, aluthge_weights_iterate, certify_split, classify,
    commutator_defect, diagonal_conjugate, distance_to_constant_shifts, hyponormality_violation,
    is_hyponormal, shift_distance, spectrum_annulus, truncate_to_dense, truncate_to_dense_periodic,
    Cut, IndexSplit, ShiftClass, ShiftVerdict, SpectralAnnulus, MAX_CERTIFICATE_POWER,
    MAX_ITERATES,
};
pub use library::{library, preset, LibraryEntry, PRESET_HYP, PRESET_SH};
pub use weights::WeightSequence;

use serde::{Deserialize, Serialize};

/// `W e_n = alpha_n e_{n+1}`; invertible because the weights are bounded away from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShiftOperator {
    pub weights: WeightSequence,
}

impl ShiftOperator {
    pub fn new(weights: WeightSequence) -> Self {
        Self { weights }
    }

    pub fn weight(&self, n: i64) -> f64 {
        self.weights.weight(n)
    }

    pub fn norm(&self) -> f64 {
        self.weights.sup()
    }

    pub fn inverse_norm(&self) -> f64 {
        1.0 / self.weights.inf()
    }
}

impl From<WeightSequence> for ShiftOperator {
    fn from(weights: WeightSequence) -> Self {
        Self { weights }
    }
}
