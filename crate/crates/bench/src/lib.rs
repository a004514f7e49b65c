//! Fixed inputs shared by the benchmarks.

use oplab_core::linalg::random::{invertible_ginibre, random_hyperbolic, rng};
use oplab_core::shift::WeightSequence;
use oplab_core::ComplexMatrix;

pub fn dense_input(dim: usize, seed: u64) -> ComplexMatrix {
    invertible_ginibre(&mut rng(seed), dim, 0.05)
}

pub fn hyperbolic_input(dim: usize, seed: u64) -> ComplexMatrix {
    random_hyperbolic(&mut rng(seed), dim)
}

pub fn shifted_hyperbolic() -> WeightSequence {
    WeightSequence::two_tailed(2.0, 0.5, 1).expect("valid weights")
}
