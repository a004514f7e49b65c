use num_complex::Complex64;

use super::vector::{DenseVector, LatticeVector, StateVector};
use crate::error::{LabError, Result};
use crate::linalg::ComplexMatrix;
use crate::shift::ShiftOperator;

/// An invertible operator acting on a vector type.
pub trait LinearDynamics {
    type Vector: StateVector;

    fn apply(&self, x: &Self::Vector) -> Self::Vector;
    fn apply_inverse(&self, x: &Self::Vector) -> Self::Vector;

    /// `T^n x` for any integer `n`.
    fn power_apply(&self, x: &Self::Vector, n: i64) -> Self::Vector {
        let mut y = x.clone();
        for _ in 0..n.unsigned_abs() {
            y = if n > 0 { self.apply(&y) } else { self.apply_inverse(&y) };
        }
        y
    }
}

impl LinearDynamics for ShiftOperator {
    type Vector = LatticeVector;

    fn apply(&self, x: &LatticeVector) -> LatticeVector {
        x.reindexed(1, |n| self.weight(n))
    }

    fn apply_inverse(&self, x: &LatticeVector) -> LatticeVector {
        x.reindexed(-1, |n| 1.0 / self.weight(n - 1))
    }
}

/// Matrix together with its inverse, computed once.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: ComplexMatrix,
    inverse: ComplexMatrix,
}

impl DenseOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let inverse = matrix.inverse()?;
        Ok(Self { matrix, inverse })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &ComplexMatrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub(crate) fn check_vector(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(LabError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

impl LinearDynamics for DenseOperator {
    type Vector = DenseVector;

    fn apply(&self, x: &DenseVector) -> DenseVector {
        self.matrix.mul_vec(x)
    }

    fn apply_inverse(&self, x: &DenseVector) -> DenseVector {
        self.inverse.mul_vec(x)
    }
}
