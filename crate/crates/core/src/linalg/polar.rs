use super::matrix::ComplexMatrix;
use super::svd::{svd, Svd};
use crate::error::{LabError, Result};

/// Right polar decomposition `A = U P`, `P = (A*A)^{1/2}`.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub isometry: ComplexMatrix,
    pub modulus: ComplexMatrix,
}

impl PolarFactors {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.isometry * &self.modulus
    }
}

/// Rejects matrices whose smallest singular value is at most `tol * |A|`.
pub(crate) fn invertible_svd(a: &ComplexMatrix, tol: f64) -> Result<Svd> {
    let s = svd(a, tol)?;
    let smax = s.sigma.first().copied().unwrap_or(0.0);
    let smin = s.sigma.last().copied().unwrap_or(0.0);
    let threshold = tol * smax;
    if smin <= threshold || smax == 0.0 {
        return Err(LabError::SingularInput {
            sigma_min: smin,
            threshold,
        });
    }
    Ok(s)
}

/// Polar factors of an invertible matrix.
///
/// With `A = W diag(s) V*`, `P = V diag(s) V*` and `U = W V*`, which equals
/// `A P^{-1}` without forming the inverse.
pub fn polar_decompose(a: &ComplexMatrix, tol: f64) -> Result<PolarFactors> {
    let s = invertible_svd(a, tol)?;
    let n = a.dim();
    let vs = ComplexMatrix::from_fn(n, |i, j| s.v[(i, j)] * s.sigma[j]);
    let vh = s.v.adjoint();
    let mut modulus = &vs * &vh;
    // exact Hermitian symmetry
    modulus = ComplexMatrix::from_fn(n, |i, j| (modulus[(i, j)] + modulus[(j, i)].conj()) * 0.5);
    let isometry = &s.u * &vh;
    Ok(PolarFactors { isometry, modulus })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_polar() {
        let f = polar_decompose(&ComplexMatrix::identity(3), 1e-10).unwrap();
        assert!(f.isometry.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        assert!(f.modulus.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn antidiagonal_polar() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[3.0, 0.0]]);
        let f = polar_decompose(&a, 1e-10).unwrap();
        // A*A = diag(9, 4) forces P = diag(3, 2); U = A P^{-1}
        assert!(f.modulus.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[3.0, 2.0])) < 1e-15);
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(f.isometry.max_abs_diff(&swap) < 1e-15);
    }

    #[test]
    fn singular_input_refused() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(polar_decompose(&a, 1e-10), Err(LabError::SingularInput { .. })));
    }
}
