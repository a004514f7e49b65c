use super::matrix::ComplexMatrix;
use super::svd::operator_norm;
use crate::error::{LabError, Result};

pub const MAX_DOUBLINGS: u32 = 30;

/// `|A^(2^d)|^(1/2^d)` by repeated squaring.
///
/// Each square is renormalised to unit norm and the scale is carried as a
/// logarithm, so expansive matrices do not overflow at large `d`.
pub fn gelfand_radius(a: &ComplexMatrix, doublings: u32, tol: f64) -> Result<f64> {
    if doublings > MAX_DOUBLINGS {
        return Err(LabError::InvalidInput(format!(
            "doublings {doublings} exceeds {MAX_DOUBLINGS}"
        )));
    }
    let norm = operator_norm(a, tol)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    // A^(2^k) = exp(log_scale) * b with |b| = 1
    let mut log_scale = norm.ln();
    let mut b = a.scale_real(1.0 / norm);
    for _ in 0..doublings {
        let sq = &b * &b;
        let s = operator_norm(&sq, tol)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        log_scale = 2.0 * log_scale + s.ln();
        b = sq.scale_real(1.0 / s);
    }
    Ok((log_scale / 2f64.powi(doublings as i32)).exp())
}
