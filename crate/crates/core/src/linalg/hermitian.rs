//! Hermitian eigendecomposition (cyclic Jacobi) and fractional powers of PSD matrices.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{LabError, Result};

const MAX_SWEEPS: usize = 60;

/// `P = V diag(values) V*` with `values` ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn compose(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let scaled = ComplexMatrix::from_fn(n, |i, j| self.vectors[(i, j)] * f(self.values[j]));
        &scaled * &self.vectors.adjoint()
    }
}

/// Largest deviation from `P = P*`.
pub fn hermitian_defect(p: &ComplexMatrix) -> f64 {
    p.max_abs_diff(&p.adjoint())
}

pub fn hermitian_eigen(p: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    let n = p.dim();
    let scale = p.max_abs().max(f64::MIN_POSITIVE);
    if hermitian_defect(p) > tol.max(1e-14) * scale {
        return Err(LabError::InvalidInput("matrix is not Hermitian".into()));
    }
    // symmetrise so rounding in the input cannot leak into the rotations
    let mut a = ComplexMatrix::from_fn(n, |i, j| (p[(i, j)] + p[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);

    let frob = a.frobenius_norm();
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * frob * 0.1 || off == 0.0 {
            converged = true;
            break;
        }
        for p_ in 0..n {
            for q in p_ + 1..n {
                jacobi_rotate(&mut a, &mut v, p_, q);
            }
        }
    }
    if !converged {
        return Err(LabError::NonConvergence {
            op: "hermitian_eigen",
            budget: MAX_SWEEPS,
        });
    }

    let mut order: Vec<(usize, f64)> = (0..n).map(|i| (i, a[(i, i)].re)).collect();
    order.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
    let values = order.iter().map(|&(_, l)| l).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j].0)]);
    Ok(HermitianEigen { values, vectors })
}

fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.dim();
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let tau = (aqq - app) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = c * t;
    // J = D R with D = diag(1, conj(phase)), R = [[c, s], [-s, c]]
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;
    // A <- A J
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * jpp + y * jqp;
        a[(k, q)] = x * jpq + y * jqq;
    }
    // A <- J* A
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = jpp.conj() * x + jqp.conj() * y;
        a[(q, k)] = jpq.conj() * x + jqq.conj() * y;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * jpp + y * jqp;
        v[(k, q)] = x * jpq + y * jqq;
    }
}

/// `P^exponent` for Hermitian positive semidefinite `P`, `exponent` in (0, 1].
///
/// Eigenvalues in `[-tol * |P|, 0)` are treated as rounding and clamped to zero.
pub fn psd_power(p: &ComplexMatrix, exponent: f64, tol: f64) -> Result<ComplexMatrix> {
    if !(exponent > 0.0 && exponent <= 1.0) {
        return Err(LabError::InvalidInput(format!(
            "exponent {exponent} outside (0, 1]"
        )));
    }
    let eig = hermitian_eigen(p, tol)?;
    let scale = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    if let Some(&min) = eig.values.first() {
        if min < -tol * scale {
            return Err(LabError::NotPsd { min_eigenvalue: min });
        }
    }
    if exponent == 1.0 {
        return Ok(eig.compose(|x| x.max(0.0)));
    }
    Ok(eig.compose(|x| x.max(0.0).powf(exponent)))
}
