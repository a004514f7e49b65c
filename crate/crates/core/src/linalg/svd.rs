//! One-sided Jacobi SVD and the norms built on it.

use num_complex::Complex64;

use super::matrix::{dot_conj, vec_norm, ComplexMatrix, ZERO};
use crate::error::{LabError, Result};

const MAX_SWEEPS: usize = 80;

/// `A = U diag(sigma) V*` with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.u.dim();
        let us = ComplexMatrix::from_fn(n, |i, j| self.u[(i, j)] * self.sigma[j]);
        &us * &self.v.adjoint()
    }
}

/// Hestenes rotation that orthogonalises columns `p` and `q` of `cols`.
/// Returns false when the pair is already orthogonal to working precision.
fn rotate_pair(
    cols: &mut [Vec<Complex64>],
    v: &mut [Vec<Complex64>],
    p: usize,
    q: usize,
    floor: f64,
) -> bool {
    let alpha = cols[p].iter().map(|z| z.norm_sqr()).sum::<f64>();
    let beta = cols[q].iter().map(|z| z.norm_sqr()).sum::<f64>();
    // columns below the floor are numerically zero
    if alpha <= floor || beta <= floor {
        return false;
    }
    let gamma = dot_conj(&cols[p], &cols[q]);
    let g = gamma.norm();
    if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
        return false;
    }
    let phase = gamma / g;
    let zeta = (beta - alpha) / (2.0 * g);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = c * t;
    for m in [cols, v] {
        let (lo, hi) = m.split_at_mut(q);
        let (xp, xq) = (&mut lo[p], &mut hi[0]);
        for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
            // scaling by conj(phase) puts the pair's inner product on the real axis
            let bq = *b * phase.conj();
            let ap = *a;
            *a = ap * c - bq * s;
            *b = ap * s + bq * c;
        }
    }
    true
}

/// Singular value decomposition of a square matrix.
pub fn svd(a: &ComplexMatrix, tol: f64) -> Result<Svd> {
    if !a.is_finite() {
        return Err(LabError::InvalidInput("matrix has non-finite entries".into()));
    }
    let n = a.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    let floor = (f64::EPSILON * a.frobenius_norm()).powi(2);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                rotated |= rotate_pair(&mut cols, &mut v, p, q, floor);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LabError::NonConvergence {
            op: "svd",
            budget: MAX_SWEEPS,
        });
    }

    let mut order: Vec<(usize, f64)> = cols.iter().map(|c| vec_norm(c)).enumerate().collect();
    order.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));

    let sigma: Vec<f64> = order.iter().map(|&(_, s)| s).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let mut ucols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for &(j, s) in &order {
        if s > smax * f64::EPSILON * n as f64 && s > 0.0 {
            ucols.push(cols[j].iter().map(|z| z / s).collect());
        } else {
            ucols.push(vec![ZERO; n]);
        }
    }
    complete_orthonormal(&mut ucols, &sigma, smax);

    let u = ComplexMatrix::from_fn(n, |i, j| ucols[j][i]);
    let vm = ComplexMatrix::from_fn(n, |i, j| v[order[j].0][i]);
    let out = Svd { u, sigma, v: vm };

    let scale = smax.max(f64::MIN_POSITIVE);
    let residual = out.reconstruct().max_abs_diff(a);
    if residual > tol.max(64.0 * f64::EPSILON * n as f64) * scale * n as f64 {
        return Err(LabError::NonConvergence {
            op: "svd",
            budget: MAX_SWEEPS,
        });
    }
    Ok(out)
}

/// Replaces the columns belonging to (numerically) zero singular values by
/// an orthonormal completion of the others.
fn complete_orthonormal(ucols: &mut [Vec<Complex64>], sigma: &[f64], smax: f64) {
    let n = ucols.len();
    for j in 0..n {
        let degenerate = !(sigma[j] > smax * f64::EPSILON * n as f64 && sigma[j] > 0.0);
        if !degenerate {
            continue;
        }
        'candidates: for e in 0..n {
            let mut w = vec![ZERO; n];
            w[e] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for (k, uk) in ucols.iter().enumerate() {
                    if k == j || vec_norm(uk) == 0.0 {
                        continue;
                    }
                    let proj = dot_conj(uk, &w);
                    for (wi, uk) in w.iter_mut().zip(uk) {
                        *wi -= proj * uk;
                    }
                }
            }
            let nw = vec_norm(&w);
            if nw > 0.5 {
                ucols[j] = w.into_iter().map(|z| z / nw).collect();
                break 'candidates;
            }
        }
    }
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix, tol: f64) -> Result<f64> {
    Ok(svd(a, tol)?.sigma.first().copied().unwrap_or(0.0))
}

/// Smallest singular value.
pub fn min_singular_value(a: &ComplexMatrix, tol: f64) -> Result<f64> {
    Ok(svd(a, tol)?.sigma.last().copied().unwrap_or(0.0))
}
