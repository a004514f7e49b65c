//! Stable/unstable spectral splitting of hyperbolic matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, ONE, ZERO};
use super::schur::{reorder_by, schur_decompose};
use super::svd::operator_norm;
use crate::error::{LabError, Result};

/// Powers checked when fitting the bound constant.
pub const BOUND_HORIZON: u32 = 20;
const BOUND_HORIZON_MAX: u32 = 200;

/// Riesz projections onto the parts of the spectrum inside and outside the unit circle.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub stable_projection: ComplexMatrix,
    pub unstable_projection: ComplexMatrix,
    /// Largest modulus of an eigenvalue inside the disk; 0 when there is none.
    pub stable_rate: f64,
    /// Smallest modulus of an eigenvalue outside the disk; infinite when there is none.
    pub unstable_rate: f64,
    /// `C` with `|A^k P_s| <= C rho_s^k` and `|A^-k P_u| <= C rho_u^-k`.
    pub bound_constant: f64,
    pub stable_dim: usize,
}

impl SpectralSplit {
    /// `K = C/(1 - rho_s) + C rho_u^{-1} / (1 - rho_u^{-1})`.
    pub fn shadowing_constant(&self) -> f64 {
        shadowing_constant_from(self.bound_constant, self.stable_rate, 1.0 / self.unstable_rate)
    }
}

pub(crate) fn shadowing_constant_from(c: f64, stable_rate: f64, inverse_unstable_rate: f64) -> f64 {
    c / (1.0 - stable_rate) + c * inverse_unstable_rate / (1.0 - inverse_unstable_rate)
}

/// Solves `T11 Y - Y T22 = C` for upper triangular `T11` (p x p) and `T22` (q x q).
fn triangular_sylvester(t: &ComplexMatrix, p: usize, c: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = t.dim();
    let q = n - p;
    // y[i][j], i < p, j < q
    let mut y = vec![vec![ZERO; q]; p];
    for j in 0..q {
        let mu = t[(p + j, p + j)];
        let mut rhs: Vec<Complex64> = (0..p).map(|i| c[i][j]).collect();
        for l in 0..j {
            let tlj = t[(p + l, p + j)];
            for i in 0..p {
                rhs[i] += y[i][l] * tlj;
            }
        }
        for i in (0..p).rev() {
            let mut s = rhs[i];
            for k in i + 1..p {
                s -= t[(i, k)] * y[k][j];
            }
            y[i][j] = s / (t[(i, i)] - mu);
        }
    }
    y
}

/// Splits a hyperbolic matrix into stable and unstable parts.
pub fn spectral_split(a: &ComplexMatrix, tol: f64) -> Result<SpectralSplit> {
    let n = a.dim();
    let schur = schur_decompose(a, 1e-10)?;
    for z in &schur.eigenvalues {
        let m = z.norm();
        if (m - 1.0).abs() < tol {
            return Err(LabError::NotHyperbolic { modulus: m, tol });
        }
    }
    let inverse = a.inverse()?;

    let mut t = schur.upper;
    let mut q = schur.unitary;
    let p = reorder_by(&mut t, &mut q, |z| z.norm() < 1.0);

    let c: Vec<Vec<Complex64>> = (0..p)
        .map(|i| (p..n).map(|j| -t[(i, j)]).collect())
        .collect();
    let y = triangular_sylvester(&t, p, &c);
    let mut ps = ComplexMatrix::zeros(n);
    for i in 0..p {
        ps[(i, i)] = ONE;
        for j in p..n {
            ps[(i, j)] = -y[i][j - p];
        }
    }
    let stable_projection = &(&q * &ps) * &q.adjoint();
    let unstable_projection = &ComplexMatrix::identity(n) - &stable_projection;

    let diag = t.diagonal();
    let stable_rate = diag[..p].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let unstable_rate = diag[p..].iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);

    let mut bound: f64 = 1.0;
    if p > 0 {
        bound = bound.max(power_bound(a, stable_rate, &stable_projection, tol)?);
    }
    if p < n {
        bound = bound.max(power_bound(&inverse, 1.0 / unstable_rate, &unstable_projection, tol)?);
    }

    Ok(SpectralSplit {
        stable_projection,
        unstable_projection,
        stable_rate,
        unstable_rate,
        bound_constant: bound,
        stable_dim: p,
    })
}

/// `max_k |(A/rate)^k P|` over `k <= BOUND_HORIZON`, extended while the ratio still grows.
/// Each power is projected again so rounding leaks into the other part cannot grow.
fn power_bound(a: &ComplexMatrix, rate: f64, proj: &ComplexMatrix, tol: f64) -> Result<f64> {
    if rate == 0.0 {
        return operator_norm(proj, tol.min(1e-10));
    }
    let scaled = a.scale_real(1.0 / rate);
    let mut m = proj.clone();
    let mut best = operator_norm(&m, 1e-10)?;
    let mut prev = best;
    for k in 1..=BOUND_HORIZON_MAX {
        m = proj * &(&scaled * &m);
        let r = operator_norm(&m, 1e-10)?;
        best = best.max(r);
        if k >= BOUND_HORIZON && r <= prev {
            break;
        }
        prev = r;
    }
    Ok(best)
}

/// Hyperbolicity verdict for a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixVerdict {
    UniformContraction,
    UniformExpansion,
    Hyperbolic,
    NotHyperbolic,
    Singular,
}

impl MatrixVerdict {
    pub fn is_hyperbolic(self) -> bool {
        matches!(
            self,
            Self::UniformContraction | Self::UniformExpansion | Self::Hyperbolic
        )
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MatrixClass {
    pub verdict: MatrixVerdict,
    pub eigenvalues: Vec<Complex64>,
    pub stable_dim: usize,
    /// `min_i ||lambda_i| - 1|`.
    pub circle_gap: f64,
}

/// Classifies by eigenvalue moduli; moduli within `tol` of 1 count as on the circle.
pub fn classify_matrix(a: &ComplexMatrix, tol: f64) -> Result<MatrixClass> {
    let eigenvalues = schur_decompose(a, 1e-10)?.eigenvalues;
    let scale = eigenvalues.first().map(|z| z.norm()).unwrap_or(0.0);
    let circle_gap = eigenvalues
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    let stable_dim = eigenvalues.iter().filter(|z| z.norm() < 1.0).count();
    let singular = eigenvalues
        .iter()
        .any(|z| z.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    let verdict = if singular {
        MatrixVerdict::Singular
    } else if circle_gap < tol {
        MatrixVerdict::NotHyperbolic
    } else if stable_dim == eigenvalues.len() {
        MatrixVerdict::UniformContraction
    } else if stable_dim == 0 {
        MatrixVerdict::UniformExpansion
    } else {
        MatrixVerdict::Hyperbolic
    };
    Ok(MatrixClass {
        verdict,
        eigenvalues,
        stable_dim,
        circle_gap,
    })
}
