use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense::DenseTrace;
use crate::error::{LabError, Result};
use crate::linalg::random::{ginibre, rng};
use crate::linalg::{classify_matrix, multiset_distance, operator_norm, schur_decompose, ComplexMatrix, MatrixVerdict};
use crate::SPECTRAL_TOL;

/// Random perturbations tried per probe.
pub const PROBE_TRIALS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitVerdict {
    HyperbolicLimit,
    NotHyperbolicLimit,
}

/// Radial push of the eigenvalue nearest the circle by three safe radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossingReport {
    pub eigenvalue: Complex64,
    pub perturbation_norm: f64,
    /// Path parameter at which the pushed eigenvalue meets the circle.
    pub crossing_parameter: f64,
    pub verdict_at_crossing: MatrixVerdict,
    pub stable_dim_before: usize,
    pub stable_dim_after: usize,
    pub detected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitProbe {
    pub verdict: LimitVerdict,
    pub iterations: usize,
    pub limit_eigenvalues: Vec<Complex64>,
    pub initial_eigenvalues: Vec<Complex64>,
    /// Multiset distance between the initial and limit spectra.
    pub spectral_gap: f64,
    pub initial_hyperbolic: bool,
    /// `min_i ||lambda_i| - 1|` on the limit.
    pub safe_radius: f64,
    pub perturbations_tried: usize,
    pub perturbations_hyperbolic: usize,
    pub crossing: Option<CrossingReport>,
}

impl LimitProbe {
    pub fn passed(&self) -> bool {
        match self.verdict {
            LimitVerdict::NotHyperbolicLimit => true,
            LimitVerdict::HyperbolicLimit => {
                self.initial_hyperbolic
                    && self.perturbations_hyperbolic == self.perturbations_tried
                    && self.crossing.as_ref().is_some_and(|c| c.detected)
            }
        }
    }
}

/// Checks that a converged trace with a hyperbolic limit started hyperbolic,
/// and that hyperbolicity of the limit survives random perturbations of
/// norm half the safe radius but not a radial push of three radii.
///
/// The limit is (near) normal, so a perturbation of norm `e` moves its
/// eigenvalues by at most about `e`.
pub fn hyperbolic_limit_probe(trace: &DenseTrace, tol: f64, seed: u64) -> Result<LimitProbe> {
    let Some(iterations) = trace.step_gaps.iter().position(|&g| g < tol).map(|k| k + 1) else {
        return Err(LabError::TraceDiverged {
            tol,
            last_gap: trace.step_gaps.last().copied().unwrap_or(f64::INFINITY),
        });
    };
    let limit = &trace.iterates[iterations];
    let class = classify_matrix(limit, SPECTRAL_TOL)?;
    let initial = classify_matrix(&trace.iterates[0], SPECTRAL_TOL)?;
    let mut probe = LimitProbe {
        verdict: LimitVerdict::NotHyperbolicLimit,
        iterations,
        spectral_gap: multiset_distance(&initial.eigenvalues, &class.eigenvalues),
        limit_eigenvalues: class.eigenvalues.clone(),
        initial_eigenvalues: initial.eigenvalues.clone(),
        initial_hyperbolic: initial.verdict.is_hyperbolic(),
        safe_radius: class.circle_gap,
        perturbations_tried: 0,
        perturbations_hyperbolic: 0,
        crossing: None,
    };
    if !class.verdict.is_hyperbolic() {
        return Ok(probe);
    }
    probe.verdict = LimitVerdict::HyperbolicLimit;
    let radius = class.circle_gap;
    let dim = limit.dim();
    let mut r = rng(seed);
    for _ in 0..PROBE_TRIALS {
        let g = ginibre(&mut r, dim);
        let e = g.scale_real(0.5 * radius / operator_norm(&g, 1e-12)?);
        let s = limit + &e;
        let c = classify_matrix(&s, SPECTRAL_TOL)?;
        probe.perturbations_tried += 1;
        if c.verdict.is_hyperbolic() && c.stable_dim == class.stable_dim {
            probe.perturbations_hyperbolic += 1;
        }
    }
    probe.crossing = Some(crossing(limit, radius, class.stable_dim)?);
    Ok(probe)
}

fn crossing(limit: &ComplexMatrix, radius: f64, stable_dim: usize) -> Result<CrossingReport> {
    let schur = schur_decompose(limit, 1e-10)?;
    let (i, z) = schur
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| (a.1.norm() - 1.0).abs().total_cmp(&(b.1.norm() - 1.0).abs()))
        .expect("nonempty spectrum");
    let m = z.norm();
    let push = 3.0 * radius;
    let target = if m < 1.0 { m + push } else { m - push };
    let delta = z * (target / m) - z;
    // E = Q (delta e_i e_i*) Q* changes exactly one diagonal entry of the Schur form
    let n = limit.dim();
    let q = &schur.unitary;
    let e = ComplexMatrix::from_fn(n, |a, b| q[(a, i)] * delta * q[(b, i)].conj());
    let t = radius / push;
    let at_crossing = classify_matrix(&(limit + &e.scale_real(t)), SPECTRAL_TOL)?;
    let after = classify_matrix(&(limit + &e), SPECTRAL_TOL)?;
    Ok(CrossingReport {
        eigenvalue: z,
        perturbation_norm: delta.norm(),
        crossing_parameter: t,
        verdict_at_crossing: at_crossing.verdict,
        stable_dim_before: stable_dim,
        stable_dim_after: after.stable_dim,
        detected: at_crossing.verdict == MatrixVerdict::NotHyperbolic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aluthge::iterate_dense;
    use crate::linalg::random::{normal_with_spectrum, random_eigenvalue, similar_to_diagonal};

    #[test]
    fn diagonal_limit() {
        let t = iterate_dense(&ComplexMatrix::from_real_diagonal(&[0.5, 2.0]), 0.5, 100, 1e-10).unwrap();
        let p = hyperbolic_limit_probe(&t, 1e-10, 1).unwrap();
        assert_eq!(p.verdict, LimitVerdict::HyperbolicLimit);
        assert!((p.safe_radius - 0.5).abs() < 1e-12);
        assert!(p.passed());
        let c = p.crossing.unwrap();
        assert!(c.detected);
        assert_ne!(c.stable_dim_after, c.stable_dim_before);
    }

    #[test]
    fn rotation_limit_is_not_hyperbolic() {
        let th = std::f64::consts::FRAC_PI_4;
        let a = ComplexMatrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]);
        let t = iterate_dense(&a, 0.5, 100, 1e-10).unwrap();
        let p = hyperbolic_limit_probe(&t, 1e-10, 1).unwrap();
        assert_eq!(p.verdict, LimitVerdict::NotHyperbolicLimit);
    }

    #[test]
    fn constructed_expanding_spectrum() {
        let mut r = rng(9);
        let eigs: Vec<Complex64> = (0..4).map(|_| random_eigenvalue(&mut r, 1.2, 3.0)).collect();
        let a = similar_to_diagonal(&mut r, &eigs, 2.0);
        let t = iterate_dense(&a, 0.5, 10_000, 1e-10).unwrap();
        let p = hyperbolic_limit_probe(&t, 1e-10, 2).unwrap();
        assert!(p.initial_hyperbolic && p.passed());
        assert!(p.spectral_gap < 1e-6);
    }

    #[test]
    fn unconverged_trace_is_rejected() {
        let mut r = rng(4);
        let a = normal_with_spectrum(&mut r, &[Complex64::new(2.0, 0.0), Complex64::new(0.5, 0.0)]);
        let mut t = iterate_dense(&a, 0.5, 3, 1e-10).unwrap();
        t.step_gaps.iter_mut().for_each(|g| *g = 1.0);
        assert!(matches!(hyperbolic_limit_probe(&t, 1e-10, 0), Err(LabError::TraceDiverged { .. })));
    }
}
