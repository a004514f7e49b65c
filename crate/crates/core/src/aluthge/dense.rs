use std::fmt::Write as _;

use num_complex::Complex64;

use super::{check_lambda, AluthgeTrace, StopReason};
use crate::error::{LabError, Result};
use crate::format::float17;
use crate::linalg::{eigenvalues, invertible_svd, multiset_distance, operator_norm, ComplexMatrix};
use crate::RECONSTRUCTION_TOL;

pub const MAX_DENSE_ITERS: usize = 10_000;

pub type DenseTrace = AluthgeTrace<ComplexMatrix, Vec<Complex64>>;

/// `P^lambda U P^(1-lambda)` for the polar factors `A = U P`.
///
/// From `A = W S V*`: `P = V S V*`, `U = W V*`, hence the transform is
/// `V S^lambda (V* W) S^(1-lambda) V*`.
pub fn aluthge_dense(a: &ComplexMatrix, lambda: f64, tol: f64) -> Result<ComplexMatrix> {
    check_lambda(lambda)?;
    let s = invertible_svd(a, tol)?;
    let n = a.dim();
    let inner = &s.v.adjoint() * &s.u;
    let mid = ComplexMatrix::from_fn(n, |i, j| {
        inner[(i, j)] * s.sigma[i].powf(lambda) * s.sigma[j].powf(1.0 - lambda)
    });
    Ok(&(&s.v * &mid) * &s.v.adjoint())
}

/// Iterates until a step gap drops below `stop_tol` or `max_iters` transforms are done.
pub fn iterate_dense(a: &ComplexMatrix, lambda: f64, max_iters: usize, stop_tol: f64) -> Result<DenseTrace> {
    check_lambda(lambda)?;
    if max_iters > MAX_DENSE_ITERS {
        return Err(LabError::InvalidInput(format!(
            "iteration budget {max_iters} exceeds {MAX_DENSE_ITERS}"
        )));
    }
    let norm_tol = 1e-12;
    let mut trace = DenseTrace {
        lambda,
        iterates: vec![a.clone()],
        step_gaps: Vec::new(),
        commutator_defects: vec![operator_norm(&a.self_commutator(), norm_tol)?],
        spectra: vec![eigenvalues(a)?],
        stop: StopReason::Budget,
    };
    for k in 1..=max_iters {
        let next = aluthge_dense(trace.last(), lambda, RECONSTRUCTION_TOL).map_err(|e| match e {
            LabError::SingularInput { sigma_min, .. } => LabError::SingularIterate {
                iteration: k - 1,
                sigma_min,
            },
            other => other,
        })?;
        let gap = operator_norm(&(&next - trace.last()), norm_tol)?;
        trace.commutator_defects.push(operator_norm(&next.self_commutator(), norm_tol)?);
        trace.spectra.push(eigenvalues(&next)?);
        trace.iterates.push(next);
        trace.step_gaps.push(gap);
        if gap < stop_tol {
            trace.stop = StopReason::Converged { iteration: k };
            break;
        }
    }
    Ok(trace)
}

/// Largest multiset distance of any snapshot to the first one.
pub fn spectrum_drift(trace: &DenseTrace) -> f64 {
    let first = &trace.spectra[0];
    trace
        .spectra
        .iter()
        .map(|s| multiset_distance(first, s))
        .fold(0.0, f64::max)
}

impl DenseTrace {
    /// Rows `k,step_gap,commutator_defect,inner_radius,outer_radius`; row `k`
    /// carries the gap from iterate `k` to `k + 1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,step_gap,commutator_defect,inner_radius,outer_radius\n");
        for (k, spec) in self.spectra.iter().enumerate() {
            let inner = spec.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
            let outer = spec.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let gap = self.step_gaps.get(k).map(|g| float17(*g)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{k},{gap},{},{},{}",
                float17(self.commutator_defects[k]),
                float17(inner),
                float17(outer)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_normal, rng};
    use crate::linalg::{polar_decompose, psd_power};

    #[test]
    fn normal_matrices_are_fixed() {
        let mut r = rng(11);
        for _ in 0..5 {
            let a = random_normal(&mut r, 4, 0.3, 3.0);
            for l in super::super::LAMBDA_GRID {
                assert!(aluthge_dense(&a, l, 1e-10).unwrap().max_abs_diff(&a) < 1e-10);
            }
        }
    }

    #[test]
    fn antidiagonal_example() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[3.0, 0.0]]);
        let d = aluthge_dense(&a, 0.5, 1e-10).unwrap();
        let r6 = 6f64.sqrt();
        let want = ComplexMatrix::from_real_rows(&[&[0.0, r6], &[r6, 0.0]]);
        assert!(d.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn matches_polar_and_psd_power_oracle() {
        let mut r = rng(5);
        let a = crate::linalg::random::invertible_ginibre(&mut r, 5, 0.05);
        for l in [0.25, 0.5, 0.75] {
            let f = polar_decompose(&a, 1e-10).unwrap();
            let left = psd_power(&f.modulus, l, 1e-10).unwrap();
            let right = psd_power(&f.modulus, 1.0 - l, 1e-10).unwrap();
            let oracle = &(&left * &f.isometry) * &right;
            assert!(aluthge_dense(&a, l, 1e-10).unwrap().max_abs_diff(&oracle) < 1e-10);
        }
    }

    #[test]
    fn normal_trace_stops_after_one_step() {
        let a = ComplexMatrix::from_real_diagonal(&[0.5, 2.0]);
        let t = iterate_dense(&a, 0.5, 100, 1e-10).unwrap();
        assert_eq!(t.stop, StopReason::Converged { iteration: 1 });
        assert!(t.step_gaps[0] < 1e-14);
    }

    #[test]
    fn antidiagonal_converges_to_normal() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[3.0, 0.0]]);
        let t = iterate_dense(&a, 0.5, 1000, 1e-12).unwrap();
        assert!(t.converged());
        assert!(t.final_defect() < 1e-8);
        assert!(spectrum_drift(&t) < 1e-10);
        assert_eq!(t.to_csv().lines().count(), t.iterates.len() + 1);
    }

    #[test]
    fn singular_input_refused() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(
            iterate_dense(&a, 0.5, 10, 1e-10),
            Err(LabError::SingularIterate { iteration: 0, .. })
        ));
    }
}
