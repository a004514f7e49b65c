use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{check_lambda, AluthgeTrace, StopReason};
use crate::error::{LabError, Result};
use crate::format::float17;
use crate::shift::{
    aluthge_weight_closed_form, aluthge_weights, aluthge_weights_iterate, classify, commutator_defect,
    distance_to_constant_shifts, hyponormality_violation, shift_distance, spectrum_annulus,
    truncate_to_dense_periodic, ShiftVerdict, SpectralAnnulus, WeightSequence,
};
use crate::RECONSTRUCTION_TOL;

use super::dense::aluthge_dense;

pub type ShiftTrace = AluthgeTrace<WeightSequence, SpectralAnnulus>;

/// Exact Aluthge iterates of a shift; stops early only at a fixed point.
pub fn iterate_shift(w: &WeightSequence, lambda: f64, max_iters: usize) -> Result<ShiftTrace> {
    check_lambda(lambda)?;
    let mut trace = ShiftTrace {
        lambda,
        iterates: vec![w.clone()],
        step_gaps: Vec::new(),
        commutator_defects: vec![commutator_defect(w)],
        spectra: vec![spectrum_annulus(w)],
        stop: StopReason::Budget,
    };
    for k in 1..=max_iters {
        let next = aluthge_weights(trace.last(), lambda)?;
        let gap = shift_distance(&next, trace.last());
        trace.commutator_defects.push(commutator_defect(&next));
        trace.spectra.push(spectrum_annulus(&next));
        trace.iterates.push(next);
        trace.step_gaps.push(gap);
        if gap == 0.0 {
            trace.stop = StopReason::Converged { iteration: k };
            break;
        }
    }
    Ok(trace)
}

impl ShiftTrace {
    /// Rows `k,step_gap,commutator_defect,inner_radius,outer_radius`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,step_gap,commutator_defect,inner_radius,outer_radius\n");
        for (k, ann) in self.spectra.iter().enumerate() {
            let gap = self.step_gaps.get(k).map(|g| float17(*g)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{k},{gap},{},{},{}",
                float17(self.commutator_defects[k]),
                float17(ann.inner),
                float17(ann.outer)
            );
        }
        out
    }
}

/// Lower-bound witness that the Aluthge iterates of a shift do not converge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DivergenceCertificate {
    pub lambda: f64,
    pub k_small: u64,
    pub k_large: u64,
    pub probe_index: i64,
    pub alpha_small: f64,
    pub alpha_large: f64,
    /// `|alpha^(kSmall)_n - alpha^(kLarge)_n|` from the iterated map.
    pub gap: f64,
    /// The same gap from the log-binomial closed form.
    pub gap_closed_form: f64,
    pub methods_agree: bool,
    /// `|Delta^(kLarge) - Delta^(kSmall)|`, exact; at least `gap`.
    pub iterate_distance: f64,
    /// `|a- - a+| / 2`, the distance of every iterate to every constant-weight shift.
    pub tail_lower_bound: f64,
}

/// `(4 k, n)` with `n` one step left of the core minus the drift `lambda k`
/// of the binomial front, so iterate `k` still sees the left tail at `n`
/// while iterate `4k` is dominated by the right tail.
pub fn default_probe(w: &WeightSequence, lambda: f64, k_small: u64) -> (u64, i64) {
    let n = w.core_start() - 1 - (lambda * k_small as f64).round() as i64;
    (4 * k_small, n)
}

pub fn divergence_certificate_shift(
    w: &WeightSequence,
    lambda: f64,
    k_small: u64,
    k_large: u64,
    probe_index: i64,
) -> Result<DivergenceCertificate> {
    check_lambda(lambda)?;
    if w.left_tail() == w.right_tail() {
        return Err(LabError::ConstantWeights { value: w.left_tail() });
    }
    if k_large <= k_small {
        return Err(LabError::InvalidInput(format!(
            "kLarge {k_large} must exceed kSmall {k_small}"
        )));
    }
    let small = aluthge_weights_iterate(w, lambda, k_small)?;
    let large = aluthge_weights_iterate(w, lambda, k_large)?;
    let alpha_small = small.weight(probe_index);
    let alpha_large = large.weight(probe_index);
    let gap = (alpha_small - alpha_large).abs();
    let gap_closed_form = (aluthge_weight_closed_form(w, lambda, k_small, probe_index)?
        - aluthge_weight_closed_form(w, lambda, k_large, probe_index)?)
    .abs();
    Ok(DivergenceCertificate {
        lambda,
        k_small,
        k_large,
        probe_index,
        alpha_small,
        alpha_large,
        gap,
        gap_closed_form,
        methods_agree: (gap - gap_closed_form).abs() <= 1e-10,
        iterate_distance: shift_distance(&small, &large),
        tail_lower_bound: (w.left_tail() - w.right_tail()).abs() / 2.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HyponormalReport {
    pub verdict: ShiftVerdict,
    pub hyperbolic: bool,
    pub fixed_point: bool,
    /// Step gaps of the first iterates; all zero at a fixed point.
    pub step_gaps: Vec<f64>,
    /// `min_c sup_n |alpha^(k)_n - c|` for `k = 0..=kMax`.
    pub distances_to_constant: Vec<f64>,
    pub certificate: Option<DivergenceCertificate>,
}

/// Iterates with `lambda = 1/2` up to `k_max`: constant weights are a fixed
/// point, any other hyponormal shift gets a divergence certificate at
/// `(k_max / 4, k_max)`.
pub fn hyponormal_divergence_check(w: &WeightSequence, k_max: u64) -> Result<HyponormalReport> {
    let lambda = super::DEFAULT_LAMBDA;
    if let Some(index) = hyponormality_violation(w) {
        return Err(LabError::NotHyponormal { index });
    }
    let k_max = k_max.max(4);
    let trace = iterate_shift(w, lambda, k_max.min(256) as usize)?;
    let verdict = classify(w).verdict;
    let mut distances_to_constant = Vec::with_capacity(k_max as usize + 1);
    let mut cur = w.clone();
    distances_to_constant.push(distance_to_constant_shifts(&cur));
    for _ in 0..k_max {
        cur = aluthge_weights(&cur, lambda)?;
        distances_to_constant.push(distance_to_constant_shifts(&cur));
    }
    let fixed_point = w.is_constant();
    let certificate = if fixed_point {
        None
    } else {
        let (_, n) = default_probe(w, lambda, k_max / 4);
        Some(divergence_certificate_shift(w, lambda, k_max / 4, k_max, n)?)
    };
    Ok(HyponormalReport {
        verdict,
        hyperbolic: verdict.is_hyperbolic(),
        fixed_point,
        step_gaps: trace.step_gaps,
        distances_to_constant,
        certificate,
    })
}

/// Largest difference between the shift-side Aluthge weights and the
/// subdiagonal of the dense transform of the cyclic closure on
/// `[-half, half - 1]`, over indices `|n| <= interior`.
pub fn dense_consistency_gap(w: &WeightSequence, lambda: f64, half: i64, interior: i64) -> Result<f64> {
    let from = -half;
    let m = truncate_to_dense_periodic(w, from, half - 1)?;
    let d = aluthge_dense(&m, lambda, RECONSTRUCTION_TOL)?;
    let exact = aluthge_weights(w, lambda)?;
    let mut worst: f64 = 0.0;
    for n in -interior..=interior {
        let i = (n - from) as usize;
        worst = worst.max((d[(i + 1, i)].re - exact.weight(n)).abs());
        worst = worst.max(d[(i + 1, i)].im.abs());
    }
    Ok(worst)
}
