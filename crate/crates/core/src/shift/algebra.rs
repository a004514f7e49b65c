//! Exact operations on bilateral weighted shifts `W e_n = alpha_n e_{n+1}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::weights::WeightSequence;
use crate::error::{LabError, Result};
use crate::linalg::{ComplexMatrix, MAX_DIM};

/// Largest iterate count accepted by [`aluthge_weights_iterate`].
pub const MAX_ITERATES: u64 = 1 << 16;
/// Largest power tried when certifying a contraction rate.
pub const MAX_CERTIFICATE_POWER: u32 = 1 << 16;

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda < 1.0 {
        Ok(())
    } else {
        Err(LabError::InvalidInput(format!("lambda {lambda} outside (0, 1)")))
    }
}

/// Weights of the lambda-Aluthge transform: `alpha'_n = alpha_n^(1-lambda) alpha_{n+1}^lambda`.
///
/// For positive weights `|W| = diag(alpha_n)` and `U` is the unweighted
/// shift, so `|W|^lambda U |W|^(1-lambda)` is again a weighted shift.
/// Tails map to themselves exactly and the core grows by at most one index
/// on the left.
pub fn aluthge_weights(w: &WeightSequence, lambda: f64) -> Result<WeightSequence> {
    check_lambda(lambda)?;
    if w.is_constant() {
        return Ok(w.clone());
    }
    let start = w.core_start() - 1;
    let end = w.core_end();
    let core: Vec<f64> = (start..end)
        .map(|n| w.weight(n).powf(1.0 - lambda) * w.weight(n + 1).powf(lambda))
        .collect();
    Ok(WeightSequence::canonical(start, core, w.left_tail(), w.right_tail()))
}

/// `k`-fold Aluthge map on weights, iterated in log space.
pub fn aluthge_weights_iterate(w: &WeightSequence, lambda: f64, k: u64) -> Result<WeightSequence> {
    check_lambda(lambda)?;
    if k > MAX_ITERATES {
        return Err(LabError::InvalidInput(format!(
            "iterate count {k} exceeds {MAX_ITERATES}"
        )));
    }
    if k == 0 || w.is_constant() {
        return Ok(w.clone());
    }
    let (ll, lr) = (w.left_tail().ln(), w.right_tail().ln());
    let mut start = w.core_start();
    let end = w.core_end();
    let mut logs: Vec<f64> = w.core().iter().map(|x| x.ln()).collect();
    for _ in 0..k {
        let mut next = Vec::with_capacity(logs.len() + 1);
        // new index start-1 mixes the left tail with the old first entry
        let first = logs.first().copied().unwrap_or(lr);
        next.push((1.0 - lambda) * ll + lambda * first);
        for i in 0..logs.len() {
            let right = logs.get(i + 1).copied().unwrap_or(lr);
            next.push((1.0 - lambda) * logs[i] + lambda * right);
        }
        logs = next;
        start -= 1;
    }
    debug_assert_eq!(start + logs.len() as i64, end);
    let core = logs.into_iter().map(f64::exp).collect();
    Ok(WeightSequence::canonical(start, core, w.left_tail(), w.right_tail()))
}

/// `alpha^(k)_n` from the log-binomial closed form
/// `ln alpha^(k)_n = sum_j C(k,j) lambda^j (1-lambda)^(k-j) ln alpha_{n+j}`,
/// with binomial weights built in log space.
pub fn aluthge_weight_closed_form(w: &WeightSequence, lambda: f64, k: u64, n: i64) -> Result<f64> {
    check_lambda(lambda)?;
    if k > MAX_ITERATES {
        return Err(LabError::InvalidInput(format!(
            "iterate count {k} exceeds {MAX_ITERATES}"
        )));
    }
    if n + (k as i64) < w.core_start() {
        return Ok(w.left_tail());
    }
    if n >= w.core_end() {
        return Ok(w.right_tail());
    }
    let log_ratio = (lambda / (1.0 - lambda)).ln();
    let mut log_binom = k as f64 * (1.0 - lambda).ln();
    let mut acc = 0.0;
    for j in 0..=k {
        acc += log_binom.exp() * w.log_weight(n + j as i64);
        if j < k {
            log_binom += ((k - j) as f64 / (j + 1) as f64).ln() + log_ratio;
        }
    }
    Ok(acc.exp())
}

/// Inner and outer radius of the annular spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralAnnulus {
    pub inner: f64,
    pub outer: f64,
}

impl SpectralAnnulus {
    pub fn meets_unit_circle(&self) -> bool {
        self.inner <= 1.0 && 1.0 <= self.outer
    }
}

/// Spectrum of an invertible eventually-constant shift: `min(a-, a+) <= |z| <= max(a-, a+)`.
///
/// The radii are the exponential growth rates of weight products, which for
/// this class are exactly the tail constants.
pub fn spectrum_annulus(w: &WeightSequence) -> SpectralAnnulus {
    let (a, b) = (w.left_tail(), w.right_tail());
    SpectralAnnulus {
        inner: a.min(b),
        outer: a.max(b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftVerdict {
    UniformContraction,
    UniformExpansion,
    /// Hyperbolic with both parts nontrivial; cannot occur for weighted shifts.
    HyperbolicOnly,
    ShiftedHyperbolic,
    NotGeneralizedHyperbolic,
    Boundary,
}

impl ShiftVerdict {
    pub fn is_generalized_hyperbolic(self) -> bool {
        matches!(
            self,
            Self::UniformContraction | Self::UniformExpansion | Self::HyperbolicOnly | Self::ShiftedHyperbolic
        )
    }

    pub fn is_hyperbolic(self) -> bool {
        matches!(self, Self::UniformContraction | Self::UniformExpansion | Self::HyperbolicOnly)
    }
}

/// Where the coordinate splitting `M = span{e_n : n >= s}`, `N = span{e_n : n < s}` cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cut {
    /// `M` is the whole space.
    MinusInfinity,
    At(i64),
    /// `N` is the whole space.
    PlusInfinity,
}

impl Cut {
    pub fn in_m(self, n: i64) -> bool {
        match self {
            Cut::MinusInfinity => true,
            Cut::At(s) => n >= s,
            Cut::PlusInfinity => false,
        }
    }
}

/// Certified coordinate splitting for a generalized hyperbolic shift.
///
/// `|T_M^p_m| <= rate_m^p_m` and `|T_N^{-p_n}| <= rate_n^p_n`; when a power is
/// 1 the rate is the plain operator norm, `sup_{n>=s} alpha_n` resp.
/// `sup_{n<s} 1/alpha_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexSplit {
    pub cut: Cut,
    pub rate_m: f64,
    pub rate_n: f64,
    pub power_m: u32,
    pub power_n: u32,
    /// `C` with `|T_M^k| <= C rate_m^k` and `|T_N^{-k}| <= C rate_n^k` for all `k`.
    pub bound_constant: f64,
}

impl IndexSplit {
    pub fn split_point(&self) -> Option<i64> {
        match self.cut {
            Cut::At(s) => Some(s),
            _ => None,
        }
    }

    pub fn shadowing_constant(&self) -> f64 {
        crate::linalg::shadowing_constant_from(self.bound_constant, self.rate_m, self.rate_n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShiftClass {
    pub verdict: ShiftVerdict,
    pub annulus: SpectralAnnulus,
    pub split_point: Option<i64>,
    pub contraction_rates: Option<(f64, f64)>,
    pub splitting: Option<IndexSplit>,
}

/// `max` over window starts `m` in `[lo, hi]` of `sum_{j<p} ln alpha_{m+j}`.
/// `None` bounds are infinite; the range is clamped to the starts that can
/// see the core, which include one pure-tail window on each open side.
fn max_window_log(w: &WeightSequence, p: u32, lo: Option<i64>, hi: Option<i64>) -> f64 {
    let p = p as i64;
    let lo_c = lo.unwrap_or(i64::MIN).max(w.core_start() - p);
    let hi_c = hi.unwrap_or(i64::MAX).min(w.core_end());
    let mut best = f64::NEG_INFINITY;
    if lo_c <= hi_c {
        for m in lo_c..=hi_c {
            best = best.max(w.log_weight_sum(m, m + p - 1));
        }
    } else if let (Some(l), Some(h)) = (lo, hi) {
        // the whole range sits inside one tail
        if l <= h {
            best = w.log_weight_sum(l, l + p - 1);
        }
    }
    best
}

/// `ln |T_M^p|` for `M = span{e_n : n >= s}`.
fn log_norm_forward(w: &WeightSequence, cut: Cut, p: u32) -> f64 {
    match cut {
        Cut::MinusInfinity => max_window_log(w, p, None, None),
        Cut::At(s) => max_window_log(w, p, Some(s), None),
        Cut::PlusInfinity => f64::NEG_INFINITY,
    }
}

/// `ln |T_N^{-p}|` for `N = span{e_n : n < s}`.
fn log_norm_backward(w: &WeightSequence, cut: Cut, p: u32) -> f64 {
    let neg = |x: f64| -x;
    match cut {
        Cut::PlusInfinity => neg(min_window_log(w, p, None, None)),
        Cut::At(s) => neg(min_window_log(w, p, None, Some(s - 1 - p as i64))),
        Cut::MinusInfinity => f64::NEG_INFINITY,
    }
}

fn min_window_log(w: &WeightSequence, p: u32, lo: Option<i64>, hi: Option<i64>) -> f64 {
    let pi = p as i64;
    let lo_c = lo.unwrap_or(i64::MIN).max(w.core_start() - pi);
    let hi_c = hi.unwrap_or(i64::MAX).min(w.core_end());
    let mut best = f64::INFINITY;
    if lo_c <= hi_c {
        for m in lo_c..=hi_c {
            best = best.min(w.log_weight_sum(m, m + pi - 1));
        }
    } else if let Some(h) = hi {
        best = w.log_weight_sum(h, h + pi - 1);
    }
    best
}

/// Smallest `p` with `log_norm(p) < 0`, returned with the rate `exp(log_norm(p)/p)`.
fn certify(log_norm: impl Fn(u32) -> f64) -> Option<(f64, u32)> {
    (1..=MAX_CERTIFICATE_POWER).find_map(|p| {
        let l = log_norm(p);
        (l < 0.0).then(|| ((l / p as f64).exp(), p))
    })
}

/// `max_{r < p} |T^r| / rate^r`, which bounds `|T^k| / rate^k` for every `k`
/// once `|T^p| <= rate^p`.
fn bound_constant(log_norm: impl Fn(u32) -> f64, rate: f64, power: u32) -> f64 {
    let lr = rate.ln();
    (1..power)
        .map(|r| (log_norm(r) - r as f64 * lr).exp())
        .fold(1.0, f64::max)
}

/// Certified contraction rates for a splitting at `cut`; `None` if either part fails.
pub fn certify_split(w: &WeightSequence, cut: Cut) -> Option<IndexSplit> {
    let (rate_m, power_m) = match cut {
        Cut::PlusInfinity => (0.0, 1),
        _ => certify(|p| log_norm_forward(w, cut, p))?,
    };
    let (rate_n, power_n) = match cut {
        Cut::MinusInfinity => (0.0, 1),
        _ => certify(|p| log_norm_backward(w, cut, p))?,
    };
    let mut c: f64 = 1.0;
    if power_m > 1 {
        c = c.max(bound_constant(|p| log_norm_forward(w, cut, p), rate_m, power_m));
    }
    if power_n > 1 {
        c = c.max(bound_constant(|p| log_norm_backward(w, cut, p), rate_n, power_n));
    }
    Some(IndexSplit {
        cut,
        rate_m,
        rate_n,
        power_m,
        power_n,
        bound_constant: c,
    })
}

/// Classification by the tail constants.
///
/// A shifted hyperbolic shift is split at the end of the core: there the
/// forward part only sees the right tail, and the backward part is
/// certified with the smallest power of `T_N^{-1}` whose norm drops below 1.
pub fn classify(w: &WeightSequence) -> ShiftClass {
    let (a, b) = (w.left_tail(), w.right_tail());
    let annulus = spectrum_annulus(w);
    let (verdict, cut) = if a == 1.0 || b == 1.0 {
        (ShiftVerdict::Boundary, None)
    } else if a > 1.0 && b > 1.0 {
        (ShiftVerdict::UniformExpansion, Some(Cut::PlusInfinity))
    } else if a < 1.0 && b < 1.0 {
        (ShiftVerdict::UniformContraction, Some(Cut::MinusInfinity))
    } else if a > 1.0 {
        (ShiftVerdict::ShiftedHyperbolic, Some(Cut::At(w.core_end())))
    } else {
        (ShiftVerdict::NotGeneralizedHyperbolic, None)
    };
    let splitting = cut.map(|c| certify_split(w, c).expect("tail rates certify every GH split"));
    let (split_point, contraction_rates) = match (verdict, splitting) {
        (ShiftVerdict::ShiftedHyperbolic, Some(s)) => (s.split_point(), Some((s.rate_m, s.rate_n))),
        _ => (None, None),
    };
    ShiftClass {
        verdict,
        annulus,
        split_point,
        contraction_rates,
        splitting,
    }
}

/// First index `n` with `alpha_n > alpha_{n+1}`, if any.
pub fn hyponormality_violation(w: &WeightSequence) -> Option<i64> {
    let (lo, hi) = w.support_window();
    (lo..=hi).find(|&n| w.weight(n) > w.weight(n + 1))
}

/// `T*T >= TT*`, i.e. `alpha_{n-1} <= alpha_n` for every `n`.
pub fn is_hyponormal(w: &WeightSequence) -> bool {
    hyponormality_violation(w).is_none()
}

/// `|T*T - TT*| = sup_n |alpha_n^2 - alpha_{n-1}^2|`.
pub fn commutator_defect(w: &WeightSequence) -> f64 {
    let (lo, hi) = w.support_window();
    (lo..=hi + 1)
        .map(|n| (w.weight(n).powi(2) - w.weight(n - 1).powi(2)).abs())
        .fold(0.0, f64::max)
}

/// Weights of `H W H^{-1}` for `H = diag(d_n)`: `alpha_n d_{n+1} / d_n`.
pub fn diagonal_conjugate(w: &WeightSequence, d: &WeightSequence) -> Result<WeightSequence> {
    if d.left_tail() != d.right_tail() {
        return Err(LabError::UnboundedConjugator {
            left: d.left_tail(),
            right: d.right_tail(),
        });
    }
    let start = w.core_start().min(d.core_start() - 1);
    let end = w.core_end().max(d.core_end());
    let core = (start..end)
        .map(|n| w.weight(n) * d.weight(n + 1) / d.weight(n))
        .collect();
    Ok(WeightSequence::canonical(start, core, w.left_tail(), w.right_tail()))
}

/// Compression of the shift to `span{e_from, ..., e_to}`: entry `(i+1, i)` is `alpha_{from+i}`.
pub fn truncate_to_dense(w: &WeightSequence, from: i64, to: i64) -> Result<ComplexMatrix> {
    let dim = window_dim(from, to)?;
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim - 1 {
        m[(i + 1, i)] = Complex64::new(w.weight(from + i as i64), 0.0);
    }
    Ok(m)
}

/// Cyclic closure of the truncation: additionally `e_to -> alpha_to e_from`.
///
/// Unlike the compression this is invertible, so its polar factors and
/// Aluthge transform exist; interior entries see the same weights as the
/// infinite shift.
pub fn truncate_to_dense_periodic(w: &WeightSequence, from: i64, to: i64) -> Result<ComplexMatrix> {
    let mut m = truncate_to_dense(w, from, to)?;
    let dim = m.dim();
    m[(0, dim - 1)] += Complex64::new(w.weight(to), 0.0);
    Ok(m)
}

fn window_dim(from: i64, to: i64) -> Result<usize> {
    let size = to.saturating_sub(from).saturating_add(1);
    if size < 1 {
        return Err(LabError::InvalidInput(format!("empty window [{from}, {to}]")));
    }
    if size > MAX_DIM as i64 {
        return Err(LabError::WindowTooLarge {
            size,
            limit: MAX_DIM as i64,
        });
    }
    Ok(size as usize)
}

/// `|W_a - W_b| = sup_n |alpha_n - beta_n|`, exact.
pub fn shift_distance(a: &WeightSequence, b: &WeightSequence) -> f64 {
    let lo = a.core_start().min(b.core_start()) - 1;
    let hi = a.core_end().max(b.core_end());
    let tails = (a.left_tail() - b.left_tail())
        .abs()
        .max((a.right_tail() - b.right_tail()).abs());
    (lo..=hi)
        .map(|n| (a.weight(n) - b.weight(n)).abs())
        .fold(tails, f64::max)
}

/// `min_c sup_n |alpha_n - c| = (sup - inf) / 2`: distance to the nearest constant-weight shift.
pub fn distance_to_constant_shifts(w: &WeightSequence) -> f64 {
    (w.sup() - w.inf()) / 2.0
}
