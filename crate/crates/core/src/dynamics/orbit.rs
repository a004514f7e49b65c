use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::operator::{DenseOperator, LinearDynamics};
use super::vector::{DenseVector, LatticeVector, StateVector};
use crate::error::{LabError, Result};
use crate::format::float17;
use crate::shift::{ShiftOperator, WeightSequence};

pub const SHIFT_HORIZON_LIMIT: usize = 10_000;
pub const DENSE_HORIZON_LIMIT: usize = 1_000;
/// Slack on log-norm comparisons against `ln r`, absorbing product rounding.
const LOG_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    Shift,
    Dense,
}

/// `|T^n x|` for `n` in `[-horizon, horizon]`, with logarithms that stay
/// finite where the norms overflow.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitSegment<V> {
    pub backend: Backend,
    pub center: V,
    pub horizon: usize,
    pub norms: Vec<f64>,
    pub log_norms: Vec<f64>,
}

impl<V> OrbitSegment<V> {
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.horizon as i64)..=self.horizon as i64
    }

    pub fn log_norm(&self, n: i64) -> f64 {
        self.log_norms[(n + self.horizon as i64) as usize]
    }

    pub fn norm(&self, n: i64) -> f64 {
        self.norms[(n + self.horizon as i64) as usize]
    }

    /// Rows `n,norm,log_norm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,norm,log_norm\n");
        for ((n, x), l) in self.indices().zip(&self.norms).zip(&self.log_norms) {
            let _ = writeln!(out, "{n},{},{}", float17(*x), float17(*l));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HomoclinicReport {
    pub r: f64,
    pub horizon: usize,
    /// Least `N` with `|T^n x| <= r` for every `|n| >= N`.
    pub witness_index: Option<i64>,
    pub is_r_homoclinic_at_horizon: bool,
    /// Some tail grows geometrically, so no `r` works.
    pub certified_divergent: bool,
    /// Decided for all of `Z` rather than on the sampled window.
    pub exact: bool,
    /// `T^n x -> 0` in both directions; only known when exact.
    pub homoclinic: Option<bool>,
    pub forward_ratio: Option<f64>,
    pub backward_ratio: Option<f64>,
}

impl HomoclinicReport {
    /// Rows `field,value`.
    pub fn to_csv(&self) -> String {
        let opt = |x: Option<String>| x.unwrap_or_default();
        format!(
            "field,value\nr,{}\nhorizon,{}\nwitness_index,{}\nis_r_homoclinic_at_horizon,{}\ncertified_divergent,{}\nexact,{}\nhomoclinic,{}\nforward_ratio,{}\nbackward_ratio,{}\n",
            float17(self.r),
            self.horizon,
            opt(self.witness_index.map(|n| n.to_string())),
            self.is_r_homoclinic_at_horizon,
            self.certified_divergent,
            self.exact,
            opt(self.homoclinic.map(|b| b.to_string())),
            opt(self.forward_ratio.map(float17)),
            opt(self.backward_ratio.map(float17)),
        )
    }
}

/// Bounded-orbit membership, `sup_n |T^n x| < infinity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EcReport {
    pub member: bool,
    pub exact: bool,
    /// `sup_n |T^n x|` over `Z` when exact and bounded, else over the window.
    pub sup_norm: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Orbit queries shared by both backends.
pub trait OrbitAnalysis: LinearDynamics {
    const HORIZON_LIMIT: usize;

    fn orbit_norms(&self, x: &Self::Vector, horizon: usize) -> Result<OrbitSegment<Self::Vector>>;
    fn is_r_homoclinic(&self, x: &Self::Vector, r: f64, horizon: usize) -> Result<HomoclinicReport>;
    fn ec_membership(&self, x: &Self::Vector, bound: f64, horizon: usize) -> Result<EcReport>;
}

fn check_horizon(horizon: usize, limit: usize) -> Result<()> {
    if horizon > limit {
        return Err(LabError::HorizonTooLarge { horizon, limit });
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(LabError::InvalidInput(format!("radius {r} must be positive and finite")))
    }
}

/// `ln sqrt(sum exp(2 l_i))` without overflow.
fn log_hypot(logs: &[f64]) -> f64 {
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + 0.5 * logs.iter().map(|l| (2.0 * (l - top)).exp()).sum::<f64>().ln()
}

/// `|T^n x|` from weight products; `T^n` maps distinct basis vectors to distinct ones.
pub fn shift_orbit_norm(w: &WeightSequence, x: &LatticeVector, n: i64) -> f64 {
    let parts: Vec<f64> = x
        .iter()
        .map(|(m, c)| {
            let path = if n >= 0 {
                w.weight_product(m, m + n - 1)
            } else {
                1.0 / w.weight_product(m + n, m - 1)
            };
            c.norm() * path
        })
        .collect();
    let scale = parts.iter().copied().fold(0.0, f64::max);
    if parts.len() == 1 || scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * parts.iter().map(|p| (p / scale).powi(2)).sum::<f64>().sqrt()
}

/// `ln |T^n x|` from log-weight sums, finite where [`shift_orbit_norm`] overflows.
pub fn shift_log_orbit_norm(w: &WeightSequence, x: &LatticeVector, n: i64) -> f64 {
    let logs: Vec<f64> = x
        .iter()
        .map(|(m, c)| {
            let path = if n >= 0 {
                w.log_weight_sum(m, m + n - 1)
            } else {
                -w.log_weight_sum(m + n, m - 1)
            };
            c.norm().ln() + path
        })
        .collect();
    log_hypot(&logs)
}

enum Tail {
    /// Below `r` from this step on.
    Within(i64),
    Bounded,
    Divergent,
}

/// Decides one direction of a shift orbit. `f(j)` is the log-norm after `j`
/// steps; from step `k` on it changes by exactly `log_ratio` per step.
fn decide_tail(f: impl Fn(i64) -> f64, k: i64, log_ratio: f64, log_r: f64) -> Tail {
    let ok = |j: i64| f(j) <= log_r + LOG_SLACK;
    if log_ratio > 0.0 {
        return Tail::Divergent;
    }
    let mut first = k;
    if !ok(k) {
        if log_ratio == 0.0 {
            return Tail::Bounded;
        }
        let steps = ((f(k) - log_r) / -log_ratio).ceil().min(1e15) as i64;
        first = k + steps.max(0);
        while !ok(first) {
            first += 1;
        }
        while first > k && ok(first - 1) {
            first -= 1;
        }
        if first > k {
            return Tail::Within(first);
        }
    }
    while first > 0 && ok(first - 1) {
        first -= 1;
    }
    Tail::Within(first)
}

/// Steps after which each direction of the orbit of `x` only sees a tail.
fn tail_starts(w: &WeightSequence, x: &LatticeVector) -> (i64, i64) {
    let (lo, hi) = x.support_bounds().unwrap_or((0, 0));
    ((w.core_end() - lo).max(0), (hi - w.core_start()).max(0))
}

impl OrbitAnalysis for ShiftOperator {
    const HORIZON_LIMIT: usize = SHIFT_HORIZON_LIMIT;

    fn orbit_norms(&self, x: &LatticeVector, horizon: usize) -> Result<OrbitSegment<LatticeVector>> {
        check_horizon(horizon, SHIFT_HORIZON_LIMIT)?;
        let h = horizon as i64;
        let norms = (-h..=h).map(|n| shift_orbit_norm(&self.weights, x, n)).collect();
        let log_norms = (-h..=h).map(|n| shift_log_orbit_norm(&self.weights, x, n)).collect();
        Ok(OrbitSegment {
            backend: Backend::Shift,
            center: x.clone(),
            horizon,
            norms,
            log_norms,
        })
    }

    fn is_r_homoclinic(&self, x: &LatticeVector, r: f64, horizon: usize) -> Result<HomoclinicReport> {
        check_radius(r)?;
        check_horizon(horizon, SHIFT_HORIZON_LIMIT)?;
        let w = &self.weights;
        let (fwd_ratio, bwd_ratio) = (w.right_tail(), 1.0 / w.left_tail());
        let mut report = HomoclinicReport {
            r,
            horizon,
            witness_index: Some(0),
            is_r_homoclinic_at_horizon: true,
            certified_divergent: false,
            exact: true,
            homoclinic: Some(true),
            forward_ratio: Some(fwd_ratio),
            backward_ratio: Some(bwd_ratio),
        };
        if x.is_zero() {
            return Ok(report);
        }
        let (kf, kb) = tail_starts(w, x);
        let log_r = r.ln();
        let fwd = decide_tail(|j| shift_log_orbit_norm(w, x, j), kf, fwd_ratio.ln(), log_r);
        let bwd = decide_tail(|j| shift_log_orbit_norm(w, x, -j), kb, bwd_ratio.ln(), log_r);
        report.certified_divergent = matches!(fwd, Tail::Divergent) || matches!(bwd, Tail::Divergent);
        report.witness_index = match (fwd, bwd) {
            (Tail::Within(a), Tail::Within(b)) => Some(a.max(b)),
            _ => None,
        };
        report.is_r_homoclinic_at_horizon = report.witness_index.is_some_and(|n| n <= horizon as i64);
        report.homoclinic = Some(fwd_ratio < 1.0 && bwd_ratio < 1.0);
        Ok(report)
    }

    fn ec_membership(&self, x: &LatticeVector, bound: f64, horizon: usize) -> Result<EcReport> {
        check_horizon(horizon, SHIFT_HORIZON_LIMIT)?;
        let w = &self.weights;
        if x.is_zero() {
            return Ok(EcReport {
                member: true,
                exact: true,
                sup_norm: 0.0,
                bound,
                within_bound: bound >= 0.0,
            });
        }
        let member = w.right_tail() <= 1.0 && w.left_tail() >= 1.0;
        let (kf, kb) = tail_starts(w, x);
        let (lo, hi) = if member { (-kb, kf) } else { (-(horizon as i64), horizon as i64) };
        let sup_norm = (lo..=hi).map(|n| shift_orbit_norm(w, x, n)).fold(0.0, f64::max);
        Ok(EcReport {
            member,
            exact: true,
            sup_norm,
            bound,
            within_bound: member && sup_norm <= bound,
        })
    }
}

impl DenseOperator {
    /// `ln |A^n x|` for `n = 0..=steps` (or `0, -1, ...` with `backward`), renormalising each step.
    fn log_norm_path(&self, x: &DenseVector, steps: usize, backward: bool) -> Vec<f64> {
        let n0 = x.norm();
        let mut out = Vec::with_capacity(steps + 1);
        out.push(n0.ln());
        if n0 == 0.0 {
            out.resize(steps + 1, f64::NEG_INFINITY);
            return out;
        }
        let mut y = x.scaled(1.0 / n0);
        let mut acc = n0.ln();
        for _ in 0..steps {
            y = if backward { self.apply_inverse(&y) } else { self.apply(&y) };
            let s = y.norm();
            acc += s.ln();
            out.push(acc);
            if s == 0.0 || !s.is_finite() {
                out.resize(steps + 1, acc);
                break;
            }
            y = y.scaled(1.0 / s);
        }
        out
    }
}

impl OrbitAnalysis for DenseOperator {
    const HORIZON_LIMIT: usize = DENSE_HORIZON_LIMIT;

    fn orbit_norms(&self, x: &DenseVector, horizon: usize) -> Result<OrbitSegment<DenseVector>> {
        check_horizon(horizon, DENSE_HORIZON_LIMIT)?;
        self.check_vector(x)?;
        let fwd = self.log_norm_path(x, horizon, false);
        let bwd = self.log_norm_path(x, horizon, true);
        let log_norms: Vec<f64> = bwd.iter().rev().chain(fwd.iter().skip(1)).copied().collect();
        Ok(OrbitSegment {
            backend: Backend::Dense,
            center: x.clone(),
            horizon,
            norms: log_norms.iter().map(|l| l.exp()).collect(),
            log_norms,
        })
    }

    /// Decided on the sampled window `[-horizon, horizon]` only.
    fn is_r_homoclinic(&self, x: &DenseVector, r: f64, horizon: usize) -> Result<HomoclinicReport> {
        check_radius(r)?;
        let seg = self.orbit_norms(x, horizon)?;
        let log_r = r.ln() + LOG_SLACK;
        let h = horizon as i64;
        let mut witness = None;
        for n in (0..=h).rev() {
            if seg.log_norm(n) <= log_r && seg.log_norm(-n) <= log_r {
                witness = Some(n);
            } else {
                break;
            }
        }
        Ok(HomoclinicReport {
            r,
            horizon,
            witness_index: witness,
            is_r_homoclinic_at_horizon: witness.is_some(),
            certified_divergent: false,
            exact: false,
            homoclinic: None,
            forward_ratio: None,
            backward_ratio: None,
        })
    }

    fn ec_membership(&self, x: &DenseVector, bound: f64, horizon: usize) -> Result<EcReport> {
        let seg = self.orbit_norms(x, horizon)?;
        let sup_norm = seg.norms.iter().copied().fold(0.0, f64::max);
        Ok(EcReport {
            member: sup_norm <= bound,
            exact: false,
            sup_norm,
            bound,
            within_bound: sup_norm <= bound,
        })
    }
}

/// Rescales an `r'`-homoclinic `x` to `(r / r') x` and checks it is
/// `r`-homoclinic at the same horizon and witness.
pub fn homoclinic_scaling_check<O: OrbitAnalysis>(
    op: &O,
    x: &O::Vector,
    r: f64,
    r_prime: f64,
    horizon: usize,
) -> Result<bool> {
    check_radius(r)?;
    let base = op.is_r_homoclinic(x, r_prime, horizon)?;
    if !base.is_r_homoclinic_at_horizon {
        return Err(LabError::InvalidInput(format!(
            "vector is not {r_prime}-homoclinic at horizon {horizon}"
        )));
    }
    let scaled = op.is_r_homoclinic(&x.scaled(r / r_prime), r, horizon)?;
    Ok(scaled.is_r_homoclinic_at_horizon && scaled.witness_index <= base.witness_index)
}

/// Checks that `Tx` and `T^{-1}x` stay `r`-homoclinic with witness at most one larger.
pub fn invariance_check<O: OrbitAnalysis>(op: &O, x: &O::Vector, r: f64, horizon: usize) -> Result<bool> {
    let base = op.is_r_homoclinic(x, r, horizon)?;
    let Some(n) = base.witness_index else {
        return Ok(true);
    };
    let wider = horizon + 1;
    for y in [op.apply(x), op.apply_inverse(x)] {
        let rep = op.is_r_homoclinic(&y, r, wider)?;
        if !rep.witness_index.is_some_and(|m| m <= n + 1) {
            return Ok(false);
        }
    }
    Ok(true)
}
