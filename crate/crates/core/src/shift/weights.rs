use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Positive bilateral weights that are constant outside a finite core window.
///
/// `weight(n)` is `left_tail` for `n < core_start`, `core[n - core_start]`
/// inside the window and `right_tail` for `n >= core_end()`. The core never
/// begins with the left tail value nor ends with the right tail value, and a
/// constant sequence has an empty core at index 0, so equal sequences have
/// equal representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightJson", into = "WeightJson")]
pub struct WeightSequence {
    core_start: i64,
    core: Vec<f64>,
    left_tail: f64,
    right_tail: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct WeightJson {
    core_start: i64,
    core: Vec<f64>,
    left_tail: f64,
    right_tail: f64,
}

impl TryFrom<WeightJson> for WeightSequence {
    type Error = LabError;
    fn try_from(j: WeightJson) -> Result<Self> {
        WeightSequence::new(j.core_start, j.core, j.left_tail, j.right_tail)
    }
}

impl From<WeightSequence> for WeightJson {
    fn from(w: WeightSequence) -> Self {
        WeightJson {
            core_start: w.core_start,
            core: w.core,
            left_tail: w.left_tail,
            right_tail: w.right_tail,
        }
    }
}

fn check_weight(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(LabError::InvalidInput(format!(
            "{what} must be positive and finite, got {x}"
        )))
    }
}

impl WeightSequence {
    pub fn new(core_start: i64, core: Vec<f64>, left_tail: f64, right_tail: f64) -> Result<Self> {
        check_weight(left_tail, "left tail")?;
        check_weight(right_tail, "right tail")?;
        for &x in &core {
            check_weight(x, "core weight")?;
        }
        Ok(Self::canonical(core_start, core, left_tail, right_tail))
    }

    /// Canonicalises already-validated data.
    pub(crate) fn canonical(mut core_start: i64, mut core: Vec<f64>, left: f64, right: f64) -> Self {
        let lead = core.iter().take_while(|&&x| x == left).count();
        core.drain(..lead);
        core_start += lead as i64;
        while core.last() == Some(&right) {
            core.pop();
        }
        if core.is_empty() && left == right {
            core_start = 0;
        }
        Self {
            core_start,
            core,
            left_tail: left,
            right_tail: right,
        }
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(0, Vec::new(), c, c)
    }

    /// `left` for `n < split`, `right` for `n >= split`.
    pub fn two_tailed(left: f64, right: f64, split: i64) -> Result<Self> {
        Self::new(split, Vec::new(), left, right)
    }

    pub fn core_start(&self) -> i64 {
        self.core_start
    }

    /// One past the last core index; first index of the right tail.
    pub fn core_end(&self) -> i64 {
        self.core_start + self.core.len() as i64
    }

    pub fn core(&self) -> &[f64] {
        &self.core
    }

    pub fn left_tail(&self) -> f64 {
        self.left_tail
    }

    pub fn right_tail(&self) -> f64 {
        self.right_tail
    }

    pub fn is_constant(&self) -> bool {
        self.core.is_empty() && self.left_tail == self.right_tail
    }

    /// `alpha_n` for any integer `n`.
    #[inline]
    pub fn weight(&self, n: i64) -> f64 {
        if n < self.core_start {
            self.left_tail
        } else if n >= self.core_end() {
            self.right_tail
        } else {
            self.core[(n - self.core_start) as usize]
        }
    }

    /// `ln alpha_n`.
    #[inline]
    pub fn log_weight(&self, n: i64) -> f64 {
        self.weight(n).ln()
    }

    /// Every distinct value the sequence takes: both tails and the core.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        [self.left_tail, self.right_tail]
            .into_iter()
            .chain(self.core.iter().copied())
    }

    /// `inf_n alpha_n`.
    pub fn inf(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    /// `sup_n alpha_n`.
    pub fn sup(&self) -> f64 {
        self.values().fold(0.0, f64::max)
    }

    /// `(a, b)` covering every index whose weight is not determined by a tail
    /// rule alone, widened by one on each side.
    pub fn support_window(&self) -> (i64, i64) {
        (self.core_start - 1, self.core_end())
    }

    /// `prod_{m=a}^{b} alpha_m`, one when `b < a`; may overflow to infinity or underflow to 0.
    pub fn weight_product(&self, a: i64, b: i64) -> f64 {
        if b < a {
            return 1.0;
        }
        let (lc, core, rc) = self.split_range(a, b);
        let pow = |x: f64, k: i64| x.powf(k as f64);
        pow(self.left_tail, lc) * core.iter().product::<f64>() * pow(self.right_tail, rc)
    }

    /// Left-tail count, core slice and right-tail count of `[a, b]`.
    fn split_range(&self, a: i64, b: i64) -> (i64, &[f64], i64) {
        let cs = self.core_start;
        let ce = self.core_end();
        let left_count = (b.min(cs - 1) - a + 1).max(0);
        let right_count = (b - a.max(ce) + 1).max(0);
        let lo = a.max(cs);
        let hi = b.min(ce - 1);
        let core = if hi >= lo {
            &self.core[(lo - cs) as usize..=(hi - cs) as usize]
        } else {
            &[]
        };
        (left_count, core, right_count)
    }

    /// `sum_{m=a}^{b} ln alpha_m`, zero when `b < a`.
    pub fn log_weight_sum(&self, a: i64, b: i64) -> f64 {
        if b < a {
            return 0.0;
        }
        let (lc, core, rc) = self.split_range(a, b);
        let core_sum: f64 = core.iter().map(|x| x.ln()).sum();
        lc as f64 * self.left_tail.ln() + core_sum + rc as f64 * self.right_tail.ln()
    }
}
