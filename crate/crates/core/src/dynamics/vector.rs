use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::vec_norm;

/// Vectors the orbit and shadowing code can work with.
pub trait StateVector: Clone {
    fn norm(&self) -> f64;
    fn zero_like(&self) -> Self;
    /// `self += a * other`.
    fn add_scaled(&mut self, a: f64, other: &Self);

    fn scaled(&self, a: f64) -> Self {
        let mut out = self.zero_like();
        out.add_scaled(a, self);
        out
    }

    fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }
}

pub type DenseVector = Vec<Complex64>;

impl StateVector for Vec<Complex64> {
    fn norm(&self) -> f64 {
        vec_norm(self)
    }

    fn zero_like(&self) -> Self {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }

    fn add_scaled(&mut self, a: f64, other: &Self) {
        for (x, y) in self.iter_mut().zip(other) {
            *x += y * a;
        }
    }
}

/// Finitely supported vector in the two-sided sequence space, in the basis `e_n`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "BTreeMap<i64, Complex64>", into = "BTreeMap<i64, Complex64>")]
pub struct LatticeVector {
    coeffs: BTreeMap<i64, Complex64>,
}

impl From<BTreeMap<i64, Complex64>> for LatticeVector {
    fn from(mut coeffs: BTreeMap<i64, Complex64>) -> Self {
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Self { coeffs }
    }
}

impl From<LatticeVector> for BTreeMap<i64, Complex64> {
    fn from(v: LatticeVector) -> Self {
        v.coeffs
    }
}

impl LatticeVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(n: i64) -> Self {
        Self::from_pairs([(n, Complex64::new(1.0, 0.0))])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (n, c) in pairs {
            *coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.into()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&n, &c)| (n, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    /// Smallest and largest index with a nonzero coefficient.
    pub fn support_bounds(&self) -> Option<(i64, i64)> {
        let lo = *self.coeffs.keys().next()?;
        let hi = *self.coeffs.keys().next_back()?;
        Some((lo, hi))
    }

    /// Keeps the coefficients whose index satisfies `keep`.
    pub fn restricted(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self {
            coeffs: self.coeffs.iter().filter(|(&n, _)| keep(n)).map(|(&n, &c)| (n, c)).collect(),
        }
    }

    /// Applies `e_n -> factor(n) e_{n + offset}`.
    pub fn reindexed(&self, offset: i64, factor: impl Fn(i64) -> f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&n, &c)| (n + offset, c * factor(n))).collect(),
        }
    }
}

impl StateVector for LatticeVector {
    fn norm(&self) -> f64 {
        let scale = self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        scale * self.coeffs.values().map(|c| (c / scale).norm_sqr()).sum::<f64>().sqrt()
    }

    fn zero_like(&self) -> Self {
        Self::zero()
    }

    fn add_scaled(&mut self, a: f64, other: &Self) {
        for (&n, &c) in &other.coeffs {
            let e = self.coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0));
            *e += c * a;
            if *e == Complex64::new(0.0, 0.0) {
                self.coeffs.remove(&n);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_are_pruned() {
        let mut v = LatticeVector::basis(3);
        v.add_scaled(-1.0, &LatticeVector::basis(3));
        assert!(v.is_zero());
        let w = LatticeVector::from_pairs([(1, Complex64::new(0.0, 0.0))]);
        assert!(w.is_zero());
    }

    #[test]
    fn norm_and_json() {
        let v = LatticeVector::from_pairs([(-2, Complex64::new(3.0, 0.0)), (5, Complex64::new(0.0, 4.0))]);
        assert_eq!(v.norm(), 5.0);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"-2":[3.0,0.0],"5":[0.0,4.0]}"#);
        let back: LatticeVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
