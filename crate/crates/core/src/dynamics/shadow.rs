use rand::Rng;
use serde::Serialize;

use super::operator::{DenseOperator, LinearDynamics};
use super::orbit::OrbitAnalysis;
use super::vector::{DenseVector, LatticeVector, StateVector};
use crate::error::{LabError, Result};
use crate::linalg::random::complex_gaussian;
use crate::linalg::{operator_norm, spectral_split, ComplexMatrix, SpectralSplit};
use crate::shift::{classify, IndexSplit, ShiftOperator, WeightSequence};
use crate::SPECTRAL_TOL;

/// Largest half-width accepted by [`build_pseudo_orbit_from_bounded`].
pub const PSEUDO_ORBIT_LIMIT: usize = 2_000_000;

/// `x_n` for `n` in `[start, start + len)`, with `d_n = x_{n+1} - T x_n`.
/// Outside the window the sequence continues as an exact orbit, so the
/// defects there vanish.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PseudoOrbit<V> {
    pub delta: f64,
    pub start: i64,
    pub points: Vec<V>,
    pub defects: Vec<V>,
    pub max_defect: f64,
}

impl<V: StateVector> PseudoOrbit<V> {
    /// Computes the defects and rejects the sequence unless all are below `delta`.
    pub fn from_points<O>(op: &O, start: i64, points: Vec<V>, delta: f64) -> Result<Self>
    where
        O: LinearDynamics<Vector = V>,
    {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(LabError::DeltaTooLarge { delta });
        }
        if points.is_empty() {
            return Err(LabError::InvalidInput("pseudo-orbit has no points".into()));
        }
        let defects: Vec<V> = points
            .windows(2)
            .map(|p| p[1].difference(&op.apply(&p[0])))
            .collect();
        let max_defect = defects.iter().map(StateVector::norm).fold(0.0, f64::max);
        if max_defect >= delta {
            return Err(LabError::InvalidPseudoOrbit {
                defect: max_defect,
                delta,
            });
        }
        Ok(Self {
            delta,
            start,
            points,
            defects,
            max_defect,
        })
    }

    /// Last index of the window.
    pub fn end(&self) -> i64 {
        self.start + self.points.len() as i64 - 1
    }

    pub fn point(&self, n: i64) -> &V {
        &self.points[(n - self.start) as usize]
    }
}

/// `x_n = q^|n| T^n x` on `[-horizon, horizon]` with `q = 1 - delta / (4M)`,
/// `M = sup_n |T^n x|`, so every defect is at most `delta / 4`.
pub fn build_pseudo_orbit_from_bounded<O: OrbitAnalysis>(
    op: &O,
    x: &O::Vector,
    delta: f64,
    horizon: usize,
) -> Result<PseudoOrbit<O::Vector>> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(LabError::DeltaTooLarge { delta });
    }
    if horizon > PSEUDO_ORBIT_LIMIT {
        return Err(LabError::HorizonTooLarge {
            horizon,
            limit: PSEUDO_ORBIT_LIMIT,
        });
    }
    let ec = op.ec_membership(x, f64::INFINITY, horizon.min(O::HORIZON_LIMIT))?;
    if !ec.exact && horizon > O::HORIZON_LIMIT {
        return Err(LabError::HorizonTooLarge {
            horizon,
            limit: O::HORIZON_LIMIT,
        });
    }
    if !ec.member || !ec.sup_norm.is_finite() {
        return Err(LabError::NotBoundedOrbit);
    }
    let q = if ec.sup_norm > 0.0 {
        (1.0 - delta / (4.0 * ec.sup_norm)).max(0.5)
    } else {
        0.5
    };
    if q >= 1.0 {
        return Err(LabError::DeltaTooLarge { delta });
    }
    let h = horizon as i64;
    let mut forward = Vec::with_capacity(horizon + 1);
    let mut backward = Vec::with_capacity(horizon);
    let mut y = x.clone();
    let mut beta = 1.0;
    forward.push(x.clone());
    for _ in 0..h {
        y = op.apply(&y);
        beta *= q;
        forward.push(y.scaled(beta));
    }
    let (mut y, mut beta) = (x.clone(), 1.0);
    for _ in 0..h {
        y = op.apply_inverse(&y);
        beta *= q;
        backward.push(y.scaled(beta));
    }
    let points: Vec<O::Vector> = backward.into_iter().rev().chain(forward).collect();
    PseudoOrbit::from_points(op, -h, points, delta)
}

/// Splitting into a forward-contracted part and a backward-contracted part.
pub trait Splitting: LinearDynamics {
    fn stable_part(&self, v: &Self::Vector) -> Self::Vector;
    fn unstable_part(&self, v: &Self::Vector) -> Self::Vector;
    /// `K` with `sup_n |T^n y - x_n| <= K sup_n |d_n|` for the shadow `y`.
    fn shadowing_constant(&self) -> f64;
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShadowResult<V> {
    /// `y` with `T^n y` tracing `x_n`; taken at `n = 0`.
    pub shadow_point: V,
    pub epsilon: f64,
    /// `|T^n y - x_n|` for `n` in the pseudo-orbit window.
    pub per_step_errors: Vec<f64>,
    pub start: i64,
    #[serde(skip)]
    pub corrections: Vec<V>,
    pub shadowing_constant: f64,
    /// `K * max |d_n|`.
    pub bound: f64,
}

impl<V> ShadowResult<V> {
    pub fn within_bound(&self) -> bool {
        self.epsilon <= self.bound * (1.0 + 1e-9) + f64::EPSILON
    }
}

/// Shadow of a pseudo-orbit through the stable/unstable series.
///
/// `c_n = sum_{k>=0} T^k P_s d_{n-1-k} - sum_{k>=1} T^{-k} P_u d_{n-1+k}` is
/// evaluated by the forward and backward recursions it satisfies, projecting
/// after every step so rounding cannot leak into the growing part; then
/// `c_{n+1} = T c_n + d_n`, so `y_n = x_n - c_n` is an exact orbit.
pub fn shadow<S: Splitting>(sys: &S, po: &PseudoOrbit<S::Vector>) -> Result<ShadowResult<S::Vector>> {
    if po.start > 0 || po.end() < 0 {
        return Err(LabError::InvalidInput(format!(
            "pseudo-orbit window [{}, {}] does not contain 0",
            po.start,
            po.end()
        )));
    }
    let len = po.points.len();
    let zero = po.points[0].zero_like();
    let mut stable = Vec::with_capacity(len);
    stable.push(zero.clone());
    for d in &po.defects {
        let mut next = sys.apply(stable.last().expect("nonempty"));
        next.add_scaled(1.0, &sys.stable_part(d));
        stable.push(sys.stable_part(&next));
    }
    let mut unstable = vec![zero; len];
    for i in (0..len - 1).rev() {
        let mut v = unstable[i + 1].clone();
        v.add_scaled(1.0, &sys.unstable_part(&po.defects[i]));
        unstable[i] = sys.unstable_part(&sys.apply_inverse(&v));
    }
    let corrections: Vec<S::Vector> = stable
        .iter()
        .zip(&unstable)
        .map(|(s, u)| s.difference(u))
        .collect();
    let per_step_errors: Vec<f64> = corrections.iter().map(StateVector::norm).collect();
    let epsilon = per_step_errors.iter().copied().fold(0.0, f64::max);
    let zero_at = (-po.start) as usize;
    let shadow_point = po.points[zero_at].difference(&corrections[zero_at]);
    let k = sys.shadowing_constant();
    Ok(ShadowResult {
        shadow_point,
        epsilon,
        per_step_errors,
        start: po.start,
        corrections,
        shadowing_constant: k,
        bound: k * po.max_defect,
    })
}

/// `max_n |c_{n+1} - T c_n - d_n|`.
pub fn telescoping_residual<S: Splitting>(
    sys: &S,
    po: &PseudoOrbit<S::Vector>,
    res: &ShadowResult<S::Vector>,
) -> f64 {
    po.defects
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut r = res.corrections[i + 1].difference(&sys.apply(&res.corrections[i]));
            r.add_scaled(-1.0, d);
            r.norm()
        })
        .fold(0.0, f64::max)
}

/// Hyperbolic matrix with its Riesz projections.
#[derive(Debug, Clone)]
pub struct DenseSplitting {
    pub op: DenseOperator,
    pub split: SpectralSplit,
}

impl DenseSplitting {
    pub fn new(a: &ComplexMatrix, tol: f64) -> Result<Self> {
        let split = spectral_split(a, tol)?;
        Ok(Self {
            op: DenseOperator::new(a.clone())?,
            split,
        })
    }

    /// Bounded exact orbit on `[0, steps]` plus noise, with every defect below `delta`.
    ///
    /// The orbit is `A^n P_s a + A^{n - steps} P_u b`; each part is iterated in
    /// its contracting direction and re-projected every step.
    pub fn noisy_pseudo_orbit<R: Rng>(
        &self,
        rng: &mut R,
        steps: usize,
        delta: f64,
    ) -> Result<PseudoOrbit<DenseVector>> {
        let dim = self.op.dim();
        let ps = &self.split.stable_projection;
        let pu = &self.split.unstable_projection;
        let unit = |rng: &mut R| {
            let v: DenseVector = (0..dim).map(|_| complex_gaussian(rng)).collect();
            let n = v.norm();
            v.scaled(1.0 / n)
        };
        let (a, b) = (unit(rng), unit(rng));
        let mut stable = Vec::with_capacity(steps + 1);
        stable.push(ps.mul_vec(&a));
        for _ in 0..steps {
            let next = ps.mul_vec(&self.op.apply(stable.last().expect("nonempty")));
            stable.push(next);
        }
        let mut unstable = vec![pu.mul_vec(&b); steps + 1];
        for i in (0..steps).rev() {
            unstable[i] = pu.mul_vec(&self.op.apply_inverse(&unstable[i + 1]));
        }
        let norm_a = operator_norm(self.op.matrix(), 1e-10)?;
        let eta = 0.5 * delta / (1.0 + norm_a);
        let points = stable
            .iter()
            .zip(&unstable)
            .map(|(s, u)| {
                let mut x = s.clone();
                x.add_scaled(1.0, u);
                let e = unit(rng);
                let size = eta * rng.random_range(0.0..1.0);
                x.add_scaled(size, &e);
                x
            })
            .collect();
        PseudoOrbit::from_points(&self.op, 0, points, delta)
    }
}

impl LinearDynamics for DenseSplitting {
    type Vector = DenseVector;

    fn apply(&self, x: &DenseVector) -> DenseVector {
        self.op.apply(x)
    }

    fn apply_inverse(&self, x: &DenseVector) -> DenseVector {
        self.op.apply_inverse(x)
    }
}

impl Splitting for DenseSplitting {
    fn stable_part(&self, v: &DenseVector) -> DenseVector {
        self.split.stable_projection.mul_vec(v)
    }

    fn unstable_part(&self, v: &DenseVector) -> DenseVector {
        self.split.unstable_projection.mul_vec(v)
    }

    fn shadowing_constant(&self) -> f64 {
        self.split.shadowing_constant()
    }
}

/// Generalized hyperbolic shift with its coordinate splitting.
#[derive(Debug, Clone)]
pub struct ShiftSplitting {
    pub op: ShiftOperator,
    pub split: IndexSplit,
}

impl ShiftSplitting {
    pub fn new(w: &WeightSequence) -> Result<Self> {
        let class = classify(w);
        let split = class.splitting.ok_or_else(|| LabError::NotGeneralizedHyperbolic {
            verdict: format!("{:?}", class.verdict),
        })?;
        Ok(Self {
            op: w.clone().into(),
            split,
        })
    }
}

impl LinearDynamics for ShiftSplitting {
    type Vector = LatticeVector;

    fn apply(&self, x: &LatticeVector) -> LatticeVector {
        self.op.apply(x)
    }

    fn apply_inverse(&self, x: &LatticeVector) -> LatticeVector {
        self.op.apply_inverse(x)
    }
}

impl Splitting for ShiftSplitting {
    fn stable_part(&self, v: &LatticeVector) -> LatticeVector {
        v.restricted(|n| self.split.cut.in_m(n))
    }

    fn unstable_part(&self, v: &LatticeVector) -> LatticeVector {
        v.restricted(|n| !self.split.cut.in_m(n))
    }

    fn shadowing_constant(&self) -> f64 {
        self.split.shadowing_constant()
    }
}

/// Shadow of a pseudo-orbit of a hyperbolic matrix.
pub fn shadow_solve(
    a: &ComplexMatrix,
    po: &PseudoOrbit<DenseVector>,
    tol: f64,
) -> Result<ShadowResult<DenseVector>> {
    let sys = DenseSplitting::new(a, tol)?;
    if po.points[0].len() != a.dim() {
        return Err(LabError::DimensionMismatch {
            expected: a.dim(),
            got: po.points[0].len(),
        });
    }
    shadow(&sys, po)
}

/// `K = C/(1 - rho_s) + C rho_u^{-1} / (1 - rho_u^{-1})`.
pub fn shadowing_constant_estimate(a: &ComplexMatrix) -> Result<f64> {
    Ok(spectral_split(a, SPECTRAL_TOL)?.shadowing_constant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::rng;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn diagonal_constant() {
        let k = shadowing_constant_estimate(&ComplexMatrix::from_real_diagonal(&[0.5, 2.0])).unwrap();
        assert!((k - 3.0).abs() < 1e-12);
        let k = shadowing_constant_estimate(&ComplexMatrix::from_real_diagonal(&[1.0 / 3.0, 3.0])).unwrap();
        assert!((k - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exact_orbit_shadows_itself() {
        let a = ComplexMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 2.0]]);
        let op = DenseOperator::new(a.clone()).unwrap();
        let mut pts = vec![vec![c(1.0), c(1.0)]];
        for _ in 0..10 {
            let next = op.apply(pts.last().unwrap());
            pts.push(next);
        }
        let po = PseudoOrbit::from_points(&op, 0, pts.clone(), 1e-3).unwrap();
        let res = shadow_solve(&a, &po, 1e-6).unwrap();
        assert!(res.epsilon < 1e-12);
        assert!(res.shadow_point.difference(&pts[0]).norm() < 1e-12);
    }

    #[test]
    fn noisy_diagonal_orbit() {
        let a = ComplexMatrix::from_real_diagonal(&[0.5, 2.0]);
        let op = DenseOperator::new(a.clone()).unwrap();
        let mut r = rng(7);
        let mut y = vec![c(1.0), c(1.0)];
        let mut pts = Vec::new();
        for _ in 0..30 {
            let noise: Vec<Complex64> = (0..2).map(|_| c(r.random_range(-1e-4..1e-4))).collect();
            let mut x = y.clone();
            x.add_scaled(1.0, &noise);
            pts.push(x);
            y = op.apply(&y);
        }
        let po = PseudoOrbit::from_points(&op, 0, pts, 1e-3).unwrap();
        let res = shadow_solve(&a, &po, 1e-6).unwrap();
        assert!(res.epsilon <= 10.0 * 1e-4, "epsilon {}", res.epsilon);
        assert!(res.within_bound());
        let sys = DenseSplitting::new(&a, 1e-6).unwrap();
        assert!(telescoping_residual(&sys, &po, &res) < 1e-8);
    }

    #[test]
    fn least_squares_agrees_on_short_window() {
        let a = ComplexMatrix::from_real_diagonal(&[0.5, 2.0]);
        let sys = DenseSplitting::new(&a, 1e-6).unwrap();
        let mut r = rng(3);
        let po = sys.noisy_pseudo_orbit(&mut r, 12, 1e-3).unwrap();
        let res = shadow(&sys, &po).unwrap();
        // minimise sum_n |A^n y - x_n|^2: normal equations are diagonal here
        let mut y_ls = vec![c(0.0); 2];
        for (i, lam) in [0.5f64, 2.0].iter().enumerate() {
            let (mut num, mut den) = (c(0.0), 0.0);
            for (n, x) in po.points.iter().enumerate() {
                let p = lam.powi(n as i32);
                num += x[i] * p;
                den += p * p;
            }
            y_ls[i] = num / den;
        }
        assert!(res.shadow_point.difference(&y_ls).norm() < 10.0 * po.delta);
    }

    #[test]
    fn rejects_large_defects() {
        let op = DenseOperator::new(ComplexMatrix::identity(1)).unwrap();
        let err = PseudoOrbit::from_points(&op, 0, vec![vec![c(0.0)], vec![c(1.0)]], 0.5).unwrap_err();
        assert!(matches!(err, LabError::InvalidPseudoOrbit { .. }));
    }

    #[test]
    fn bounded_pseudo_orbits() {
        let sh: ShiftOperator = WeightSequence::two_tailed(2.0, 0.5, 1).unwrap().into();
        let po = build_pseudo_orbit_from_bounded(&sh, &LatticeVector::basis(1), 0.1, 50).unwrap();
        assert!(po.max_defect < 0.1);
        assert_eq!(po.points.len(), 101);
        assert_eq!(po.point(0), &LatticeVector::basis(1));
        let zero = build_pseudo_orbit_from_bounded(&sh, &LatticeVector::zero(), 0.1, 5).unwrap();
        assert_eq!(zero.max_defect, 0.0);
        let th = std::f64::consts::FRAC_PI_3;
        let rot = DenseOperator::new(ComplexMatrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]])).unwrap();
        let po = build_pseudo_orbit_from_bounded(&rot, &vec![c(1.0), c(0.0)], 0.05, 200).unwrap();
        assert!(po.max_defect < 0.05);
        let rep: ShiftOperator = WeightSequence::two_tailed(0.5, 2.0, 1).unwrap().into();
        assert!(matches!(
            build_pseudo_orbit_from_bounded(&rep, &LatticeVector::basis(0), 0.1, 5),
            Err(LabError::NotBoundedOrbit)
        ));
        assert!(matches!(
            build_pseudo_orbit_from_bounded(&sh, &LatticeVector::basis(0), -1.0, 5),
            Err(LabError::DeltaTooLarge { .. })
        ));
    }

    #[test]
    fn shift_shadow_of_damped_pseudo_orbit() {
        let w = WeightSequence::two_tailed(2.0, 0.5, 1).unwrap();
        let sys = ShiftSplitting::new(&w).unwrap();
        let x = LatticeVector::basis(3);
        let po = build_pseudo_orbit_from_bounded(&sys.op, &x, 0.01, 2000).unwrap();
        let res = shadow(&sys, &po).unwrap();
        assert!(res.within_bound());
        assert!(telescoping_residual(&sys, &po, &res) < 1e-10);
        assert!(res.shadow_point.difference(&x).norm() <= res.bound);
        assert!(ShiftSplitting::new(&WeightSequence::two_tailed(0.5, 2.0, 1).unwrap()).is_err());
    }
}
