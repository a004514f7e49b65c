//! Complex Schur decomposition: Householder reduction to Hessenberg form
//! followed by single-shift QR sweeps with Givens rotations.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{LabError, Result};

/// QR sweeps allowed per unit of dimension.
pub const SWEEPS_PER_DIM: usize = 100;

/// `A = Q T Q*` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurForm {
    pub unitary: ComplexMatrix,
    pub upper: ComplexMatrix,
    /// Diagonal of `upper`, in (modulus desc, argument asc) order.
    pub eigenvalues: Vec<Complex64>,
}

impl SchurForm {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &(&self.unitary * &self.upper) * &self.unitary.adjoint()
    }
}

/// Plane rotation `[[c, s], [-conj(s), c]]` with real `c`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    /// Rotation mapping `(f, g)` to `(r, 0)`; returns it with `r`.
    pub(crate) fn zeroing(f: Complex64, g: Complex64) -> (Self, Complex64) {
        if g == ZERO {
            return (Self { c: 1.0, s: ZERO }, f);
        }
        if f == ZERO {
            let ng = g.norm();
            return (Self { c: 0.0, s: g.conj() / ng }, Complex64::new(ng, 0.0));
        }
        let nf = f.norm();
        let norm = nf.hypot(g.norm());
        let phase = f / nf;
        (
            Self {
                c: nf / norm,
                s: phase * g.conj() / norm,
            },
            phase * norm,
        )
    }

    /// `M <- G M` on rows `i, j`, columns `cols`.
    fn rotate_rows(&self, m: &mut ComplexMatrix, i: usize, j: usize, cols: std::ops::Range<usize>) {
        for k in cols {
            let a = m[(i, k)];
            let b = m[(j, k)];
            m[(i, k)] = a * self.c + self.s * b;
            m[(j, k)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// `M <- M G*` on columns `i, j`, rows `rows`.
    fn rotate_cols(&self, m: &mut ComplexMatrix, i: usize, j: usize, rows: std::ops::Range<usize>) {
        for k in rows {
            let a = m[(k, i)];
            let b = m[(k, j)];
            m[(k, i)] = a * self.c + self.s.conj() * b;
            m[(k, j)] = -self.s * a + b * self.c;
        }
    }
}

/// Reduces `a` to upper Hessenberg form in place, returning the accumulated unitary.
pub(crate) fn hessenberg(a: &mut ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return q;
    }
    for k in 0..n - 2 {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = super::matrix::vec_norm(&v);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = super::matrix::vec_norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A <- (I - 2vv*) A on rows k+1..n
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * a[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                a[(k + 1 + r, j)] -= *vr * s * 2.0;
            }
        }
        // A <- A (I - 2vv*) and Q <- Q (I - 2vv*) on columns k+1..n
        for m in [&mut *a, &mut q] {
            for i in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(r, vr)| m[(i, k + 1 + r)] * vr)
                    .sum();
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= s * vr.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
    q
}

fn negligible(h: &ComplexMatrix, i: usize, norm: f64) -> bool {
    let sub = h[(i, i - 1)].norm();
    let local = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
    let scale = if local > 0.0 { local } else { norm };
    sub <= f64::EPSILON * scale || sub < f64::MIN_POSITIVE
}

fn wilkinson_shift(h: &ComplexMatrix, iu: usize, iter: usize) -> Complex64 {
    if (iter == 10 || iter == 30) && iu >= 2 {
        let exc = h[(iu, iu - 1)].re.abs() + h[(iu - 1, iu - 2)].re.abs();
        return Complex64::new(exc, 0.0) + h[(iu, iu)];
    }
    let t00 = h[(iu - 1, iu - 1)];
    let t01 = h[(iu - 1, iu)];
    let t10 = h[(iu, iu - 1)];
    let t11 = h[(iu, iu)];
    let normt = t00.norm() + t01.norm() + t10.norm() + t11.norm();
    if normt == 0.0 {
        return ZERO;
    }
    let (t00, t01, t10, t11) = (t00 / normt, t01 / normt, t10 / normt, t11 / normt);
    let b = t01 * t10;
    let c = t00 - t11;
    let disc = (c * c + b * 4.0).sqrt();
    let det = t00 * t11 - b;
    let trace = t00 + t11;
    let mut e1 = (trace + disc) * 0.5;
    let mut e2 = (trace - disc) * 0.5;
    if e1.norm() > e2.norm() {
        e2 = det / e1;
    } else if e2 != ZERO {
        e1 = det / e2;
    }
    if (e1 - t11).norm() < (e2 - t11).norm() {
        e1 * normt
    } else {
        e2 * normt
    }
}

/// Triangularises a Hessenberg matrix in place, updating `q`.
fn hessenberg_qr(h: &mut ComplexMatrix, q: &mut ComplexMatrix, budget: usize) -> Result<()> {
    let n = h.dim();
    if n < 2 {
        return Ok(());
    }
    let norm = h.frobenius_norm();
    let mut iu = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        while iu > 0 && negligible(h, iu, norm) {
            h[(iu, iu - 1)] = ZERO;
            iu -= 1;
            iter = 0;
        }
        if iu == 0 {
            break;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(LabError::NonConvergence {
                op: "schur_decompose",
                budget,
            });
        }
        let mut il = iu - 1;
        while il > 0 && !negligible(h, il, norm) {
            il -= 1;
        }
        if il > 0 {
            h[(il, il - 1)] = ZERO;
        }

        let shift = wilkinson_shift(h, iu, iter);
        let (rot, _) = Givens::zeroing(h[(il, il)] - shift, h[(il + 1, il)]);
        rot.rotate_rows(h, il, il + 1, il..n);
        rot.rotate_cols(h, il, il + 1, 0..(il + 3).min(iu + 1));
        rot.rotate_cols(q, il, il + 1, 0..n);

        for i in il + 1..iu {
            let (rot, r) = Givens::zeroing(h[(i, i - 1)], h[(i + 1, i - 1)]);
            h[(i, i - 1)] = r;
            h[(i + 1, i - 1)] = ZERO;
            rot.rotate_rows(h, i, i + 1, i..n);
            rot.rotate_cols(h, i, i + 1, 0..(i + 3).min(iu + 1));
            rot.rotate_cols(q, i, i + 1, 0..n);
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Swaps the adjacent diagonal entries `k, k+1` of an upper triangular `t`.
pub(crate) fn swap_adjacent(t: &mut ComplexMatrix, q: &mut ComplexMatrix, k: usize) {
    let n = t.dim();
    let f = t[(k, k + 1)];
    let g = t[(k + 1, k + 1)] - t[(k, k)];
    if g == ZERO {
        return;
    }
    // First column of Z spans the eigenvector of t[k+1,k+1] in the 2x2 block.
    let (rot, _) = Givens::zeroing(f, g);
    // Z = G*, so T <- G T G* and Q <- Q G*.
    rot.rotate_rows(t, k, k + 1, 0..n);
    rot.rotate_cols(t, k, k + 1, 0..n);
    rot.rotate_cols(q, k, k + 1, 0..n);
    t[(k + 1, k)] = ZERO;
}

/// Total order used for eigenvalue listings: modulus descending, then argument ascending.
pub fn eigenvalue_order(a: &Complex64, b: &Complex64) -> Ordering {
    let (ka, kb) = (sort_key(a), sort_key(b));
    kb.0.cmp(&ka.0).then(ka.1.total_cmp(&kb.1))
}

fn sort_key(z: &Complex64) -> (i64, f64) {
    let m = z.norm();
    // Quantised relative to magnitude so rounding noise does not flip ties.
    let qm = if m == 0.0 {
        i64::MIN
    } else {
        let e = m.log2().floor();
        let mant = m / e.exp2();
        ((e as i64) << 32) + (mant * 1e9).round() as i64
    };
    let mut arg = z.arg();
    if arg <= -std::f64::consts::PI + 1e-9 {
        arg = std::f64::consts::PI;
    }
    (qm, (arg * 1e9).round() / 1e9)
}

/// Reorders a Schur form so that `pred` entries come first, preserving their relative order.
pub(crate) fn reorder_by<F: Fn(&Complex64) -> bool>(
    t: &mut ComplexMatrix,
    q: &mut ComplexMatrix,
    pred: F,
) -> usize {
    let n = t.dim();
    let mut placed = 0;
    for j in 0..n {
        if pred(&t[(j, j)]) {
            for k in (placed..j).rev() {
                swap_adjacent(t, q, k);
            }
            placed += 1;
        }
    }
    placed
}

fn sort_schur(t: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = t.dim();
    for i in 0..n {
        let mut best = i;
        for j in i + 1..n {
            if eigenvalue_order(&t[(j, j)], &t[(best, best)]) == Ordering::Less {
                best = j;
            }
        }
        for k in (i..best).rev() {
            swap_adjacent(t, q, k);
        }
    }
}

/// Complex Schur decomposition with sorted diagonal.
///
/// The iteration budget is `SWEEPS_PER_DIM * dim` QR sweeps. `tol` is the
/// relative reconstruction tolerance the result is checked against.
pub fn schur_decompose(a: &ComplexMatrix, tol: f64) -> Result<SchurForm> {
    schur_with_budget(a, tol, SWEEPS_PER_DIM * a.dim().max(1))
}

pub fn schur_with_budget(a: &ComplexMatrix, tol: f64, budget: usize) -> Result<SchurForm> {
    if !a.is_finite() {
        return Err(LabError::InvalidInput("matrix has non-finite entries".into()));
    }
    let mut t = a.clone();
    let mut q = hessenberg(&mut t);
    hessenberg_qr(&mut t, &mut q, budget)?;
    sort_schur(&mut t, &mut q);
    let form = SchurForm {
        eigenvalues: t.diagonal(),
        unitary: q,
        upper: t,
    };
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let residual = form.reconstruct().max_abs_diff(a);
    if residual > tol.max(64.0 * f64::EPSILON * a.dim() as f64) * scale {
        return Err(LabError::NonConvergence {
            op: "schur_decompose",
            budget,
        });
    }
    Ok(form)
}

/// Eigenvalues in (modulus desc, argument asc) order.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    Ok(schur_decompose(a, 1e-10)?.eigenvalues)
}

/// Hausdorff distance between two finite point sets in the plane.
pub fn hausdorff_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn directed(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    directed(a, b).max(directed(b, a))
}

/// Bottleneck distance between eigenvalue multisets: the least `d` admitting
/// a bijection that moves every point by at most `d`.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    let dist: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let mut levels: Vec<f64> = dist.iter().flatten().copied().collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let feasible = |d: f64| {
        let mut owner: Vec<Option<usize>> = vec![None; n];
        fn augment(i: usize, d: f64, dist: &[Vec<f64>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
            for j in 0..dist.len() {
                if dist[i][j] <= d && !seen[j] {
                    seen[j] = true;
                    if owner[j].is_none_or(|k| augment(k, d, dist, seen, owner)) {
                        owner[j] = Some(i);
                        return true;
                    }
                }
            }
            false
        }
        (0..n).all(|i| augment(i, d, &dist, &mut vec![false; n], &mut owner))
    };
    let (mut lo, mut hi) = (0, levels.len().saturating_sub(1));
    if n == 0 {
        return 0.0;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(levels[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    levels[lo]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_distance_counts_multiplicity() {
        let a = [c(1.0), c(1.0), c(2.0)];
        let b = [c(1.0), c(2.0), c(2.0)];
        assert_eq!(hausdorff_distance(&a, &b), 0.0);
        assert_eq!(multiset_distance(&a, &b), 1.0);
        let p = [c(3.0), c(-1.0), c(0.5)];
        let q = [c(0.5), c(3.1), c(-1.0)];
        assert!((multiset_distance(&p, &q) - 0.1).abs() < 1e-15);
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let s = schur_decompose(&ComplexMatrix::identity(3), 1e-10).unwrap();
        assert_eq!(s.eigenvalues, vec![c(1.0); 3]);
    }

    #[test]
    fn diagonal_sorted_by_modulus() {
        let a = ComplexMatrix::from_real_diagonal(&[0.5, 2.0]);
        let s = schur_decompose(&a, 1e-10).unwrap();
        assert!((s.eigenvalues[0] - c(2.0)).norm() < 1e-14);
        assert!((s.eigenvalues[1] - c(0.5)).norm() < 1e-14);
        assert_eq!(s.eigenvalues, s.upper.diagonal());
    }

    #[test]
    fn antidiagonal_eigenvalues_are_plus_minus_sqrt6() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[3.0, 0.0]]);
        let s = schur_decompose(&a, 1e-10).unwrap();
        // closed form for [[a,b],[c,d]]: (tr +- sqrt(tr^2 - 4 det)) / 2 with tr = 0, det = -6
        let r = 6f64.sqrt();
        assert!((s.eigenvalues[0] - c(r)).norm() < 1e-12);
        assert!((s.eigenvalues[1] - c(-r)).norm() < 1e-12);
    }

    #[test]
    fn rotation_eigenvalues_on_circle() {
        let th = std::f64::consts::FRAC_PI_4;
        let a = ComplexMatrix::from_real_rows(&[&[th.cos(), -th.sin()], &[th.sin(), th.cos()]]);
        let ev = eigenvalues(&a).unwrap();
        for z in ev {
            assert!((z.norm() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn jordan_block_converges() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 0.0, 1.0]]);
        let s = schur_decompose(&a, 1e-10).unwrap();
        for z in s.eigenvalues {
            assert!((z - c(1.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn nilpotent_has_zero_spectrum() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let s = schur_decompose(&a, 1e-10).unwrap();
        assert!(s.eigenvalues.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], &[7.0, 8.0, 10.0]]);
        let err = schur_with_budget(&a, 1e-10, 0).unwrap_err();
        assert!(matches!(err, LabError::NonConvergence { .. }));
    }

    #[test]
    fn hausdorff_basics() {
        let a = [c(1.0), c(2.0)];
        let b = [c(1.0), c(2.5)];
        assert_eq!(hausdorff_distance(&a, &b), 0.5);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
    }
}
