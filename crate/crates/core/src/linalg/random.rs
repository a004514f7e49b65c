//! Seeded random matrix ensembles used by experiments and tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{dot_conj, vec_norm, ComplexMatrix};

pub type LabRng = ChaCha8Rng;

pub fn rng(seed: u64) -> LabRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// Haar-ish unitary from Gram-Schmidt on a Ginibre matrix.
pub fn unitary<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut w = g.column(j);
        for _ in 0..2 {
            for c in &cols {
                let p = dot_conj(c, &w);
                for (wi, ci) in w.iter_mut().zip(c) {
                    *wi -= p * ci;
                }
            }
        }
        let n = vec_norm(&w);
        cols.push(w.into_iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
}

/// `Q diag(eigs) Q*` for a random unitary `Q`.
pub fn normal_with_spectrum<R: Rng>(rng: &mut R, eigs: &[Complex64]) -> ComplexMatrix {
    let q = unitary(rng, eigs.len());
    &(&q * &ComplexMatrix::from_diagonal(eigs)) * &q.adjoint()
}

/// Random normal matrix with eigenvalue moduli in `[lo, hi]` and uniform phases.
pub fn random_normal<R: Rng>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> ComplexMatrix {
    let eigs: Vec<Complex64> = (0..dim).map(|_| random_eigenvalue(rng, lo, hi)).collect();
    normal_with_spectrum(rng, &eigs)
}

pub fn random_eigenvalue<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    let m = rng.random_range(lo..=hi);
    let th = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    Complex64::from_polar(m, th)
}

/// Well-conditioned invertible matrix `U1 diag(s) U2` with `s` in `[1/cond_sqrt, cond_sqrt]`.
pub fn well_conditioned<R: Rng>(rng: &mut R, dim: usize, cond_sqrt: f64) -> ComplexMatrix {
    let u1 = unitary(rng, dim);
    let u2 = unitary(rng, dim);
    let s: Vec<f64> = (0..dim)
        .map(|_| cond_sqrt.powf(rng.random_range(-1.0..=1.0)))
        .collect();
    &(&u1 * &ComplexMatrix::from_real_diagonal(&s)) * &u2
}

/// `H diag(eigs) H^{-1}` for a random well-conditioned `H`.
pub fn similar_to_diagonal<R: Rng>(rng: &mut R, eigs: &[Complex64], cond_sqrt: f64) -> ComplexMatrix {
    let h = well_conditioned(rng, eigs.len(), cond_sqrt);
    let hinv = h.inverse().expect("well-conditioned matrix is invertible");
    &(&h * &ComplexMatrix::from_diagonal(eigs)) * &hinv
}

/// Hyperbolic matrix with a random number of eigenvalues of modulus in
/// `[0.2, 0.8]` and the rest in `[1.25, 3]`, both parts nontrivial when `dim >= 2`.
pub fn random_hyperbolic<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let stable = if dim >= 2 { rng.random_range(1..dim) } else { 0 };
    let eigs: Vec<Complex64> = (0..dim)
        .map(|i| {
            if i < stable {
                random_eigenvalue(rng, 0.2, 0.8)
            } else {
                random_eigenvalue(rng, 1.25, 3.0)
            }
        })
        .collect();
    similar_to_diagonal(rng, &eigs, 1.5)
}

/// Ginibre matrix rejected until its smallest singular value is at least `min_sigma`.
pub fn invertible_ginibre<R: Rng>(rng: &mut R, dim: usize, min_sigma: f64) -> ComplexMatrix {
    loop {
        let g = ginibre(rng, dim);
        if let Ok(s) = super::svd::svd(&g, 1e-12) {
            if s.sigma.last().copied().unwrap_or(0.0) >= min_sigma {
                return g;
            }
        }
    }
}
