use oplab_core::dynamics::{
    build_pseudo_orbit_from_bounded, homoclinic_scaling_check, invariance_check, shadow, shadow_solve,
    shadowing_constant_estimate, telescoping_residual, DenseOperator, DenseSplitting, LatticeVector, LinearDynamics,
    OrbitAnalysis, ShiftSplitting, StateVector,
};
use oplab_core::linalg::random::{complex_gaussian, random_eigenvalue, rng, similar_to_diagonal};
use oplab_core::shift::{classify, library, ShiftOperator, ShiftVerdict, WeightSequence};
use oplab_core::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn sh() -> ShiftOperator {
    WeightSequence::two_tailed(2.0, 0.5, 1).unwrap().into()
}

fn hyp() -> ShiftOperator {
    WeightSequence::two_tailed(2.0, 3.0, 1).unwrap().into()
}

fn random_lattice<R: Rng>(r: &mut R, lo: i64, hi: i64) -> LatticeVector {
    let len = r.random_range(1..=6);
    LatticeVector::from_pairs((0..len).map(|_| (r.random_range(lo..=hi), complex_gaussian(r))))
}

fn hyperbolic_matrix<R: Rng>(r: &mut R, dim: usize) -> oplab_core::ComplexMatrix {
    let stable = r.random_range(1..dim);
    let eigs: Vec<Complex64> = (0..dim)
        .map(|i| if i < stable { random_eigenvalue(r, 0.2, 0.8) } else { random_eigenvalue(r, 1.25, 3.0) })
        .collect();
    similar_to_diagonal(r, &eigs, 1.5)
}

#[test]
fn exact_orbit_norms_of_basis_vectors() {
    let op = sh();
    let seg = op.orbit_norms(&LatticeVector::basis(0), 6).unwrap();
    // e_0 -> 2 e_1 -> 1 e_2 -> 1/2 e_3 ...; backwards 1/2 each step
    assert_eq!(seg.norm(0), 1.0);
    assert_eq!(seg.norm(1), 2.0);
    assert_eq!(seg.norm(3), 0.5);
    assert_eq!(seg.norm(-3), 0.125);
    for n in seg.indices() {
        assert!((seg.log_norm(n) - seg.norm(n).ln()).abs() < 1e-12);
    }
}

#[test]
fn basis_vectors_of_shifted_hyperbolic_are_homoclinic() {
    let op = sh();
    for m in -32..=32 {
        let rep = op.is_r_homoclinic(&LatticeVector::basis(m), 1.0, 200).unwrap();
        assert!(rep.exact && rep.homoclinic == Some(true));
        assert!(rep.is_r_homoclinic_at_horizon, "m = {m}");
        assert!(op.ec_membership(&LatticeVector::basis(m), f64::INFINITY, 200).unwrap().member);
    }
}

#[test]
fn hyperbolic_shift_has_no_r_homoclinic_points() {
    let op = hyp();
    let mut r = rng(7);
    for m in -32..=32 {
        let rep = op.is_r_homoclinic(&LatticeVector::basis(m), 10.0, 500).unwrap();
        assert!(rep.certified_divergent && rep.witness_index.is_none());
        assert_eq!(rep.homoclinic, Some(false));
    }
    for _ in 0..50 {
        let x = random_lattice(&mut r, -20, 20);
        let rep = op.is_r_homoclinic(&x, 10.0, 500).unwrap();
        assert!(rep.certified_divergent);
        assert!(!op.ec_membership(&x, f64::INFINITY, 500).unwrap().member);
    }
}

#[test]
fn pseudo_orbit_shadow_homoclinic_chain() {
    let w = WeightSequence::two_tailed(2.0, 0.5, 1).unwrap();
    let sys = ShiftSplitting::new(&w).unwrap();
    let mut r = rng(8);
    for delta in [1e-1, 1e-2, 1e-3] {
        for _ in 0..5 {
            let x = random_lattice(&mut r, -10, 10);
            let m = sys.op.ec_membership(&x, f64::INFINITY, 100).unwrap().sup_norm;
            let horizon = ((40.0 * m / delta) as usize).clamp(50, 200_000);
            let po = build_pseudo_orbit_from_bounded(&sys.op, &x, delta, horizon).unwrap();
            assert!(po.max_defect < delta);
            let res = shadow(&sys, &po).unwrap();
            assert!(res.within_bound(), "eps {} bound {}", res.epsilon, res.bound);
            assert!(telescoping_residual(&sys, &po, &res) < 1e-8);
            assert!(res.shadow_point.difference(&x).norm() <= res.bound);
            let y = &res.shadow_point;
            let rep = sys.op.is_r_homoclinic(y, delta, 10_000).unwrap();
            assert!(rep.exact && rep.homoclinic == Some(true));
        }
    }
}

#[test]
fn sandwich_on_library() {
    let mut r = rng(9);
    for e in library() {
        let verdict = classify(&e.weights).verdict;
        let op: ShiftOperator = e.weights.clone().into();
        for _ in 0..10 {
            let x = random_lattice(&mut r, -12, 12);
            for radius in [0.1, 1.0, 10.0] {
                let rep = op.is_r_homoclinic(&x, radius, 10_000).unwrap();
                if rep.is_r_homoclinic_at_horizon {
                    let ec = op.ec_membership(&x, f64::INFINITY, 10_000).unwrap();
                    assert!(ec.member, "{}: H_r point outside E^c", e.name);
                }
            }
        }
        if matches!(verdict, ShiftVerdict::NotGeneralizedHyperbolic | ShiftVerdict::Boundary) {
            continue;
        }
        for m in -12..=12 {
            let x = LatticeVector::basis(m);
            if !op.ec_membership(&x, f64::INFINITY, 1000).unwrap().member {
                continue;
            }
            // the nearest constructed r-homoclinic point is x itself
            let rep = op.is_r_homoclinic(&x, 1.0, 10_000).unwrap();
            assert!(rep.homoclinic == Some(true), "{} e_{m}", e.name);
            let sys = ShiftSplitting::new(&e.weights).unwrap();
            let m_sup = op.ec_membership(&x, f64::INFINITY, 1000).unwrap().sup_norm;
            let delta = 1e-3 * m_sup.max(1.0);
            let po = build_pseudo_orbit_from_bounded(&sys.op, &x, delta, (40.0 * m_sup / delta) as usize).unwrap();
            let res = shadow(&sys, &po).unwrap();
            assert!(res.within_bound());
            assert!(res.shadow_point.difference(&x).norm() <= res.shadowing_constant * delta);
        }
    }
}

#[test]
fn invariance_of_homoclinic_sets() {
    let op = sh();
    let mut r = rng(10);
    for _ in 0..50 {
        let x = random_lattice(&mut r, -15, 15);
        for radius in [0.5, 1.0, 4.0] {
            assert!(invariance_check(&op, &x, radius, 5_000).unwrap());
        }
    }
}

#[test]
fn shadowing_on_dense_hyperbolic_matrices() {
    let mut r = rng(11);
    for trial in 0..10 {
        let dim = 4 + trial % 5;
        let a = hyperbolic_matrix(&mut r, dim);
        let sys = DenseSplitting::new(&a, 1e-6).unwrap();
        let k = shadowing_constant_estimate(&a).unwrap();
        for delta in [1e-2, 1e-3, 1e-4] {
            let po = sys.noisy_pseudo_orbit(&mut r, 500, delta).unwrap();
            let res = shadow_solve(&a, &po, 1e-6).unwrap();
            assert!(res.epsilon <= k * delta, "eps {} K {k} delta {delta}", res.epsilon);
            assert!(telescoping_residual(&sys, &po, &res) < 1e-8);
        }
    }
}

#[test]
fn dense_homoclinic_report_is_horizon_limited() {
    let a = oplab_core::ComplexMatrix::from_real_diagonal(&[0.5, 2.0]);
    let op = DenseOperator::new(a).unwrap();
    let rep = op.is_r_homoclinic(&vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 1.0, 100).unwrap();
    assert!(!rep.exact);
    assert!(!rep.is_r_homoclinic_at_horizon);
    let stable = op.is_r_homoclinic(&vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 1e6, 100).unwrap();
    assert!(!stable.is_r_homoclinic_at_horizon);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scaling_preserves_homoclinicity(seed in any::<u64>(), r in 1e-3f64..1e3, rp in 1e-3f64..1e3) {
        let mut g = rng(seed);
        let x = random_lattice(&mut g, -20, 20);
        prop_assert!(homoclinic_scaling_check(&sh(), &x, r, rp, 10_000).unwrap());
    }

    #[test]
    fn lattice_json_round_trip(seed in any::<u64>()) {
        let x = random_lattice(&mut rng(seed), -50, 50);
        let s = serde_json::to_string(&x).unwrap();
        let back: LatticeVector = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn shift_inverse_round_trip(seed in any::<u64>()) {
        let mut g = rng(seed);
        let x = random_lattice(&mut g, -20, 20);
        for op in [sh(), hyp()] {
            let y = op.apply_inverse(&op.apply(&x));
            prop_assert!(y.difference(&x).norm() <= 1e-14 * x.norm());
        }
    }
}
