use oplab_core::linalg::{operator_norm, polar_decompose};
use oplab_core::shift::{
    aluthge_weight_closed_form, aluthge_weights, aluthge_weights_iterate, classify, diagonal_conjugate,
    hyponormality_violation, library, spectrum_annulus, truncate_to_dense, truncate_to_dense_periodic,
    ShiftVerdict, WeightSequence,
};
use oplab_core::aluthge::LAMBDA_GRID;
use oplab_core::ComplexMatrix;
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(f64::exp)
}

fn tail() -> impl Strategy<Value = f64> {
    prop_oneof![weight(), Just(1.0), Just(0.5), Just(2.0)]
}

fn sequence() -> impl Strategy<Value = WeightSequence> {
    (-6i64..6, prop::collection::vec(weight(), 0..8), tail(), tail())
        .prop_map(|(s, core, a, b)| WeightSequence::new(s, core, a, b).unwrap())
}

fn lambda() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0 / 3.0), Just(0.25), 0.05f64..0.95]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Entry `(i+1, i)` of the dense Aluthge transform of a periodic closure.
fn dense_aluthge_weight(w: &WeightSequence, lambda: f64, from: i64, n: i64) -> f64 {
    let m = truncate_to_dense_periodic(w, from, -from - 1).unwrap();
    let f = polar_decompose(&m, 1e-12).unwrap();
    let pl = oplab_core::linalg::psd_power(&f.modulus, lambda, 1e-12).unwrap();
    let pr = oplab_core::linalg::psd_power(&f.modulus, 1.0 - lambda, 1e-12).unwrap();
    let t = &(&pl * &f.isometry) * &pr;
    let i = (n - from) as usize;
    t[(i + 1, i)].norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn aluthge_preserves_tails(w in sequence(), l in lambda(), k in 0u64..40) {
        let t = aluthge_weights_iterate(&w, l, k).unwrap();
        prop_assert_eq!(t.left_tail(), w.left_tail());
        prop_assert_eq!(t.right_tail(), w.right_tail());
        prop_assert_eq!(spectrum_annulus(&t), spectrum_annulus(&w));
    }

    #[test]
    fn closed_form_matches_iteration(w in sequence(), l in lambda(), k in 0u64..=64, n in -80i64..20) {
        let it = aluthge_weights_iterate(&w, l, k).unwrap();
        let cf = aluthge_weight_closed_form(&w, l, k, n).unwrap();
        prop_assert!(rel(cf, it.weight(n)) <= 1e-10, "{} vs {}", cf, it.weight(n));
    }

    #[test]
    fn single_step_matches_formula(w in sequence(), l in lambda(), n in -12i64..12) {
        let t = aluthge_weights(&w, l).unwrap();
        let want = w.weight(n).powf(1.0 - l) * w.weight(n + 1).powf(l);
        prop_assert!(rel(t.weight(n), want) <= 1e-12);
    }

    #[test]
    fn classification_invariant_along_iterates(w in sequence(), k in 0u64..=64) {
        let v = classify(&w).verdict;
        for &l in LAMBDA_GRID.iter() {
            let t = aluthge_weights_iterate(&w, l, k).unwrap();
            prop_assert_eq!(classify(&t).verdict, v);
        }
    }

    #[test]
    fn conjugation_preserves_spectrum_and_verdict(
        w in sequence(),
        s in -5i64..5,
        d in prop::collection::vec(weight(), 1..6),
        c in weight(),
    ) {
        let dseq = WeightSequence::new(s, d, c, c).unwrap();
        let v = diagonal_conjugate(&w, &dseq).unwrap();
        prop_assert_eq!(spectrum_annulus(&v), spectrum_annulus(&w));
        prop_assert_eq!(classify(&v).verdict, classify(&w).verdict);
        // dense oracle: H T H^-1 on a window containing both cores
        let (from, to) = (-16, 16);
        let h = ComplexMatrix::from_real_diagonal(&(from..=to).map(|n| dseq.weight(n)).collect::<Vec<_>>());
        let t = truncate_to_dense(&w, from, to).unwrap();
        let conj = &(&h * &t) * &h.inverse().unwrap();
        prop_assert!(conj.max_abs_diff(&truncate_to_dense(&v, from, to).unwrap()) <= 1e-12 * conj.max_abs().max(1.0));
    }

    #[test]
    fn truncation_norm_bounded_by_sup(w in sequence(), from in -20i64..0, len in 1i64..30) {
        let m = truncate_to_dense(&w, from, from + len).unwrap();
        prop_assert!(operator_norm(&m, 1e-12).unwrap() <= w.sup() * (1.0 + 1e-12));
    }

    #[test]
    fn weight_sequence_json_round_trip(w in sequence()) {
        let s = serde_json::to_string(&w).unwrap();
        let back: WeightSequence = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, w);
    }
}

#[test]
fn closed_form_deep_iterates() {
    let seqs: Vec<WeightSequence> = library().into_iter().map(|e| e.weights).collect();
    assert!(seqs.len() >= 12);
    let extra = [
        WeightSequence::new(-3, vec![0.2, 5.0, 0.7, 1.9], 0.4, 3.0).unwrap(),
        WeightSequence::new(2, vec![1.1, 0.9, 1.3], 2.5, 0.6).unwrap(),
        WeightSequence::new(0, vec![4.0, 0.25, 4.0, 0.25], 1.5, 1.5).unwrap(),
        WeightSequence::new(-1, vec![0.9], 1.2, 0.8).unwrap(),
        WeightSequence::new(5, vec![3.0, 3.0, 0.1], 2.0, 0.5).unwrap(),
        WeightSequence::new(-8, vec![1.05; 6], 0.95, 1.05).unwrap(),
        WeightSequence::new(0, vec![7.0, 0.3], 0.3, 7.0).unwrap(),
        WeightSequence::two_tailed(3.0, 1.0 / 3.0, 4).unwrap(),
    ];
    let all: Vec<_> = seqs.into_iter().chain(extra).collect();
    assert!(all.len() >= 20);
    for w in &all {
        for &l in LAMBDA_GRID.iter() {
            for k in [1u64, 16, 100, 256] {
                let it = aluthge_weights_iterate(w, l, k).unwrap();
                for n in (w.core_start() - k as i64 - 3)..=(w.core_end() + 3) {
                    let cf = aluthge_weight_closed_form(w, l, k, n).unwrap();
                    assert!(rel(cf, it.weight(n)) <= 1e-10, "{w:?} l={l} k={k} n={n}");
                }
            }
        }
    }
}

#[test]
fn annulus_of_two_half_by_brute_force() {
    let w = WeightSequence::two_tailed(2.0, 0.5, 1).unwrap();
    let a = spectrum_annulus(&w);
    assert_eq!((a.inner, a.outer), (0.5, 2.0));
    // growth rates sup_m |prod_{j<n} alpha_{m+j}|^{1/n} and inf over start points
    let n = 200i64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for m in -2 * n..=2 * n {
        let g = w.log_weight_sum(m, m + n - 1) / n as f64;
        lo = lo.min(g.exp());
        hi = hi.max(g.exp());
    }
    assert!((lo - a.inner).abs() < 1e-12 && (hi - a.outer).abs() < 1e-12);
    assert_eq!(classify(&w).verdict, ShiftVerdict::ShiftedHyperbolic);
}

#[test]
fn aluthge_matches_dense_polar_oracle() {
    let cases = [
        WeightSequence::two_tailed(2.0, 3.0, 1).unwrap(),
        WeightSequence::two_tailed(2.0, 0.5, 1).unwrap(),
        WeightSequence::new(-2, vec![0.5, 3.0, 1.7], 4.0, 0.25).unwrap(),
    ];
    for w in &cases {
        for &l in LAMBDA_GRID.iter() {
            let t = aluthge_weights(w, l).unwrap();
            for n in -8..8 {
                let d = dense_aluthge_weight(w, l, -32, n);
                assert!(rel(d, t.weight(n)) < 1e-9, "n={n} l={l}: {d} vs {}", t.weight(n));
            }
        }
    }
}

#[test]
fn two_three_at_one_third() {
    let w = WeightSequence::two_tailed(2.0, 3.0, 1).unwrap();
    let t = aluthge_weights(&w, 1.0 / 3.0).unwrap();
    assert!((t.weight(0) - 12f64.cbrt()).abs() < 1e-12);
    assert_eq!(t.weight(-5), 2.0);
    assert_eq!(t.weight(1), 3.0);
}

#[test]
fn hyponormal_iff_nondecreasing() {
    let up = WeightSequence::new(0, vec![2.0, 2.5, 3.0], 2.0, 3.0).unwrap();
    assert_eq!(hyponormality_violation(&up), None);
    let dip = WeightSequence::new(0, vec![1.5, 0.7, 2.0], 3.0, 1.0 / 3.0).unwrap();
    assert!(hyponormality_violation(&dip).is_some());
}

#[test]
fn library_verdicts_are_stable_under_iteration() {
    for e in library() {
        let v = classify(&e.weights).verdict;
        let t = aluthge_weights_iterate(&e.weights, 0.5, 1000).unwrap();
        assert_eq!(classify(&t).verdict, v, "{}", e.name);
    }
}
