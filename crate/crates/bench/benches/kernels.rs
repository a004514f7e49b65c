use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oplab_bench::{dense_input, hyperbolic_input, shifted_hyperbolic};
use oplab_core::aluthge::{aluthge_dense, iterate_dense};
use oplab_core::dynamics::{shadow_solve, DenseSplitting};
use oplab_core::linalg::random::rng;
use oplab_core::linalg::{polar_decompose, schur_decompose, spectral_split, svd};
use oplab_core::shift::{aluthge_weight_closed_form, aluthge_weights_iterate, classify};

fn factorizations(c: &mut Criterion) {
    let mut g = c.benchmark_group("factorizations");
    for dim in [4, 16, 64] {
        let a = dense_input(dim, 1);
        g.bench_with_input(BenchmarkId::new("schur", dim), &a, |b, a| b.iter(|| schur_decompose(a, 1e-10)));
        g.bench_with_input(BenchmarkId::new("svd", dim), &a, |b, a| b.iter(|| svd(a, 1e-10)));
        g.bench_with_input(BenchmarkId::new("polar", dim), &a, |b, a| b.iter(|| polar_decompose(a, 1e-10)));
        let h = hyperbolic_input(dim, 2);
        g.bench_with_input(BenchmarkId::new("spectral_split", dim), &h, |b, h| b.iter(|| spectral_split(h, 1e-6)));
    }
    g.finish();
}

fn aluthge(c: &mut Criterion) {
    let mut g = c.benchmark_group("aluthge");
    for dim in [4, 16, 64] {
        let a = dense_input(dim, 3);
        g.bench_with_input(BenchmarkId::new("dense_step", dim), &a, |b, a| b.iter(|| aluthge_dense(a, 0.5, 1e-10)));
    }
    let a = dense_input(4, 4);
    g.bench_function("dense_trace_4x4", |b| b.iter(|| iterate_dense(&a, 0.5, 10_000, 1e-10)));
    let w = shifted_hyperbolic();
    for k in [16u64, 256, 4096] {
        g.bench_with_input(BenchmarkId::new("shift_iterate", k), &k, |b, &k| {
            b.iter(|| aluthge_weights_iterate(&w, 0.5, k))
        });
        g.bench_with_input(BenchmarkId::new("shift_closed_form", k), &k, |b, &k| {
            b.iter(|| aluthge_weight_closed_form(&w, 0.5, k, -(k as i64) / 2))
        });
    }
    g.bench_function("classify_shift", |b| b.iter(|| classify(&w)));
    g.finish();
}

fn shadowing(c: &mut Criterion) {
    let mut g = c.benchmark_group("shadowing");
    for dim in [4, 8] {
        let a = hyperbolic_input(dim, 5);
        let sys = DenseSplitting::new(&a, 1e-6).expect("hyperbolic input");
        let po = sys.noisy_pseudo_orbit(&mut rng(6), 500, 1e-3).expect("valid pseudo-orbit");
        g.bench_with_input(BenchmarkId::new("shadow_solve_500", dim), &po, |b, po| {
            b.iter(|| shadow_solve(&a, po, 1e-6))
        });
    }
    g.finish();
}

criterion_group!(benches, factorizations, aluthge, shadowing);
criterion_main!(benches);
