use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qstance_bench::{rng, span_pair};
use qstance_core::triangulate::{align_spans, cohen_kappa, AlignMode};
use rand::Rng;

fn bench_kappa(c: &mut Criterion) {
    let mut r = rng(3);
    let pairs: Vec<(u8, u8)> = (0..5000)
        .map(|_| {
            let a = r.random_range(0..6u8);
            (a, if r.random_bool(0.8) { a } else { r.random_range(0..6u8) })
        })
        .collect();
    c.bench_function("kappa_5000_pairs", |b| b.iter(|| cohen_kappa(&pairs).unwrap()));
}

fn bench_align(c: &mut Criterion) {
    let mut group = c.benchmark_group("align_spans");
    for n in [10, 50, 200] {
        let (a, b) = span_pair(&mut rng(n as u64), n);
        for mode in [AlignMode::Greedy, AlignMode::Optimal] {
            group.bench_with_input(BenchmarkId::new(format!("{mode:?}"), n), &n, |bch, _| {
                bch.iter(|| align_spans(&a, &b, mode))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_kappa, bench_align);
criterion_main!(benches);
