use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use qstance_bench::{article, rng};
use qstance_core::corpus::segment;

fn bench_segment(c: &mut Criterion) {
    let mut r = rng(11);
    let articles: Vec<_> = (0..100).map(|i| article(&mut r, i, 30)).collect();
    let bytes: usize = articles.iter().map(|a| a.text.len()).sum();
    let mut group = c.benchmark_group("segmentation");
    group.throughput(Throughput::Bytes(bytes as u64));
    group.bench_function("100_articles", |b| {
        b.iter(|| articles.iter().map(|a| segment(a).len()).sum::<usize>())
    });
    group.finish();
}

criterion_group!(benches, bench_segment);
criterion_main!(benches);
