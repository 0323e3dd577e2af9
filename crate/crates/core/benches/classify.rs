use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nrd_core::classify_arity;

fn bench_classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify_arity");
    for r in [3usize, 4, 5] {
        group.bench_with_input(BenchmarkId::new("sequential", r), &r, |b, &r| {
            b.iter(|| classify_arity(r, false).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", r), &r, |b, &r| {
            b.iter(|| classify_arity(r, true).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_classify);
criterion_main!(benches);
