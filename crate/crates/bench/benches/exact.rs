use criterion::{criterion_group, criterion_main, Criterion};
use qmcbound_bench::{er, square16};
use qmcbound_core::exact::ground_energy;
use qmcbound_core::{EdOptions, ScalingConvention};

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    let g = er(10, 0.5, 0);
    group.bench_function("er10/dense", |b| {
        b.iter(|| ground_energy(&g, ScalingConvention::VarBench, &EdOptions::dense()).unwrap())
    });
    group.bench_function("er10/lanczos", |b| {
        b.iter(|| ground_energy(&g, ScalingConvention::VarBench, &EdOptions::default()).unwrap())
    });
    let g = square16();
    group.bench_function("square16/lanczos", |b| {
        b.iter(|| ground_energy(&g, ScalingConvention::VarBench, &EdOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, exact);
criterion_main!(benches);
