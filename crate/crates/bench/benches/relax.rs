use criterion::{criterion_group, criterion_main, Criterion};
use qmcbound_bench::{er, kagome18, square16};
use qmcbound_core::model::solve_relaxation;
use qmcbound_core::rounding::round;
use qmcbound_core::{ModelOptions, Relaxation, RoundOptions, SolveOptions};

fn relaxations(c: &mut Criterion) {
    let opts = SolveOptions::default();
    let mut group = c.benchmark_group("relax");
    group.sample_size(10);
    for (name, g) in [("square16", square16()), ("kagome18", kagome18())] {
        for r in [Relaxation::Soc, Relaxation::SocP1] {
            let model = ModelOptions::new(r);
            group.bench_function(format!("{name}/{}", r.name()), |b| {
                b.iter(|| solve_relaxation(&g, &model, &opts).unwrap())
            });
        }
    }
    let g = er(8, 0.5, 0);
    let model = ModelOptions::new(Relaxation::Soc4);
    group.bench_function("er8/soc-4", |b| b.iter(|| solve_relaxation(&g, &model, &opts).unwrap()));
    group.finish();
}

fn rounding(c: &mut Criterion) {
    let g = er(12, 0.4, 0);
    let sol = solve_relaxation(&g, &ModelOptions::new(Relaxation::SocP1), &SolveOptions::default()).unwrap();
    let opts = RoundOptions::default();
    c.bench_function("round/er12/1000", |b| b.iter(|| round(&sol, &g, &opts).unwrap()));
}

criterion_group!(benches, relaxations, rounding);
criterion_main!(benches);
