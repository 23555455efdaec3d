use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pmy::lp_space::{estimate_modulus_of_convexity, SamplingBudget};
use pmy::{conjugate_on_grid, prox, ConvexFunctionSpec, GridSpec, SpaceConfig};
use pmy_bench::prox_cases;

fn bench_prox(c: &mut Criterion) {
    let mut group = c.benchmark_group("prox");
    for (label, f, cfg) in prox_cases() {
        group.bench_function(label, |b| b.iter(|| prox(&f, black_box(&[0.3, -1.1]), &cfg).unwrap()));
    }
    group.finish();
}

fn bench_conjugate(c: &mut Criterion) {
    let f = ConvexFunctionSpec::one_norm(vec![0.0], 1.0, 0.0).unwrap();
    let primal = GridSpec::uniform(1, -10.0, 10.0, 2001).unwrap();
    let dual = GridSpec::uniform(1, -1.0, 1.0, 2001).unwrap();
    c.bench_function("conjugate_on_grid/2001x2001", |b| {
        b.iter(|| conjugate_on_grid(&f, black_box(&primal), &dual).unwrap())
    });
}

fn bench_modulus(c: &mut Criterion) {
    let space = SpaceConfig::new(2, 3.0).unwrap();
    let budget = SamplingBudget {
        pairs: 200,
        refine_steps: 20,
    };
    c.bench_function("modulus_of_convexity/l3/200", |b| {
        b.iter(|| estimate_modulus_of_convexity(&space, black_box(0.3), &budget, 7).unwrap())
    });
}

criterion_group!(benches, bench_prox, bench_conjugate, bench_modulus);
criterion_main!(benches);
