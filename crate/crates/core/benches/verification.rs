use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lr_cumulants::verify::{run_suite, CoefficientMode, Suite, SuiteConfig};
use lr_cumulants::Execution;

fn config(max_n: usize, d: usize, mode: CoefficientMode, exec: Execution) -> SuiteConfig {
    SuiteConfig { max_n, d, mode, exec }
}

fn run(c: &mut Criterion) {
    let treatments = [
        (Suite::PchiRoutes, config(6, 2, CoefficientMode::Symbolic, Execution::Sequential)),
        (Suite::PchiLattice, config(5, 2, CoefficientMode::Symbolic, Execution::Sequential)),
        (Suite::Cumulants, config(4, 2, CoefficientMode::Symbolic, Execution::Sequential)),
        (Suite::MomentSum, config(5, 2, CoefficientMode::Random { seed: 0 }, Execution::Sequential)),
    ];

    let mut group = c.benchmark_group("verify");
    group.sample_size(10);

    for (suite, cfg) in treatments {
        let expected = run_suite(suite, &cfg).unwrap().to_json();

        group.bench_with_input(BenchmarkId::new("seq", suite), &cfg, |b, cfg| {
            b.iter(|| run_suite(black_box(suite), black_box(cfg)).unwrap())
        });

        let par = SuiteConfig { exec: Execution::Parallel, ..cfg };
        assert_eq!(expected, run_suite(suite, &par).unwrap().to_json());
        group.bench_with_input(BenchmarkId::new("rayon", suite), &par, |b, cfg| {
            b.iter(|| run_suite(black_box(suite), black_box(cfg)).unwrap())
        });
    }

    group.finish();
}

criterion_group!(benches, run);
criterion_main!(benches);
