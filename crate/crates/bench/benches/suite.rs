use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lmtr_bench::{run_suite, SolverSpec, SuiteConfig};
use lmtr_core::par::Execution;
use lmtr_core::problems::registry;

fn suite(exec: Execution) -> SuiteConfig {
    let mut suite = SuiteConfig::new(
        registry(200),
        vec![SolverSpec::DEFAULT_DENSE, SolverSpec::Conventional],
    );
    suite.reps = 1;
    suite.discard = 0;
    suite.exec = exec;
    suite
}

fn cells(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_suite");
    group.sample_size(10);
    for (label, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        let suite = suite(exec);
        group.bench_function(label, |b| b.iter(|| black_box(run_suite(&suite).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, cells);
criterion_main!(benches);
