use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use dyadlab::dense_divergence::Thm31;
use dyadlab::interior_gap::thm34_probe;
use dyadlab::suites::{run_thm31, SuiteOptions, Thm31Suite};
use dyadlab::universal::{build_universal, covering_sweep, IndexJK};
use dyadlab::{Dyadic, Exec, IntervalUnion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn covering(c: &mut Criterion) {
    let seq = build_universal(IndexJK::new(3, 0).unwrap()).unwrap();
    let indices = IndexJK::rows(2);
    let mut group = c.benchmark_group("covering_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(covering_sweep(&indices, &seq, 100, 1, exec)))
        });
    }
    group.finish();
}

fn lower_bounds(c: &mut Criterion) {
    let thm = Thm31::new(12);
    let g = IntervalUnion::new();
    let mut group = c.benchmark_group("thm31_lower");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = SuiteOptions {
            samples: 10,
            seed: 1,
            exec,
            ..SuiteOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| black_box(run_thm31(Thm31Suite::Lower, &thm, &g, opts).unwrap()))
        });
    }
    group.finish();
}

fn probe(c: &mut Criterion) {
    let x_c = Dyadic::ratio_pow2(9, 1);
    let mut group = c.benchmark_group("thm34_probe");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(thm34_probe(&x_c, 6, 200, 1, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, covering, lower_bounds, probe);
criterion_main!(benches);
