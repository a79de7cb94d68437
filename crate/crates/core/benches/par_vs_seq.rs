use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cfgrowth::harness::{freq_sweep, SweepConfig};
use cfgrowth::natext::{estimate_c0, lebesgue_mc_check};
use cfgrowth::padic::{e_ratio_trace, DEFAULT_BUDGET};
use cfgrowth::{Execution, RationalMat};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn mc(c: &mut Criterion) {
    let mut g = c.benchmark_group("mc_check_100k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| lebesgue_mc_check(100_000, 10, 20, 1, e).unwrap())
        });
    }
    g.finish();
}

fn c0(c: &mut Criterion) {
    let ds: Vec<u64> = (2..1000).collect();
    let mut g = c.benchmark_group("estimate_c0_d1000");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| estimate_c0(&ds, 20, e).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("freq_sweep_sqrt2_n14");
    g.sample_size(10);
    for (name, exec) in MODES {
        let cfg = SweepConfig { n_min: 1, n_max: 14, exec, ..SweepConfig::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| freq_sweep(cfg).unwrap())
        });
    }
    g.finish();
}

fn trace(c: &mut Criterion) {
    let delta = RationalMat::from_i64(3, 4, 2, 3).unwrap();
    let mut g = c.benchmark_group("e_ratio_trace_p3_n16");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| e_ratio_trace(&delta, 3, 16, DEFAULT_BUDGET, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, mc, c0, sweep, trace);
criterion_main!(benches);
