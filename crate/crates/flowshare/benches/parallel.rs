//! Parallel-versus-sequential comparison of the batch layers: the
//! exhaustive coalition scan, the per-edge fixedness tests inside the
//! allocation loop, and corpus-level fan-out over instances.
//!
//! With the default `parallel` feature both execution modes are measured
//! side by side; without it only the sequential mode exists and the
//! comparison degenerates to a single series.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flowshare::egalitarian::{egalitarian_allocation_with, SolveOptions};
use flowshare::exchange::{build_game, solve_exchange, validate_instance, ExchangeInstance};
use flowshare::flow::max_flow;
use flowshare::gen::{corpus_instance, generate, GenParams};
use flowshare::par::ExecMode;
use flowshare::sharing::{
    build_profit_sharing_graph, check_core_with, extract_payments, CheckMode,
};

fn modes() -> Vec<(&'static str, ExecMode)> {
    let mut m = vec![("sequential", ExecMode::Sequential)];
    #[cfg(feature = "parallel")]
    m.push(("parallel", ExecMode::Parallel));
    m
}

/// A single instance big enough for the coalition scan to dominate.
fn wide_instance() -> ExchangeInstance {
    let params = GenParams {
        players: 16,
        trades: 24,
        max_capacity: 6,
        max_profit: 6,
    };
    validate_instance(&generate(&params, 11)).unwrap()
}

fn bench_core_scan(c: &mut Criterion) {
    let inst = wide_instance();
    let sol = solve_exchange(&inst).unwrap();
    let game = build_game(&sol).unwrap();
    let psg = build_profit_sharing_graph(&sol).unwrap();
    let payments = extract_payments(&psg, &max_flow(psg.network()).unwrap());

    let mut group = c.benchmark_group("exhaustive_core_scan_16p");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let report =
                    check_core_with(&payments, &game, CheckMode::Exhaustive, mode).unwrap();
                assert!(report.cr_ok);
            })
        });
    }
    group.finish();
}

fn bench_allocation(c: &mut Criterion) {
    let params = GenParams {
        players: 24,
        trades: 80,
        max_capacity: 8,
        max_profit: 8,
    };
    let inst = validate_instance(&generate(&params, 23)).unwrap();

    let mut group = c.benchmark_group("allocation_24p_80t");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            let opts = SolveOptions {
                exec: mode,
                ..Default::default()
            };
            b.iter(|| egalitarian_allocation_with(&inst, &opts).unwrap())
        });
    }
    group.finish();
}

fn bench_corpus(c: &mut Criterion) {
    let instances: Vec<ExchangeInstance> = (0..24)
        .map(|seed| validate_instance(&corpus_instance(seed, 8, 10)).unwrap())
        .collect();

    let mut group = c.benchmark_group("corpus_allocations_24x");
    group.sample_size(10);
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                let results = flowshare::par::run_map(mode, instances.clone(), |inst| {
                    egalitarian_allocation_with(&inst, &SolveOptions::default())
                        .unwrap()
                        .payments
                });
                assert_eq!(results.len(), instances.len());
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_core_scan, bench_allocation, bench_corpus);
criterion_main!(benches);
