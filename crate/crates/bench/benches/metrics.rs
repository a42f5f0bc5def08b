use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use tasim_core::expansion::{TermSet, DEFAULT_TERM_CAP};
use tasim_core::simulator::{estimate_outage, SimulationOptions};
use tasim_core::{ChannelConfig, Model, Modulation};

fn config() -> ChannelConfig {
    ChannelConfig::at_point(vec![2, 1, 3, 2], vec![1.5, 2.0, 0.8, 3.0], vec![1.0, 0.4, 2.5, 1.2], 20.0).unwrap()
}

fn closed_forms(c: &mut Criterion) {
    let cfg = config();
    let mut g = c.benchmark_group("closed_form");
    g.bench_function("expansion build, L=4", |b| {
        b.iter(|| TermSet::new(black_box(&cfg.links()), DEFAULT_TERM_CAP).unwrap())
    });
    g.bench_function("model build, L=4", |b| b.iter(|| Model::new(black_box(&cfg)).unwrap()));
    let m = Model::new(&cfg).unwrap();
    let bpsk = Modulation::bpsk();
    g.bench_function("outage, L=4", |b| b.iter(|| m.outage_eval(black_box(1.0)).unwrap()));
    g.bench_function("sep bpsk, L=4", |b| b.iter(|| m.sep_eval(black_box(&bpsk)).unwrap()));
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let cfg = config();
    let opts = SimulationOptions { trials: 100_000, seed: 1, ..Default::default() };
    let mut g = c.benchmark_group("simulator");
    g.sample_size(10);
    g.bench_function("outage, 1e5 trials", |b| b.iter(|| estimate_outage(&cfg, black_box(&opts), 1.0).unwrap()));
    g.finish();
}

criterion_group!(benches, closed_forms, simulation);
criterion_main!(benches);
