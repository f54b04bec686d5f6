// SPDX-License-Identifier: MIT OR Apache-2.0

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use kernseg_bench::{mean_shift_signal, two_track_signal};
use kernseg_core::model_selection::select_with_slope_heuristic;
use kernseg_core::{
    binary_segmentation, kernseg, nystrom_embed, CostColumn, KernelGram, KernelSpec, LandmarkRule,
};
use std::hint::black_box;

fn gaussian() -> KernelSpec {
    KernelSpec::Gaussian { bandwidth: 1.0 }
}

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    group.sample_size(10);
    let kernel = gaussian();
    for n in [1000, 2000, 4000] {
        let signal = mean_shift_signal(n, 1);
        let gram = KernelGram::new(&kernel, &signal).unwrap();
        group.throughput(Throughput::Elements((n * n) as u64));
        group.bench_with_input(BenchmarkId::new("dmax20", n), &gram, |b, gram| {
            b.iter(|| kernseg(gram, 20).unwrap().final_loss(20))
        });
    }
    group.finish();
}

fn cost_column(c: &mut Criterion) {
    let mut group = c.benchmark_group("cost_column");
    let kernel = gaussian();
    let n = 2000;
    let signal = mean_shift_signal(n, 2);
    let gram = KernelGram::new(&kernel, &signal).unwrap();
    group.bench_function("sweep", |b| {
        b.iter(|| {
            let mut column = CostColumn::with_capacity(n);
            let mut buf = vec![0.0; n];
            for end in 1..=n {
                column.advance(&gram).unwrap();
                column.costs_into(&mut buf[..end]);
            }
            black_box(buf[0])
        })
    });
    group.finish();
}

fn lowrank(c: &mut Criterion) {
    let mut group = c.benchmark_group("lowrank");
    group.sample_size(20);
    let kernel = gaussian();
    for n in [10_000, 20_000, 40_000] {
        let signal = mean_shift_signal(n, 3);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("p100", n), &signal, |b, signal| {
            b.iter(|| {
                let embedding = nystrom_embed(signal, &kernel, &LandmarkRule::Grid, 100).unwrap();
                binary_segmentation(&embedding, 100, 1).unwrap().losses[99]
            })
        });
    }
    let profile = two_track_signal(20_000, 4);
    let sum = KernelSpec::per_coordinate(gaussian(), 2);
    group.bench_function("two_track_sum_p50", |b| {
        b.iter(|| {
            let embedding = nystrom_embed(&profile, &sum, &LandmarkRule::Grid, 50).unwrap();
            binary_segmentation(&embedding, 50, 1).unwrap().losses[49]
        })
    });
    group.finish();
}

fn selection(c: &mut Criterion) {
    let kernel = gaussian();
    let n = 2000;
    let signal = mean_shift_signal(n, 5);
    let losses = kernseg(&KernelGram::new(&kernel, &signal).unwrap(), 100)
        .unwrap()
        .final_losses();
    c.bench_function("slope_heuristic_dmax100", |b| {
        b.iter(|| {
            select_with_slope_heuristic(black_box(&losses), n, 1)
                .unwrap()
                .selected
        })
    });
}

criterion_group!(benches, exact, cost_column, lowrank, selection);
criterion_main!(benches);
