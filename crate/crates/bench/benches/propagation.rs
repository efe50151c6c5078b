use std::hint::black_box;

use bdqw_bench::{edge_walk, ehrenfest_walk, far_corner};
use bdqw_core::ctqw::spectra_for;
use bdqw_core::{transition_prob_dense, transition_prob_factorized, SpectralData};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn factorized_vs_dense(c: &mut Criterion) {
    let mut group = c.benchmark_group("edge_walk_transition");
    group.sample_size(10);
    for d in [2usize, 4, 6, 8, 10] {
        let spec = edge_walk(d);
        let start = vec![0; d];
        let target = far_corner(&spec);
        group.bench_with_input(BenchmarkId::new("factorized", d), &d, |b, _| {
            b.iter(|| {
                let spectra = spectra_for(&spec).unwrap();
                transition_prob_factorized(&spec, &spectra, black_box(1.0), &start, &target).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("dense", d), &d, |b, _| {
            b.iter(|| transition_prob_dense(&spec, black_box(1.0), &start, &target, 4096).unwrap())
        });
    }
    group.finish();
}

fn factorized_large(c: &mut Criterion) {
    let mut group = c.benchmark_group("factorized_only");
    for d in [20usize, 100, 1000] {
        let spec = edge_walk(d);
        let start = vec![0; d];
        let target = far_corner(&spec);
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| {
                let spectra = spectra_for(&spec).unwrap();
                transition_prob_factorized(&spec, &spectra, black_box(1.0), &start, &target).unwrap()
            })
        });
    }
    group.finish();
}

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("tridiagonal_eigensolver");
    for n in [4usize, 16, 64, 256] {
        let spec = ehrenfest_walk(1, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| SpectralData::for_dimension(black_box(&spec.dims()[0])).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, factorized_vs_dense, factorized_large, eigensolver);
criterion_main!(benches);
