use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thermolens::parallel::default_jobs;
use thermolens::thermometry::{
    run_sweep, run_sweep_sequential, Backend, MpsConfig, OptimizerOptions, Study, SweepGrid,
};

fn exact_grid() -> SweepGrid {
    SweepGrid {
        betas: (0..8).map(|i| 0.1 * 10f64.powf(i as f64 * 0.5)).collect(),
        hs: (0..16).map(|i| 0.125 * i as f64).collect(),
        ms: vec![2],
        r: 1,
        backend: Backend::default(),
    }
}

fn mps_grid() -> SweepGrid {
    SweepGrid {
        betas: vec![2.0],
        hs: vec![0.4, 0.8, 1.2, 1.6],
        ms: vec![2, 3],
        r: 1,
        backend: Backend::Mps(MpsConfig {
            n: 16,
            bond_dim: 8,
            ..MpsConfig::default()
        }),
    }
}

fn sweeps(c: &mut Criterion) {
    // At least two workers so the rayon path is exercised on small machines.
    let jobs = default_jobs().max(2);
    let study = Study::LocalTemp(OptimizerOptions::default());
    for (name, grid) in [("exact_local_temp", exact_grid()), ("mps_local_temp", mps_grid())] {
        let mut group = c.benchmark_group(name);
        group.sample_size(10);
        group.bench_function("sequential", |b| {
            b.iter(|| black_box(run_sweep_sequential(&grid, &study).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("parallel", jobs), &jobs, |b, &jobs| {
            b.iter(|| black_box(run_sweep(&grid, &study, jobs).unwrap()))
        });
        group.finish();
    }
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
