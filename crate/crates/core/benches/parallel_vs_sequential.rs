use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ri2d_core::exec::{fold_replicas, Execution};
use ri2d_core::interlacements::{InterlacementConfig, MinLabelGrid, SoupSampler};
use ri2d_core::potential_kernel::PotentialKernel;
use ri2d_core::rng::RngSeed;
use ri2d_core::torus::excursion_count_check;

fn soups(c: &mut Criterion) {
    let kernel = PotentialKernel::build(128).unwrap();
    let cfg = InterlacementConfig::new(32, vec![0.5, 1.0], RngSeed::new(1, 0));
    let sampler = SoupSampler::new(&cfg, &kernel).unwrap();
    let mut group = c.benchmark_group("soup_batch_256");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                fold_replicas(
                    256,
                    exec,
                    || (0u64, MinLabelGrid::new(32)),
                    |(acc, grid), i| {
                        sampler.sample_into(&mut cfg.seed.child(i).rng(), grid);
                        *acc += grid.vacant_grid(1.0).vacant_count;
                    },
                    |(a, g), (b, _)| (a + b, g),
                )
                .0
            })
        });
    }
    group.finish();
}

fn torus(c: &mut Criterion) {
    let mut group = c.benchmark_group("torus_excursions_n128");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| {
                excursion_count_check(128, 0.5, 16, RngSeed::new(2, 0), exec)
                    .unwrap()
                    .estimate
                    .mean
            })
        });
    }
    group.finish();
}

criterion_group!(benches, soups, torus);
criterion_main!(benches);
