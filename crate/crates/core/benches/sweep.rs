//! Sequential vs data-parallel throughput on the two replicate-sweep
//! kernels the CLI exercises hardest: scalar functionals over independent
//! configurations, and the full CLT harness. Run with
//! `cargo bench --bench sweep`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use topoperc::clt::{clt_harness, replicate_values, Standardization};
use topoperc::functionals::FunctionalSpec;
use topoperc::group::GroupModel;
use topoperc::par::ExecMode;

fn bench_replicates(c: &mut Criterion) {
    let model = GroupModel::zd(2).unwrap();
    let mut group = c.benchmark_group("replicate_sweep");
    group.sample_size(10);
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(
            BenchmarkId::new("cluster_count_r12_n200", mode.label()),
            &mode,
            |b, &mode| {
                b.iter(|| {
                    replicate_values(
                        &model,
                        &FunctionalSpec::ClusterCount,
                        0.3,
                        12,
                        200,
                        1,
                        mode,
                    )
                    .unwrap()
                });
            },
        );
    }
    group.finish();
}

fn bench_clt(c: &mut Criterion) {
    let model = GroupModel::zd(2).unwrap();
    let mut group = c.benchmark_group("clt_harness");
    group.sample_size(10);
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(
            BenchmarkId::new("open_edges_r10_n400", mode.label()),
            &mode,
            |b, &mode| {
                b.iter(|| {
                    clt_harness(
                        &model,
                        &FunctionalSpec::OpenEdgeCount,
                        0.3,
                        10,
                        400,
                        7,
                        Standardization::ByEmpiricalStd,
                        mode,
                    )
                    .unwrap()
                });
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_replicates, bench_clt);
criterion_main!(benches);
