use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use plalam_core::diagnostics::{estimate_ck, estimate_lipschitz};
use plalam_core::envs::EnvSpec;
use plalam_core::partition::{build_partition, kmeans2};
use plalam_core::rng::seeded_rng;
use plalam_core::theorylab::{run_bandit, DeltaSchedule, RegionCdfSpec};
use plalam_core::{run_method, MethodConfig, Method, Objective, SearchBudget};

fn cloud(n: usize, dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = seeded_rng(seed);
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.normal()).collect()).collect();
    let values = points.iter().map(|p| -p.iter().map(|v| v * v).sum::<f64>()).collect();
    (points, values)
}

fn partition(c: &mut Criterion) {
    let (points, values) = cloud(500, 20, 1);
    c.bench_function("kmeans2_500x20", |b| b.iter(|| kmeans2(black_box(&points)).unwrap()));
    c.bench_function("build_partition_500x20", |b| {
        b.iter(|| build_partition(black_box(&points), &values, 10, &mut seeded_rng(2)).unwrap())
    });
}

fn estimators(c: &mut Criterion) {
    let (points, values) = cloud(200, 20, 3);
    c.bench_function("lipschitz_200", |b| b.iter(|| estimate_lipschitz(black_box(&points), &values).unwrap()));
    c.bench_function("ck_200", |b| b.iter(|| estimate_ck(black_box(&values), 20, 0.5).unwrap()));
}

fn rollouts(c: &mut Criterion) {
    let env = EnvSpec::FourRooms.build(0);
    let mut rng = seeded_rng(4);
    let x: Vec<f64> = (0..env.dim()).map(|_| rng.normal()).collect();
    c.bench_function("four_rooms_rollout", |b| b.iter(|| env.evaluate(black_box(&x))));
}

fn searches(c: &mut Criterion) {
    let budget = SearchBudget {
        total_queries: 300,
        n_init: 50,
        n_par: 50,
        n_thres: 10,
        cp: 2.0,
    };
    let env = EnvSpec::DeceptiveTwin { dim: 10 };
    let mut group = c.benchmark_group("search_300_queries");
    group.sample_size(10);
    for m in [Method::Plalam, Method::Cmaes, Method::Cem] {
        let cfg = MethodConfig::new(m).with_budget(budget);
        group.bench_function(m.name(), |b| b.iter(|| run_method(&env, &cfg, 0).unwrap()));
    }
    group.finish();
}

fn bandit(c: &mut Criterion) {
    let specs = [RegionCdfSpec::power_law(1.0, 1.0, 2), RegionCdfSpec::power_law(0.5, 0.5, 2)];
    let schedule = DeltaSchedule::InverseCubic { eta: 1.0 };
    c.bench_function("bandit_t10000", |b| {
        b.iter(|| run_bandit(&specs, 10_000, schedule, &mut seeded_rng(5)).unwrap())
    });
}

criterion_group!(benches, partition, estimators, rollouts, searches, bandit);
criterion_main!(benches);
