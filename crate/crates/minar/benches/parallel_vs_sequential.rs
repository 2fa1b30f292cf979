//! Compares the sequential reference paths against the rayon-backed ones at
//! several pool sizes. Run with `cargo bench --features parallel` (the
//! default feature set already includes `parallel`).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use minar::em::{e_step, fit, FitConfig};
use minar::likelihood::{log_likelihood, log_likelihood_seq};
use minar::mixtures::Family;
use minar::process::simulate;
use minar::scenarios::Scenario;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool construction")
}

fn thread_counts() -> Vec<usize> {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let mut counts = vec![1];
    if available > 1 {
        counts.push(available);
    }
    counts
}

fn bench_log_likelihood(c: &mut Criterion) {
    let params = Scenario::parse("A2B1C1")
        .unwrap()
        .model_params(Family::PoissonLognormal)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let series = simulate(&params, 300, 500, &mut rng).unwrap();
    let rule = params.innovations().quad_rule(10).unwrap();

    let mut group = c.benchmark_group("log_likelihood_t300_m10");
    group.bench_function("sequential", |b| {
        b.iter(|| log_likelihood_seq(&series, &params, &rule).unwrap())
    });
    for threads in thread_counts() {
        let p = pool(threads);
        group.bench_with_input(
            BenchmarkId::new("rayon", threads),
            &threads,
            |b, _| b.iter(|| p.install(|| log_likelihood(&series, &params, &rule).unwrap())),
        );
    }
    group.finish();
}

fn bench_e_step(c: &mut Criterion) {
    let params = Scenario::parse("A2B1C1")
        .unwrap()
        .model_params(Family::GeometricLogitnormal)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let series = simulate(&params, 300, 500, &mut rng).unwrap();
    let rule = params.innovations().quad_rule(10).unwrap();

    let mut group = c.benchmark_group("e_step_t300_m10");
    for threads in thread_counts() {
        let p = pool(threads);
        group.bench_with_input(
            BenchmarkId::new("rayon", threads),
            &threads,
            |b, _| b.iter(|| p.install(|| e_step(&series, &params, &rule).unwrap())),
        );
    }
    group.finish();
}

fn bench_full_fit(c: &mut Criterion) {
    let params = Scenario::parse("A2B1C1")
        .unwrap()
        .model_params(Family::PoissonLognormal)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let series = simulate(&params, 100, 500, &mut rng).unwrap();
    let config = FitConfig {
        quad_nodes: 8,
        tol: 1e-4,
        max_iter: 50,
        init: None,
    };

    let mut group = c.benchmark_group("fit_t100_m8");
    group.sample_size(10);
    for threads in thread_counts() {
        let p = pool(threads);
        group.bench_with_input(
            BenchmarkId::new("rayon", threads),
            &threads,
            |b, _| {
                b.iter(|| p.install(|| fit(&series, Family::PoissonLognormal, &config).unwrap()))
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_log_likelihood, bench_e_step, bench_full_fit);
criterion_main!(benches);
