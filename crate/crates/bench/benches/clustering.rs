use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use modecluster::{
    gms_cluster, kmeans_run, kmodes_fixed_sigma_iter, GmsConfig, KMeansConfig, KModesConfig, Kde,
};
use modecluster_bench::{blobs, kmeans_start};

fn kmeans(c: &mut Criterion) {
    let mut g = c.benchmark_group("kmeans");
    for n in [1000, 4000] {
        let data = blobs(n, 10, 10);
        let cfg = KMeansConfig {
            restarts: 5,
            ..KMeansConfig::new(10)
        };
        g.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, d| {
            b.iter(|| kmeans_run(d, &cfg).unwrap())
        });
    }
    g.finish();
}

fn kmodes_iteration(c: &mut Criterion) {
    let mut g = c.benchmark_group("kmodes_iteration");
    for n in [1000, 2000, 4000, 8000] {
        let data = blobs(n, 10, 10);
        let start = kmeans_start(&data, 10);
        let cfg = KModesConfig::new(10);
        g.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, d| {
            b.iter(|| {
                kmodes_fixed_sigma_iter(d, &start.labels, &start.centroids, 1.0, &cfg).unwrap()
            })
        });
    }
    g.finish();
}

// Three mean-shift passes over every point, so the cost is dominated by the
// quadratic kde sweeps.
fn gms_iterations(c: &mut Criterion) {
    let mut g = c.benchmark_group("gms_3_iterations");
    g.sample_size(10);
    for n in [500, 1000, 2000] {
        let data = blobs(n, 10, 10);
        let cfg = GmsConfig {
            tol: 1e-300,
            max_iters: 3,
            ..GmsConfig::new(1.0)
        };
        g.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, d| {
            b.iter(|| gms_cluster(d, &cfg).unwrap())
        });
    }
    g.finish();
}

fn kde_eval(c: &mut Criterion) {
    let data = blobs(4000, 10, 10);
    let kde = Kde::new(&data, 1.0).unwrap();
    let x = data.row(17).to_vec();
    c.bench_function("kde_log_eval_4000x10", |b| {
        b.iter(|| kde.log_eval(&x).unwrap())
    });
    c.bench_function("mean_shift_step_4000x10", |b| {
        b.iter(|| kde.mean_shift_step(&x).unwrap())
    });
}

criterion_group!(benches, kmeans, kmodes_iteration, gms_iterations, kde_eval);
criterion_main!(benches);
