use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lensrank::composite::{measure_collection, MeasureConfig};
use lensrank::dataset::View2D;
use lensrank::parallel::Execution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn views(count: usize, n: usize, k: usize) -> Vec<View2D> {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    (0..count)
        .map(|_| {
            let centres: Vec<[f64; 2]> = (0..k).map(|_| [r.gen(), r.gen()]).collect();
            let mut points = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                let c = i % k;
                points.push([centres[c][0] + 0.2 * r.gen::<f64>(), centres[c][1] + 0.2 * r.gen::<f64>()]);
                labels.push(c);
            }
            View2D::from_points(points, labels).unwrap().normalized()
        })
        .collect()
}

fn bench_collection(c: &mut Criterion) {
    let cfg = MeasureConfig::default();
    let mut group = c.benchmark_group("measure_collection");
    group.sample_size(10);
    for (count, n) in [(16, 100), (32, 200)] {
        let vs = views(count, n, 3);
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, format!("{count}x{n}")), &vs, |b, vs| {
                b.iter(|| measure_collection(vs, &cfg, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_collection);
criterion_main!(benches);
