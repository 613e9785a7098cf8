use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use plantedbins::sampler::{throw_binomial_split, throw_per_ball};
use plantedbins::stream::derive_stream;
use plantedbins::{sample_pl, sample_st, Planting};

fn throws(c: &mut Criterion) {
    let mut group = c.benchmark_group("throw");
    for &(n, m) in &[(100usize, 10_000u64), (2500, 125_000), (10_000, 1_000_000)] {
        let label = format!("n={n},m={m}");
        group.bench_with_input(
            BenchmarkId::new("binomial_split", &label),
            &(n, m),
            |b, &(n, m)| {
                let mut rng = derive_stream(1, 0, 0);
                let mut bins = vec![0u64; n];
                b.iter(|| {
                    bins.fill(0);
                    throw_binomial_split(&mut bins, m, &mut rng);
                    black_box(&bins);
                });
            },
        );
        if m <= 125_000 {
            group.bench_with_input(
                BenchmarkId::new("per_ball", &label),
                &(n, m),
                |b, &(n, m)| {
                    let mut rng = derive_stream(1, 0, 0);
                    let mut bins = vec![0u64; n];
                    b.iter(|| {
                        bins.fill(0);
                        throw_per_ball(&mut bins, m, &mut rng);
                        black_box(&bins);
                    });
                },
            );
        }
    }
    group.finish();
}

fn configurations(c: &mut Criterion) {
    let p = Planting::single_bin(200, 50).unwrap();
    let mut rng = derive_stream(2, 0, 0);
    c.bench_function("sample_st n=200 m=497500", |b| {
        b.iter(|| black_box(sample_st(200, 497_500, &mut rng)))
    });
    c.bench_function("sample_pl n=200 m=497500", |b| {
        b.iter(|| black_box(sample_pl(&p, 497_500, &mut rng).unwrap()))
    });
}

criterion_group!(benches, throws, configurations);
criterion_main!(benches);
