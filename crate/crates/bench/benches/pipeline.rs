use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fgf_bench::{fixture, random_rows, trade_off};
use fgf_core::corpus::{load_offline, match_counts};
use fgf_core::frontier::{hypervolume_exact2d, pareto_front, REFERENCE_POINT};
use fgf_core::fusion::{kpca_fit, Kernel, DEFAULT_TARGET_VARIANCE};
use fgf_core::keywords::KeywordTaxonomy;
use fgf_core::optimizer::{run, Algorithm, RunConfig};
use fgf_core::validate::{kmeans, silhouette};

fn optimizer(c: &mut Criterion) {
    let docs = load_offline(fixture("corpus_200.jsonl")).unwrap();
    let pool = KeywordTaxonomy::default_table().pool().to_vec();
    let profile = match_counts(&docs, &pool).unwrap();
    let mut g = c.benchmark_group("optimizer");
    g.sample_size(10);
    for algo in [Algorithm::Hncsa, Algorithm::Csa, Algorithm::Nsga2] {
        let cfg = RunConfig::default().with_algo(algo).with_seed(1);
        g.bench_function(BenchmarkId::from_parameter(algo.name()), |b| {
            b.iter(|| run(black_box(&cfg), &profile).unwrap())
        });
    }
    g.finish();
    c.bench_function("match_counts/corpus_200", |b| {
        b.iter(|| match_counts(black_box(&docs), &pool).unwrap())
    });
}

fn frontier(c: &mut Criterion) {
    let mut g = c.benchmark_group("frontier");
    for n in [100, 1000] {
        let pts = trade_off(n, 3);
        g.bench_with_input(BenchmarkId::new("pareto_front", n), &pts, |b, p| {
            b.iter(|| pareto_front(p))
        });
        let front = pareto_front(&pts);
        g.bench_with_input(
            BenchmarkId::new("hypervolume_exact2d", n),
            &front,
            |b, f| b.iter(|| hypervolume_exact2d(f, REFERENCE_POINT).unwrap()),
        );
    }
    g.finish();
}

fn kpca(c: &mut Criterion) {
    let mut g = c.benchmark_group("kpca_fit");
    g.sample_size(10);
    for n in [60, 200] {
        let rows = random_rows(n, 384, 5);
        g.bench_with_input(BenchmarkId::from_parameter(n), &rows, |b, r| {
            b.iter(|| kpca_fit(r, Kernel::default(), DEFAULT_TARGET_VARIANCE).unwrap())
        });
    }
    g.finish();
}

fn validation(c: &mut Criterion) {
    let rows = random_rows(500, 32, 9);
    let fit = kmeans(&rows, 12, 0, 300).unwrap();
    c.bench_function("kmeans/500x32/k12", |b| {
        b.iter(|| kmeans(black_box(&rows), 12, 0, 300).unwrap())
    });
    c.bench_function("silhouette/500x32", |b| {
        b.iter(|| silhouette(black_box(&rows), &fit.assignments).unwrap())
    });
}

criterion_group!(benches, optimizer, frontier, kpca, validation);
criterion_main!(benches);
