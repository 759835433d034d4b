use criterion::{criterion_group, criterion_main, Criterion};
use etaq_core::search::{enumerate_eta_quotients, extract_basis, SearchConfig, SpaceKind};
use etaq_core::spaces::dim_cusp_forms;
use std::hint::black_box;

fn search(c: &mut Criterion) {
    let cfg = SearchConfig::default();
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for (level, k) in [(35u64, 2i64), (77, 4), (55, 8)] {
        group.bench_function(format!("S_{k}({level})"), |b| {
            b.iter(|| enumerate_eta_quotients(black_box(level), k, SpaceKind::Cusp, &cfg).unwrap())
        });
    }
    group.finish();

    let found = enumerate_eta_quotients(77, 4, SpaceKind::Cusp, &cfg).unwrap().found;
    let mut group = c.benchmark_group("basis");
    group.sample_size(10);
    group.bench_function("extract S_4(77)", |b| b.iter(|| extract_basis(black_box(&found), 77, 4).unwrap()));
    group.finish();

    c.bench_function("dim S_k(N), N < 1000", |b| {
        b.iter(|| (5..1000u64).map(|n| dim_cusp_forms(n, 8).unwrap()).sum::<i64>())
    });
}

criterion_group!(benches, search);
criterion_main!(benches);
