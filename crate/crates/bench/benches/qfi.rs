use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qfi_probe::partial::{qfi_partial, score_diag_oracle};
use qfi_probe::{family, qfi_numeric, threshold_b_vs_o, SchemeSpec, SchmidtVector};

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("qfi_numeric");
    for d in [2usize, 3, 5] {
        for spec in [SchemeSpec::o(d), SchemeSpec::e(d), SchemeSpec::b(d)] {
            let fam = family(&spec).unwrap();
            let id = BenchmarkId::new(spec.label(), d);
            group.bench_with_input(id, &fam, |b, fam| b.iter(|| qfi_numeric(fam, black_box(0.7)).unwrap()));
        }
    }
    group.finish();
}

fn bench_partial(c: &mut Criterion) {
    let mut group = c.benchmark_group("partial");
    for d in [3usize, 6, 10] {
        let psi = SchmidtVector::normalized((1..=d).map(|k| k as f64).collect()).unwrap();
        group.bench_with_input(BenchmarkId::new("qfi_partial", d), &psi, |b, psi| {
            b.iter(|| qfi_partial(psi, black_box(0.6)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("score_diag_oracle", d), &psi, |b, psi| {
            b.iter(|| score_diag_oracle(psi, black_box(0.6)).unwrap())
        });
        if d <= 6 {
            let fam = family(&SchemeSpec::partial(psi.clone())).unwrap();
            group.bench_with_input(BenchmarkId::new("qfi_numeric", d), &fam, |b, fam| {
                b.iter(|| qfi_numeric(fam, black_box(0.6)).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_threshold(c: &mut Criterion) {
    c.bench_function("threshold_b_vs_o/d=10", |b| {
        b.iter(|| threshold_b_vs_o(black_box(10)).unwrap())
    });
}

criterion_group!(benches, bench_oracle, bench_partial, bench_threshold);
criterion_main!(benches);
