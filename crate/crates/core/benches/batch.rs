use baernstein::par;
use baernstein::sampling;
use baernstein::{norm_sq, FamilySpec, SparseVector};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn batch(c: &mut Criterion) {
    let mut rng = sampling::rng(11);
    let spec = FamilySpec::schreier1();
    let xs: Vec<SparseVector> = (0..48).map(|_| sampling::nat_vector(&mut rng, 16, 11, true)).collect();
    let eval = |x: &SparseVector| norm_sq(&spec, x).unwrap().norm_sq;

    let mut group = c.benchmark_group("norm_batch");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| par::map_seq(black_box(&xs), eval)));
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| par::map_par(black_box(&xs), eval)));
    group.finish();
}

fn subset_table(c: &mut Criterion) {
    // best partition value under unit weights, the same recurrence shape as the norm DP
    let f = |s: usize, t: &[u64]| {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut best = 0;
        let mut sub = rest;
        loop {
            let block = sub | low;
            let size = block.count_ones() as u64;
            best = best.max(size * size + t[s ^ block]);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best
    };
    let mut group = c.benchmark_group("subset_table");
    group.sample_size(10);
    for n in [12usize, 14] {
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| par::fill_subset_table_seq(n, 0u64, f))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| par::fill_subset_table_par(n, 0u64, f))
        });
    }
    group.finish();
}

criterion_group!(benches, batch, subset_table);
criterion_main!(benches);
