use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use prokit_bench::{planted, FIN6};
use prokit_core::dmorphism::{d_equiv, extract_pro_iso};
use prokit_core::fuzz::{gen_directed_poset, gen_planted_level_iso, oracle_min_commutation, PlantSpec};
use prokit_core::indexset;
use prokit_core::system::{check_delay, check_strict, commutative_extract, min_commutation_index};
use prokit_core::Key;

fn commutation(c: &mut Criterion) {
    let mut g = c.benchmark_group("commutation");
    for h in [16usize, 32, 64] {
        let s = planted(h, 6, 1);
        g.bench_with_input(BenchmarkId::new("check_delay", h), &h, |b, &h| {
            b.iter(|| check_delay(black_box(&s), h).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("check_strict", h), &h, |b, &h| {
            b.iter(|| check_strict(black_box(&s), h).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("min_index_engine", h), &h, |b, &h| {
            b.iter(|| min_commutation_index(black_box(&s), &Key::Nat(0), h).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("min_index_oracle", h), &h, |b, &h| {
            b.iter(|| oracle_min_commutation(black_box(&s), &Key::Nat(0), h))
        });
    }
    g.finish();
}

fn reductions(c: &mut Criterion) {
    let s = planted(64, 6, 2);
    c.bench_function("commutative_extract/64", |b| b.iter(|| commutative_extract(black_box(&s), 64).unwrap()));

    let p = gen_directed_poset(3, 5).unwrap();
    c.bench_function("mardesic/5", |b| {
        b.iter(|| {
            let m = indexset::mardesic(black_box(&p)).unwrap();
            m.window_keys(1 << 10).len()
        })
    });
}

fn morphisms(c: &mut Criterion) {
    let p = gen_planted_level_iso(&PlantSpec::new(32, FIN6, 4).with_morphism_delay(4)).unwrap();
    c.bench_function("d_equiv/32", |b| b.iter(|| d_equiv(black_box(&p.morphism), &p.morphism, 32).unwrap()));
    c.bench_function("extract_pro_iso/32", |b| {
        b.iter(|| extract_pro_iso(black_box(&p.morphism), Some(&p.inverse), 32).unwrap())
    });
}

criterion_group!(benches, commutation, reductions, morphisms);
criterion_main!(benches);
