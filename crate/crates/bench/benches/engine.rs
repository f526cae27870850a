use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cokernel_core::dihedral::{burnside_dim, coinvariant_space, harmonic_coinvariant_dim};
use cokernel_core::johnson::{cokernel_quotient, default_signs, verify_diagram, verify_theorem};
use cokernel_core::linalg::{rank, SparseMatrix};
use cokernel_core::rep::{character_table, predict_top_piece};
use cokernel_core::symplectic::{Projector, SymplecticSpace, TensorVector};

fn linalg(c: &mut Criterion) {
    let rows: Vec<Vec<i64>> = (0..40).map(|i| (0..40).map(|j| ((i * 7 + j * 13) % 11) as i64 - 5).collect()).collect();
    let m = SparseMatrix::from_i64(&rows);
    c.bench_function("rank_40x40", |b| b.iter(|| rank(black_box(&m))));
}

fn projection(c: &mut Criterion) {
    let space = SymplecticSpace::new(3).unwrap();
    let words = space.all_words(4);
    c.bench_function("pi_all_words_g3_d4_cold", |b| {
        b.iter(|| {
            let pi = Projector::new();
            for w in words.iter().step_by(17) {
                black_box(pi.project(&TensorVector::word(3, w.clone())).unwrap());
            }
        })
    });
}

fn dihedral(c: &mut Criterion) {
    c.bench_function("burnside_n6_d6", |b| b.iter(|| burnside_dim(black_box(6), 6, -1).unwrap()));
    c.bench_function("coinvariants_brute_n4_d6", |b| b.iter(|| coinvariant_space(black_box(4), 6, 1).unwrap()));
    c.bench_function("target_g3_d3", |b| b.iter(|| harmonic_coinvariant_dim(black_box(3), 3, 1).unwrap()));
}

fn rep(c: &mut Criterion) {
    c.bench_function("character_table_7", |b| b.iter(|| character_table(black_box(7))));
    c.bench_function("predict_top_d6", |b| b.iter(|| predict_top_piece(black_box(6), -1, 6).unwrap()));
}

fn johnson(c: &mut Criterion) {
    let mut g = c.benchmark_group("johnson");
    g.sample_size(10);
    g.bench_function("theorem_d3_g3", |b| b.iter(|| verify_theorem(3, 3, default_signs(3)).unwrap()));
    g.bench_function("cokernel_d3_g3", |b| b.iter(|| cokernel_quotient(3, 3, -1).unwrap()));
    g.bench_function("diagram_d2_g2", |b| b.iter(|| verify_diagram(2, 2, 0, 0, -1).unwrap()));
    g.bench_function("diagram_d3_g3_10", |b| b.iter(|| verify_diagram(3, 3, 10, 0, -1).unwrap()));
    g.finish();
}

criterion_group!(benches, linalg, projection, dihedral, rep, johnson);
criterion_main!(benches);
