use std::hint::black_box;

use ackscope::acknet::{symmetric_acyclic_decomposition, triad_census, ExpectedModel};
use ackscope::assoc::{distance_correlation, louvain};
use ackscope::coupling::CouplingNetwork;
use ackscope_bench::{random_similarity, sparse_digraph};
use criterion::{criterion_group, criterion_main, Criterion};

fn network(c: &mut Criterion) {
    let g = sparse_digraph(5_000, 4, 1);
    c.bench_function("triad_census_5k", |b| b.iter(|| triad_census(black_box(&g), ExpectedModel::default()).unwrap()));
    c.bench_function("sym_acyclic_5k", |b| b.iter(|| symmetric_acyclic_decomposition(black_box(&g))));
}

fn layers(c: &mut Criterion) {
    let a = random_similarity(400, 3_000, 30, 2);
    let s = random_similarity(400, 3_000, 30, 3);
    c.bench_function("dcor_400", |b| b.iter(|| distance_correlation(black_box(&a), black_box(&s)).unwrap()));
    let net = CouplingNetwork::from_matrix(&a);
    c.bench_function("louvain_400", |b| b.iter(|| louvain(black_box(&net), 1.0).unwrap()));
}

criterion_group!(benches, network, layers);
criterion_main!(benches);
