//! Seeded synthetic inputs for the benchmarks.

use std::collections::BTreeSet;

use ackscope::coupling::{similarity_from_sets, Layer};
use ackscope::{AckGraph, SimilarityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random digraph with `n` nodes and arc probability `p`.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> AckGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (0..n).map(move |t| (s, t)))
        .filter(|&(s, t)| s != t)
        .filter(|_| rng.random_bool(p))
        .collect();
    AckGraph::from_edges(n, &edges).expect("valid arcs")
}

/// Sparse digraph with about `avg_out` arcs per node, for sizes where the
/// dense sampler is too slow.
pub fn sparse_digraph(n: usize, avg_out: usize, seed: u64) -> AckGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeSet::new();
    for s in 0..n {
        for _ in 0..avg_out {
            let t = rng.random_range(0..n);
            if t != s {
                edges.insert((s, t));
            }
        }
    }
    AckGraph::from_edges(n, &edges.into_iter().collect::<Vec<_>>()).expect("valid arcs")
}

/// Similarity matrix over `papers` random item sets drawn from `universe`.
pub fn random_similarity(papers: usize, universe: u32, set_size: usize, seed: u64) -> SimilarityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets: Vec<BTreeSet<u32>> =
        (0..papers).map(|_| (0..set_size).map(|_| rng.random_range(0..universe)).collect()).collect();
    let ids = (0..papers).map(|i| format!("p{i:05}")).collect();
    similarity_from_sets(ids, &sets, Layer::Social).expect("non-empty sets")
}
