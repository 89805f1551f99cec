//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Criteria 1-9 are self-contained; the remaining
//! checks recompute published figures from the numbers printed in the
//! source tables, since the underlying dataset is not bundled.
#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};

use ackscope::acknet::{
    build_network, choose3, classify_code, dyad_census, expected_triads_exact, observed_triads,
    symmetric_acyclic_decomposition, AckGraph, DyadCensus, ExpectedModel, TriadType,
};
use ackscope::assoc::{
    contingency, distance_correlation_raw, louvain, pearson_r2, CommunityPartition, ContingencyResult,
};
use ackscope::coupling::{jaccard, CouplingNetwork, Layer};
use ackscope::mentions::lorenz_gini;
use ackscope::Partition;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// networkx triad labels for the six-bit codes (bit0 a→b, bit1 b→a, bit2
/// a→c, bit3 c→a, bit4 b→c, bit5 c→b).
const NX_TRIAD_CODES: [&str; 64] = [
    "003", "012", "012", "102", "012", "021D", "021C", "111U", "012", "021C", "021U", "111D", "102", "111U", "111D",
    "201", "012", "021C", "021D", "111U", "021U", "030T", "030T", "120U", "021C", "030C", "030T", "120C", "111D",
    "120C", "120D", "210", "012", "021U", "021C", "111D", "021C", "030T", "030C", "120C", "021D", "030T", "030T",
    "120D", "111U", "120U", "120C", "210", "102", "111D", "111U", "201", "111D", "120D", "120C", "210", "111U", "120C",
    "120U", "210", "201", "210", "210", "300",
];

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> (AckGraph, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(p) {
                edges.push((s, t));
            }
        }
    }
    (AckGraph::from_edges(n, &edges).unwrap(), edges)
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(s, t) in edges {
        adj[s][t] = true;
    }
    adj
}

fn naive_census(n: usize, adj: &[Vec<bool>]) -> [u64; 16] {
    let mut out = [0u64; 16];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let bits = [(a, b), (b, a), (a, c), (c, a), (b, c), (c, b)];
                let code = bits.iter().enumerate().fold(0usize, |acc, (k, &(x, y))| acc | ((adj[x][y] as usize) << k));
                let t: TriadType = NX_TRIAD_CODES[code].parse().unwrap();
                out[t.index()] += 1;
            }
        }
    }
    out
}

fn criterion_1() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let n = rng.random_range(3..=60);
        let p = [0.01, 0.05, 0.15, 0.4, 0.8][rng.random_range(0..5)];
        let (g, edges) = random_graph(&mut rng, n, p);
        assert_eq!(observed_triads(&g).unwrap(), naive_census(n, &adjacency(n, &edges)), "n={n} p={p}");
    }
}

fn criterion_2() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let n = rng.random_range(3..=200u64);
        let d = n * (n - 1) / 2;
        let mutual = rng.random_range(0..=d);
        let asymmetric = rng.random_range(0..=d - mutual);
        let dyads = DyadCensus { mutual, asymmetric, null: d - mutual - asymmetric };
        for model in [ExpectedModel::DyadConditional, ExpectedModel::ArcBernoulli] {
            let e = expected_triads_exact(n, &dyads, model).unwrap();
            let total: f64 = e.iter().map(|x| x.to_f64().unwrap()).sum();
            let c = choose3(n) as f64;
            assert!(((total - c) / c).abs() < 1e-6, "{total} vs {c}");
            assert!(e.iter().all(|x| x >= &BigRational::from_integer(0.into())));
        }
    }
    let g = AckGraph::from_edges(3, &[(0, 1), (1, 0)]).unwrap();
    let d = dyad_census(&g);
    assert_eq!((d.mutual, d.asymmetric, d.null), (1, 0, 2));
    let e = expected_triads_exact(3, &d, ExpectedModel::DyadConditional).unwrap();
    assert_eq!(e[TriadType::T102.index()], BigRational::new(BigInt::from(4), BigInt::from(9)));
    assert_eq!(e[TriadType::T102.index()].to_f64().unwrap(), 4.0 / 9.0);
}

fn relabel(code: u8, perm: [usize; 3]) -> u8 {
    let pairs = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
    let mut out = 0u8;
    for (k, &(x, y)) in pairs.iter().enumerate() {
        if code >> k & 1 == 1 {
            let (px, py) = (perm[x], perm[y]);
            let bit = pairs.iter().position(|&p| p == (px, py)).unwrap();
            out |= 1 << bit;
        }
    }
    out
}

fn criterion_3() {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for code in 0u8..64 {
        let t = classify_code(code);
        assert_eq!(t.code(), NX_TRIAD_CODES[code as usize]);
        for p in perms {
            assert_eq!(classify_code(relabel(code, p)), t, "code {code} perm {p:?}");
        }
    }
}

/// Clusters after seeding and mutual-quotient merging, computed naively.
fn naive_mutual_clusters(n: usize, adj: &[Vec<bool>]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    let relabel_all = |label: &mut Vec<usize>, from: usize, to: usize| {
        for l in label.iter_mut() {
            if *l == from {
                *l = to;
            }
        }
    };
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if label[x] == label[y] {
                    continue;
                }
                let (cx, cy) = (label[x], label[y]);
                let forward = (0..n).any(|u| label[u] == cx && (0..n).any(|v| label[v] == cy && adj[u][v]));
                let back = (0..n).any(|u| label[u] == cy && (0..n).any(|v| label[v] == cx && adj[u][v]));
                if forward && back {
                    relabel_all(&mut label, cx.max(cy), cx.min(cy));
                    changed = true;
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

fn quotient_has_cycle(n: usize, adj: &[Vec<bool>], label: &[usize]) -> bool {
    let mut reach = vec![vec![false; n]; n];
    for u in 0..n {
        for v in 0..n {
            if adj[u][v] && label[u] != label[v] {
                reach[label[u]][label[v]] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    (0..n).any(|c| reach[c][c])
}

fn criterion_4() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut acyclic_cases = 0;
    for round in 0..200 {
        let n = rng.random_range(2..=25);
        let (g, edges) = if round % 2 == 0 {
            let p = [0.03, 0.08, 0.2][rng.random_range(0..3)];
            random_graph(&mut rng, n, p)
        } else {
            // blocks with internal reciprocation, forward-only arcs between blocks
            let block: Vec<usize> = (0..n).map(|v| v / rng.random_range(1..=4)).collect();
            let mut edges = BTreeSet::new();
            for s in 0..n {
                for t in 0..n {
                    if s == t {
                        continue;
                    }
                    if block[s] == block[t] && s < t && rng.random_bool(0.5) {
                        edges.insert((s, t));
                        edges.insert((t, s));
                    } else if block[s] < block[t] && rng.random_bool(0.2) {
                        edges.insert((s, t));
                    }
                }
            }
            let edges: Vec<_> = edges.into_iter().collect();
            (AckGraph::from_edges(n, &edges).unwrap(), edges)
        };
        let adj = adjacency(n, &edges);
        let r = symmetric_acyclic_decomposition(&g);
        let p = &r.partition;
        for &(s, t) in &edges {
            if adj[t][s] {
                assert_eq!(p.cluster_of(s), p.cluster_of(t), "reciprocated dyad split");
            }
            if p.cluster_of(s) != p.cluster_of(t) {
                assert!(r.rank_of_node(s) < r.rank_of_node(t), "rank not increasing along arc");
            }
        }
        assert!(!quotient_has_cycle(n, &adj, p.labels()), "quotient has a cycle");
        let naive = naive_mutual_clusters(n, &adj);
        if !quotient_has_cycle(n, &adj, &naive) {
            acyclic_cases += 1;
            assert_eq!(r.errors, 0);
            assert_eq!(Partition::from_labels(p.labels()), Partition::from_labels(&naive));
        } else {
            assert!(r.errors > 0);
        }
    }
    assert!(acyclic_cases >= 100, "only {acyclic_cases} acyclic cases");
}

fn gini_pairwise(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let s: f64 = x.iter().flat_map(|a| x.iter().map(move |b| (a - b).abs())).sum();
    s / (2.0 * n * n * mean)
}

fn criterion_5() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let n = rng.random_range(1..=200);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
        let g = lorenz_gini(&x).unwrap().gini;
        assert!((g - gini_pairwise(&x)).abs() < 1e-12);
        let scaled: Vec<f64> = x.iter().map(|v| v * 2.0).collect();
        assert_eq!(lorenz_gini(&scaled).unwrap().gini, g);
        let scaled: Vec<f64> = x.iter().map(|v| v * 3.7).collect();
        assert!((lorenz_gini(&scaled).unwrap().gini - g).abs() < 1e-12);
    }
    assert_eq!(lorenz_gini(&[0.0, 0.0, 0.0, 1.0]).unwrap().gini, 0.75);
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, dyadic: bool) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = if dyadic { rng.random_range(0..=64) as f64 / 64.0 } else { rng.random_range(0.0..1.0) };
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

fn euclidean(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let pts: Vec<[f64; 3]> = (0..n).map(|_| [0; 3].map(|_| rng.random_range(-1.0..1.0))).collect();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = pts[i].iter().zip(&pts[j]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        }
    }
    m
}

fn dcov_double_sum(a: &[f64], b: &[f64], n: usize) -> f64 {
    let nf = n as f64;
    let (mut s1, mut sa, mut sb, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            s1 += a[j * n + k] * b[j * n + k];
            sa += a[j * n + k];
            sb += b[j * n + k];
            for l in 0..n {
                s3 += a[j * n + k] * b[j * n + l];
            }
        }
    }
    s1 / (nf * nf) + (sa / (nf * nf)) * (sb / (nf * nf)) - 2.0 * s3 / nf.powi(3)
}

fn criterion_6() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 10;
    for _ in 0..100 {
        let (a, b) = (random_symmetric(&mut rng, n, false), random_symmetric(&mut rng, n, false));
        let r = distance_correlation_raw(&a, &b, n).unwrap();
        // arbitrary symmetric matrices need not be of negative type, so the
        // raw ratio can dip below zero; R_d is reported clamped
        let oracle = dcov_double_sum(&a, &b, n) / (dcov_double_sum(&a, &a, n) * dcov_double_sum(&b, &b, n)).sqrt();
        assert!((r.r_d - oracle.clamp(0.0, 1.0)).abs() < 1e-10, "{} vs {oracle}", r.r_d);
        assert!((r.dcov2 - dcov_double_sum(&a, &b, n)).abs() < 1e-10);
        assert_eq!(distance_correlation_raw(&a, &a, n).unwrap().r_d, 1.0);

        let (ea, eb) = (euclidean(&mut rng, n), euclidean(&mut rng, n));
        let oracle =
            dcov_double_sum(&ea, &eb, n) / (dcov_double_sum(&ea, &ea, n) * dcov_double_sum(&eb, &eb, n)).sqrt();
        assert!(oracle >= 0.0);
        assert!((distance_correlation_raw(&ea, &eb, n).unwrap().r_d - oracle).abs() < 1e-10);

        // similarities (unit diagonal) versus distances 1 - s on dyadic values
        let with_unit_diagonal = |mut m: Vec<f64>| {
            (0..n).for_each(|i| m[i * n + i] = 1.0);
            m
        };
        let s = with_unit_diagonal(random_symmetric(&mut rng, n, true));
        let t = with_unit_diagonal(random_symmetric(&mut rng, n, true));
        let flip = |m: &[f64]| -> Vec<f64> { m.iter().map(|v| 1.0 - v).collect() };
        let d = distance_correlation_raw(&flip(&s), &flip(&t), n).unwrap();
        let raw = distance_correlation_raw(&s, &t, n).unwrap();
        assert_eq!(raw.r_d, d.r_d);
        assert_eq!(raw.dcov2, d.dcov2);
    }
}

fn criterion_7() {
    let set = |xs: &[u32]| xs.iter().copied().collect::<BTreeSet<u32>>();
    assert_eq!(jaccard(&set(&[1, 2, 3]), &set(&[2, 3, 4])).unwrap(), 0.5);
    assert_eq!(jaccard(&set(&[1, 2]), &set(&[1, 2])).unwrap(), 1.0);
    assert_eq!(jaccard(&set(&[1]), &set(&[2])).unwrap(), 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let (r, c) = (rng.random_range(2..=7), rng.random_range(2..=7));
        let table: Vec<Vec<u64>> = (0..r).map(|_| (0..c).map(|_| rng.random_range(1..200)).collect()).collect();
        let res = ContingencyResult::from_table(
            (0..r).map(|i| i.to_string()).collect(),
            (0..c).map(|j| j.to_string()).collect(),
            table,
        )
        .unwrap();
        let sum: BigRational = res.squared_residuals_exact().into_iter().flatten().sum();
        assert_eq!(sum, res.chi2_exact());
        let float_sum: f64 = res.residuals.iter().flatten().map(|x| x * x).sum();
        assert!((float_sum - res.chi2).abs() <= 1e-9 * res.chi2.max(1.0));

        let n = rng.random_range(10..300);
        let k = rng.random_range(2..8);
        let labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
        let papers: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let part = CommunityPartition::from_labels(papers, &labels).unwrap();
        assert_eq!(contingency(&part, &part, k, k).unwrap().cramers_v, 1.0);

        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1000..1000) as f64).collect();
        if x.iter().any(|v| *v != x[0]) {
            let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 7.0).collect();
            assert_eq!(pearson_r2(&x, &y).unwrap(), 1.0);
        }
    }
}

fn criterion_8() {
    let p = common::fixture_pipeline();
    let g = build_network(&p.corpus, &p.index, &p.aliases.table).unwrap();
    let mut checked = 0;
    for (id, &count) in p.index.counts() {
        let v = g.node(id).unwrap();
        assert_eq!(g.in_weight(v), BigRational::from_integer(BigInt::from(count)), "{id}");
        checked += 1;
    }
    assert!(checked > 0);
    let total = BigRational::from_integer(BigInt::from(p.index.total_mentions()));
    assert_eq!(g.total_weight(), total);
}

fn modularity_oracle(n: usize, edges: &[(usize, usize, f64)], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let m2: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / m2;
            }
        }
    }
    q / m2
}

/// Restricted growth strings enumerate every set partition once.
fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=max + 1 {
            cur[i] = v;
            rec(i + 1, max.max(v), cur, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut cur, &mut out);
    }
    out
}

fn criterion_9() {
    let edges = vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)];
    let papers: Vec<String> = (0..6).map(|i| format!("p{i}")).collect();
    let net = CouplingNetwork::new(papers.clone(), Layer::Social, edges.clone()).unwrap();
    let parts = all_partitions(6);
    assert_eq!(parts.len(), 203);
    let best = parts
        .iter()
        .max_by(|a, b| modularity_oracle(6, &edges, a).total_cmp(&modularity_oracle(6, &edges, b)))
        .unwrap();
    let res = louvain(&net, 1.0).unwrap();
    assert_eq!(res.community_count(), 2);
    assert_eq!(res.partition, Partition::from_labels(best));
    let q = res.modularity.unwrap();
    assert!((q - modularity_oracle(6, &edges, res.partition.labels())).abs() < 1e-10);
    assert!((q - modularity_oracle(6, &edges, best)).abs() < 1e-10);

    let single = CouplingNetwork::new(papers[..2].to_vec(), Layer::Social, vec![(0, 1, 1.0)]).unwrap();
    let two = all_partitions(2);
    let best2 = two
        .iter()
        .max_by(|a, b| modularity_oracle(2, &[(0, 1, 1.0)], a).total_cmp(&modularity_oracle(2, &[(0, 1, 1.0)], b)))
        .unwrap();
    assert_eq!(louvain(&single, 1.0).unwrap().partition, Partition::from_labels(best2));

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let n = rng.random_range(2..=30);
        let mut es = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.2) {
                    es.push((i, j, rng.random_range(1..=8) as f64 / 8.0));
                }
            }
        }
        if es.is_empty() {
            continue;
        }
        let net =
            CouplingNetwork::new((0..n).map(|i| i.to_string()).collect(), Layer::Intellectual, es.clone()).unwrap();
        let r = louvain(&net, 1.0).unwrap();
        let q = r.modularity.unwrap();
        assert!((q - modularity_oracle(n, &es, r.partition.labels())).abs() < 1e-10);
        assert!(r.level_modularity.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}

// --- published-number spot checks -------------------------------------

/// Observed triad counts of the published census, in `TriadType::ALL` order.
const PUBLISHED_OBSERVED: [u64; 16] = [
    116_988_297_532,
    304_448_721,
    3_215_762,
    477_196,
    186_699,
    241_140,
    13_976,
    21_843,
    12_165,
    221,
    578,
    749,
    885,
    403,
    200,
    10,
];
const PUBLISHED_EXPECTED: [f64; 16] = [
    116_984_419_091.93,
    312_151_732.07,
    69_410.0,
    69_410.03,
    69_410.03,
    138_820.06,
    61.74,
    61.74,
    61.74,
    20.58,
    0.01,
    0.01,
    0.01,
    0.03,
    0.00,
    0.00,
];
const NODES: u64 = 8_896;

/// Mutual and asymmetric dyads implied by the observed triads: every dyad
/// lies in n - 2 triads.
fn published_dyads() -> (f64, f64) {
    let (mut m, mut a) = (0.0, 0.0);
    for t in TriadType::ALL {
        let c = t.code().as_bytes();
        let count = PUBLISHED_OBSERVED[t.index()] as f64;
        m += (c[0] - b'0') as f64 * count;
        a += (c[1] - b'0') as f64 * count;
    }
    (m / (NODES - 2) as f64, a / (NODES - 2) as f64)
}

fn spot_triad_totals() {
    assert_eq!(PUBLISHED_OBSERVED.iter().sum::<u64>(), choose3(NODES));
    let sum_of = |f: fn(TriadType) -> bool| -> u64 {
        TriadType::ALL.into_iter().filter(|t| f(*t)).map(|t| PUBLISHED_OBSERVED[t.index()]).sum()
    };
    assert_eq!(sum_of(TriadType::is_transitive), 13_809);
    assert_eq!(sum_of(TriadType::is_intransitive), 278_361);
}

fn spot_expected_column() {
    let (m, a) = published_dyads();
    assert_eq!(m, 366.0);
    let d = NODES * (NODES - 1) / 2;
    let dyads = DyadCensus { mutual: m as u64, asymmetric: a.round() as u64, null: d - m as u64 - a.round() as u64 };
    let e = expected_triads_exact(NODES, &dyads, ExpectedModel::ArcBernoulli).unwrap();
    for t in TriadType::ALL {
        let (got, want) = (e[t.index()].to_f64().unwrap(), PUBLISHED_EXPECTED[t.index()]);
        if want >= 1.0 {
            assert!(((got - want) / want).abs() < 1e-3, "{t}: {got} vs {want}");
        } else {
            assert!(got < 0.05, "{t}: {got}");
        }
    }
    let sum = |f: fn(TriadType) -> bool| -> f64 {
        TriadType::ALL.into_iter().filter(|t| f(*t)).map(|t| e[t.index()].to_f64().unwrap()).sum()
    };
    assert!((sum(TriadType::is_transitive) - 61.76).abs() < 0.06);
    assert!(((sum(TriadType::is_intransitive) - 138_964.15) / 138_964.15).abs() < 1e-3);
    let dyad_model = expected_triads_exact(NODES, &dyads, ExpectedModel::DyadConditional).unwrap();
    println!(
        "    note: e(102) arc-bernoulli {:.2}, dyad-conditional {:.2}, published 69410.0",
        e[2].to_f64().unwrap(),
        dyad_model[2].to_f64().unwrap()
    );
}

fn published_table5() -> ContingencyResult {
    let rows = vec![
        vec![75, 6, 12, 4, 6, 23, 27],
        vec![1, 20, 10, 17, 121, 14, 25],
        vec![8, 15, 28, 2, 4, 16, 21],
        vec![14, 25, 33, 8, 8, 96, 19],
        vec![22, 7, 54, 103, 8, 22, 7],
        vec![2, 58, 4, 3, 5, 8, 3],
    ];
    ContingencyResult::from_table(
        "ABCDEF".chars().map(String::from).collect(),
        (1..=7).map(|j| j.to_string()).collect(),
        rows,
    )
    .unwrap()
}

fn spot_contingency() {
    let t = published_table5();
    assert_eq!(t.n, 964);
    assert_eq!(t.dof, 30);
    assert!((t.chi2 - 1146.883).abs() < 5e-4, "{}", t.chi2);
    assert!((t.residuals[1][4] - 15.4).abs() < 0.01);
    assert!((t.expected[1][4] - 208.0 * 152.0 / 964.0).abs() < 1e-12);
    assert!((t.cramers_v - 0.488).abs() < 5e-4);
    println!("    note: Cramér's V recomputed {:.4}; the source reports 0.45", t.cramers_v);
}

fn spot_counts() {
    let katz = [4u64, 11, 6, 1, 4, 23, 16];
    assert_eq!(katz.iter().sum::<u64>(), 65);
    assert_eq!(katz.iter().filter(|&&x| x > 0).count(), 7);
    let (acknowledgees, authors, nodes) = (2_193u64, 7_887u64, 8_896u64);
    assert_eq!(acknowledgees + authors - nodes, 1_184, "nodes in both roles");
}

fn main() {
    let checks: Vec<(&str, &str, fn())> = vec![
        ("1", "fast triad census equals naive enumeration on 100 random digraphs", criterion_1),
        ("2", "expected triads sum to C(n,3); e(102) = 4/9 on M=1,A=0,N=2", criterion_2),
        ("3", "triad classification invariant under all relabelings", criterion_3),
        ("4", "symmetric-acyclic decomposition invariants on 200 random digraphs", criterion_4),
        ("5", "Gini: rank formula vs pairwise oracle, [0,0,0,1] -> 0.75, scale invariance", criterion_5),
        ("6", "distance correlation vs double-sum oracle, self = 1, s <-> 1-s", criterion_6),
        ("7", "Jaccard, chi2 = sum residual^2, V = 1 on identical partitions, R^2 = 1 on linear data", criterion_7),
        ("8", "fixture network: weighted in-degree equals distinct-paper mentions", criterion_8),
        ("9", "Louvain: two triangles match exhaustive search; modularity recomputes", criterion_9),
        ("S1", "published census sums to C(8896,3); transitive 13,809, intransitive 278,361", spot_triad_totals),
        ("S2", "published expected column reproduced within 0.1% by the arc-density model", spot_expected_column),
        ("S3", "contingency table: chi2 1146.883, dof 30, residual(B,5) 15.4, V 0.488", spot_contingency),
        ("S4", "mention decomposition row total and node-role arithmetic", spot_counts),
    ];
    std::panic::set_hook(Box::new(|info| eprintln!("    {info}")));
    let mut failed = 0;
    for (id, name, check) in checks {
        let ok = catch_unwind(AssertUnwindSafe(check)).is_ok();
        println!("criterion {id:>2} {}: {name}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
