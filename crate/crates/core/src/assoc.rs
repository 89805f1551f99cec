//! Association between the social and intellectual layers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupling::{CouplingNetwork, SimilarityMatrix};
use crate::mentions::{MentionIndex, ScholarId};
use crate::partition::Partition;
use crate::{Error, Result};

/// Squared distance correlation and its root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationResult {
    pub r_d: f64,
    pub sqrt_r_d: f64,
    pub dcov2: f64,
    pub dvar2_a: f64,
    pub dvar2_b: f64,
}

/// Double-centered matrix scaled by n²: `n²a - n·row - n·col + total`.
/// Staying free of divisions keeps dyadic inputs exact.
fn centered(d: &[f64], n: usize) -> Vec<f64> {
    let nf = n as f64;
    let row: Vec<f64> = (0..n).map(|j| d[j * n..(j + 1) * n].iter().sum()).collect();
    let col: Vec<f64> = (0..n).map(|k| (0..n).map(|j| d[j * n + k]).sum()).collect();
    let total: f64 = row.iter().sum();
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (j, k) = (idx / n, idx % n);
            nf * nf * d[idx] - nf * row[j] - nf * col[k] + total
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64], n: usize) -> f64 {
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| a[j * n..(j + 1) * n].iter().zip(&b[j * n..(j + 1) * n]).map(|(x, y)| x * y).sum())
        .collect();
    rows.iter().sum()
}

/// Distance correlation of two row-major `n × n` dissimilarity matrices
/// (V-statistic, no bias correction). Zero when either distance variance is
/// zero.
pub fn distance_correlation_raw(a: &[f64], b: &[f64], n: usize) -> Result<AssociationResult> {
    if a.len() != n * n || b.len() != n * n {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if n == 0 {
        return Err(Error::EmptyInput("distance matrices"));
    }
    let (ca, cb) = (centered(a, n), centered(b, n));
    let (ab, aa, bb) = (dot(&ca, &cb, n), dot(&ca, &ca, n), dot(&cb, &cb, n));
    let scale = (n as f64).powi(6);
    let r_d = if aa == 0.0 || bb == 0.0 { 0.0 } else { (ab / (aa * bb).sqrt()).clamp(0.0, 1.0) };
    Ok(AssociationResult { r_d, sqrt_r_d: r_d.sqrt(), dcov2: ab / scale, dvar2_a: aa / scale, dvar2_b: bb / scale })
}

/// Distance correlation between two similarity layers over the same papers,
/// using `1 - s` as dissimilarity.
pub fn distance_correlation(a: &SimilarityMatrix, b: &SimilarityMatrix) -> Result<AssociationResult> {
    if a.papers() != b.papers() {
        return Err(Error::MismatchedPapers);
    }
    let da: Vec<f64> = a.values().iter().map(|s| 1.0 - s).collect();
    let db: Vec<f64> = b.values().iter().map(|s| 1.0 - s).collect();
    distance_correlation_raw(&da, &db, a.len())
}

/// Communities of a paper network, numbered by decreasing size (ties by
/// smallest member).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    pub papers: Vec<String>,
    pub partition: Partition,
    pub modularity: Option<f64>,
    /// Modularity after each aggregation level.
    pub level_modularity: Vec<f64>,
}

impl CommunityPartition {
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(papers: Vec<String>, labels: &[L]) -> Result<Self> {
        if papers.len() != labels.len() {
            return Err(Error::LengthMismatch(papers.len(), labels.len()));
        }
        Ok(Self {
            papers,
            partition: by_size(&Partition::from_labels(labels)),
            modularity: None,
            level_modularity: Vec::new(),
        })
    }

    pub fn community_count(&self) -> usize {
        self.partition.cluster_count()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.partition.sizes()
    }

    pub fn community_of(&self, paper: &str) -> Option<usize> {
        self.papers.iter().position(|p| p == paper).map(|i| self.partition.cluster_of(i))
    }

    /// Share of nodes in the `k` largest communities.
    pub fn coverage(&self, k: usize) -> f64 {
        if self.papers.is_empty() {
            return 0.0;
        }
        self.sizes().iter().take(k).sum::<usize>() as f64 / self.papers.len() as f64
    }
}

fn by_size(p: &Partition) -> Partition {
    let sizes = p.sizes();
    let members = p.members();
    let mut order: Vec<usize> = (0..p.cluster_count()).collect();
    order.sort_by_key(|&c| (std::cmp::Reverse(sizes[c]), members[c][0]));
    let mut new_id = vec![0; order.len()];
    for (i, &c) in order.iter().enumerate() {
        new_id[c] = i;
    }
    Partition::from_dense(p.labels().iter().map(|&c| new_id[c]).collect(), order.len()).expect("dense")
}

/// Newman modularity of `partition` on a weighted undirected network.
pub fn modularity(net: &CouplingNetwork, partition: &Partition, resolution: f64) -> Result<f64> {
    if partition.len() != net.node_count() {
        return Err(Error::LengthMismatch(partition.len(), net.node_count()));
    }
    let mut internal = vec![0.0; partition.cluster_count()];
    let mut degree = vec![0.0; partition.cluster_count()];
    let mut m = 0.0;
    for &(i, j, w) in net.edges() {
        let (ci, cj) = (partition.cluster_of(i), partition.cluster_of(j));
        if ci == cj {
            internal[ci] += w;
        }
        degree[ci] += w;
        degree[cj] += w;
        m += w;
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(internal.iter().zip(&degree).map(|(&l, &d)| l / m - resolution * (d / (2.0 * m)).powi(2)).sum())
}

const MAX_SWEEPS: usize = 10_000;

/// Weighted graph used between aggregation levels. `loops[i]` is the weight
/// of edges collapsed inside node `i`.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl Level {
    fn degree(&self, i: usize) -> f64 {
        2.0 * self.loops[i] + self.adj[i].iter().map(|e| e.1).sum::<f64>()
    }

    /// Greedy local moving in ascending node order. Returns the community of
    /// every node and whether anything moved.
    fn local_moving(&self, resolution: f64, m2: f64) -> (Vec<usize>, bool) {
        let n = self.adj.len();
        let k: Vec<f64> = (0..n).map(|i| self.degree(i)).collect();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = k.clone();
        let mut moved_any = false;
        // guards against float ties cycling forever
        for _ in 0..MAX_SWEEPS {
            let mut moved = false;
            for i in 0..n {
                let own = comm[i];
                let mut links: BTreeMap<usize, f64> = BTreeMap::new();
                for &(j, w) in &self.adj[i] {
                    *links.entry(comm[j]).or_insert(0.0) += w;
                }
                tot[own] -= k[i];
                let gain = |c: usize, links: &BTreeMap<usize, f64>| {
                    links.get(&c).copied().unwrap_or(0.0) - resolution * tot[c] * k[i] / m2
                };
                let mut best = own;
                let mut best_gain = gain(own, &links);
                for &c in links.keys() {
                    let g = gain(c, &links);
                    if g > best_gain {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += k[i];
                if best != own {
                    comm[i] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        (comm, moved_any)
    }

    fn aggregate(&self, comm: &Partition) -> Level {
        let c = comm.cluster_count();
        let mut loops = vec![0.0; c];
        let mut acc: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); c];
        for i in 0..self.adj.len() {
            let ci = comm.cluster_of(i);
            loops[ci] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm.cluster_of(j);
                if ci == cj {
                    // each internal edge is seen from both ends
                    loops[ci] += w / 2.0;
                } else {
                    *acc[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        Level { adj: acc.into_iter().map(|m| m.into_iter().collect()).collect(), loops }
    }
}

/// Deterministic Louvain: local moving in ascending node order followed by
/// aggregation, repeated until no node moves.
pub fn louvain(net: &CouplingNetwork, resolution: f64) -> Result<CommunityPartition> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidParameter(format!("resolution {resolution} must be positive")));
    }
    let n = net.node_count();
    let mut adj = vec![Vec::new(); n];
    let mut m2 = 0.0;
    for &(i, j, w) in net.edges() {
        adj[i].push((j, w));
        adj[j].push((i, w));
        m2 += 2.0 * w;
    }
    let mut level = Level { adj, loops: vec![0.0; n] };
    let mut node_comm: Vec<usize> = (0..n).collect();
    let mut level_modularity = Vec::new();
    if m2 > 0.0 {
        loop {
            let (comm, moved) = level.local_moving(resolution, m2);
            if !moved {
                break;
            }
            let p = Partition::from_labels(&comm);
            for c in &mut node_comm {
                *c = p.cluster_of(*c);
            }
            level_modularity.push(modularity(net, &Partition::from_labels(&node_comm), resolution)?);
            level = level.aggregate(&p);
        }
    }
    let partition = by_size(&Partition::from_labels(&node_comm));
    let q = modularity(net, &partition, resolution)?;
    Ok(CommunityPartition { papers: net.papers().to_vec(), partition, modularity: Some(q), level_modularity })
}

/// Cross-tabulation with chi-square statistics and Pearson residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyResult {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub observed: Vec<Vec<u64>>,
    pub expected: Vec<Vec<f64>>,
    pub n: u64,
    pub chi2: f64,
    pub dof: usize,
    /// Uncorrected Cramér's V.
    pub cramers_v: f64,
    /// `(f_o - f_e) / sqrt(f_e)` per cell.
    pub residuals: Vec<Vec<f64>>,
}

impl ContingencyResult {
    /// Builds the statistics from an observed table; every row and column
    /// must have a positive marginal and the table must be at least 2 × 2.
    pub fn from_table(row_labels: Vec<String>, col_labels: Vec<String>, observed: Vec<Vec<u64>>) -> Result<Self> {
        let r = observed.len();
        let c = observed.first().map_or(0, Vec::len);
        if r < 2 || c < 2 {
            return Err(Error::DegenerateTable(format!("{r}x{c} table")));
        }
        if observed.iter().any(|row| row.len() != c) {
            return Err(Error::DegenerateTable("ragged rows".into()));
        }
        if row_labels.len() != r || col_labels.len() != c {
            return Err(Error::LengthMismatch(row_labels.len() * col_labels.len(), r * c));
        }
        let rows: Vec<u64> = observed.iter().map(|row| row.iter().sum()).collect();
        let cols: Vec<u64> = (0..c).map(|j| observed.iter().map(|row| row[j]).sum()).collect();
        if let Some(i) = rows.iter().position(|&x| x == 0) {
            return Err(Error::DegenerateTable(format!("row `{}` is empty", row_labels[i])));
        }
        if let Some(j) = cols.iter().position(|&x| x == 0) {
            return Err(Error::DegenerateTable(format!("column `{}` is empty", col_labels[j])));
        }
        let n: u64 = rows.iter().sum();
        let nf = n as f64;
        let expected: Vec<Vec<f64>> =
            rows.iter().map(|&ri| cols.iter().map(|&cj| ri as f64 * cj as f64 / nf).collect()).collect();
        let residuals: Vec<Vec<f64>> = observed
            .iter()
            .zip(&expected)
            .map(|(o, e)| o.iter().zip(e).map(|(&o, &e)| (o as f64 - e) / e.sqrt()).collect())
            .collect();
        let chi2_exact = Self::chi2_cells(&observed, &rows, &cols, n).into_iter().flatten().sum::<BigRational>();
        let min_dim = r.min(c) as u64;
        let v2 = &chi2_exact / BigRational::from_integer(BigInt::from(n * (min_dim - 1)));
        Ok(Self {
            row_labels,
            col_labels,
            observed,
            expected,
            n,
            chi2: chi2_exact.to_f64().unwrap_or(f64::NAN),
            dof: (r - 1) * (c - 1),
            cramers_v: v2.to_f64().unwrap_or(f64::NAN).sqrt(),
            residuals,
        })
    }

    /// Exact per-cell chi-square contributions `(N·o - r·c)² / (N·r·c)`.
    fn chi2_cells(observed: &[Vec<u64>], rows: &[u64], cols: &[u64], n: u64) -> Vec<Vec<BigRational>> {
        observed
            .iter()
            .zip(rows)
            .map(|(row, &ri)| {
                row.iter()
                    .zip(cols)
                    .map(|(&o, &cj)| {
                        let diff = BigInt::from(n) * o - BigInt::from(ri) * cj;
                        BigRational::new(&diff * &diff, BigInt::from(n) * ri * cj)
                    })
                    .collect()
            })
            .collect()
    }

    /// Squared residuals as exact rationals; they sum to the chi-square.
    pub fn squared_residuals_exact(&self) -> Vec<Vec<BigRational>> {
        let rows: Vec<u64> = self.observed.iter().map(|row| row.iter().sum()).collect();
        let cols: Vec<u64> = (0..self.col_labels.len()).map(|j| self.observed.iter().map(|row| row[j]).sum()).collect();
        Self::chi2_cells(&self.observed, &rows, &cols, self.n)
    }

    pub fn chi2_exact(&self) -> BigRational {
        self.squared_residuals_exact().into_iter().flatten().sum()
    }
}

/// Cross-tabulates two community partitions of the same papers, keeping only
/// papers that fall in the `top_a` largest communities of `a` and the `top_b`
/// largest of `b`. Rows are lettered A, B, ...; columns numbered from 1.
pub fn contingency(
    a: &CommunityPartition,
    b: &CommunityPartition,
    top_a: usize,
    top_b: usize,
) -> Result<ContingencyResult> {
    if a.papers != b.papers {
        return Err(Error::MismatchedPapers);
    }
    let (r, c) = (top_a.min(a.community_count()), top_b.min(b.community_count()));
    let mut table = vec![vec![0u64; c]; r];
    for i in 0..a.papers.len() {
        let (x, y) = (a.partition.cluster_of(i), b.partition.cluster_of(i));
        if x < r && y < c {
            table[x][y] += 1;
        }
    }
    let rows = (0..r).map(row_letter).collect();
    let cols = (1..=c).map(|j| j.to_string()).collect();
    ContingencyResult::from_table(rows, cols, table)
}

/// Spreadsheet-style letters: A..Z, AA, AB, ...
pub fn row_letter(i: usize) -> String {
    let mut i = i + 1;
    let mut out = Vec::new();
    while i > 0 {
        i -= 1;
        out.push(b'A' + (i % 26) as u8);
        i /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRow {
    pub id: ScholarId,
    /// Mentions per community column.
    pub counts: Vec<usize>,
    /// Mentions from papers without a retained community label.
    pub other: usize,
    /// Sum of `counts`.
    pub total: usize,
    /// Columns with a nonzero count.
    pub distinct: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionDecomposition {
    pub columns: usize,
    pub rows: Vec<DecompositionRow>,
}

impl MentionDecomposition {
    pub fn row(&self, id: &ScholarId) -> Option<&DecompositionRow> {
        self.rows.iter().find(|r| &r.id == id)
    }
}

/// Splits each acknowledgee's mentions by the community of the mentioning
/// paper. Communities beyond `top` (if given) and unlabeled papers are
/// counted in `other`. Rows are acknowledgees with at least `min_mentions`
/// mentions, most mentioned first (ties by name).
pub fn mention_decomposition(
    index: &MentionIndex,
    communities: &CommunityPartition,
    min_mentions: usize,
    top: Option<usize>,
) -> MentionDecomposition {
    let columns = top.map_or(communities.community_count(), |k| k.min(communities.community_count()));
    let label: BTreeMap<&str, usize> =
        communities.papers.iter().enumerate().map(|(i, p)| (p.as_str(), communities.partition.cluster_of(i))).collect();
    let mut rows: BTreeMap<&ScholarId, DecompositionRow> = BTreeMap::new();
    for (paper, set) in index.papers() {
        let col = label.get(paper).copied().filter(|&c| c < columns);
        for id in set {
            if index.count(id) < min_mentions {
                continue;
            }
            let row = rows.entry(id).or_insert_with(|| DecompositionRow {
                id: id.clone(),
                counts: vec![0; columns],
                other: 0,
                total: 0,
                distinct: 0,
            });
            match col {
                Some(c) => row.counts[c] += 1,
                None => row.other += 1,
            }
        }
    }
    let mut rows: Vec<DecompositionRow> = rows
        .into_values()
        .map(|mut r| {
            r.total = r.counts.iter().sum();
            r.distinct = r.counts.iter().filter(|&&x| x > 0).count();
            r
        })
        .collect();
    rows.sort_by(|a, b| (b.total + b.other).cmp(&(a.total + a.other)).then_with(|| a.id.cmp(&b.id)));
    MentionDecomposition { columns, rows }
}

fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidParameter(format!("non-finite value {x}")))
}

/// Squared Pearson correlation, evaluated in exact rational arithmetic on the
/// given floating-point values.
pub fn pearson_r2(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::EmptyInput("pearson_r2 needs at least two points"));
    }
    let xs = x.iter().map(|&v| exact(v)).collect::<Result<Vec<_>>>()?;
    let ys = y.iter().map(|&v| exact(v)).collect::<Result<Vec<_>>>()?;
    let n = BigRational::from_integer(BigInt::from(x.len()));
    let mx = xs.iter().cloned().sum::<BigRational>() / &n;
    let my = ys.iter().cloned().sum::<BigRational>() / &n;
    let (mut sxy, mut sxx, mut syy) = (BigRational::zero(), BigRational::zero(), BigRational::zero());
    for (a, b) in xs.iter().zip(&ys) {
        let (dx, dy) = (a - &mx, b - &my);
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    if sxx.is_zero() || syy.is_zero() {
        return Err(Error::ConstantInput);
    }
    let r2 = (&sxy * &sxy) / (sxx * syy);
    debug_assert!(!r2.is_negative());
    Ok(r2.to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::Layer;

    fn net(n: usize, edges: &[(usize, usize, f64)]) -> CouplingNetwork {
        CouplingNetwork::new((0..n).map(|i| format!("p{i}")).collect(), Layer::Social, edges.to_vec()).unwrap()
    }

    #[test]
    fn self_correlation_and_constant() {
        let d = vec![0.0, 0.5, 0.25, 0.5, 0.0, 0.75, 0.25, 0.75, 0.0];
        assert_eq!(distance_correlation_raw(&d, &d, 3).unwrap().r_d, 1.0);
        let c = vec![0.5; 9];
        assert_eq!(distance_correlation_raw(&d, &c, 3).unwrap().r_d, 0.0);
        assert!(distance_correlation_raw(&d, &c[..4], 3).is_err());
    }

    #[test]
    fn two_triangles() {
        let g = net(6, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]);
        let p = louvain(&g, 1.0).unwrap();
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.sizes(), vec![3, 3]);
        assert!((p.modularity.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_edge_joins() {
        let p = louvain(&net(2, &[(0, 1, 0.3)]), 1.0).unwrap();
        assert_eq!(p.community_count(), 1);
        let empty = louvain(&net(3, &[]), 1.0).unwrap();
        assert_eq!(empty.community_count(), 3);
        assert_eq!(empty.modularity, Some(0.0));
    }

    #[test]
    fn contingency_identical_partitions() {
        let papers: Vec<String> = (0..7).map(|i| format!("p{i}")).collect();
        let a = CommunityPartition::from_labels(papers.clone(), &[0, 0, 0, 1, 1, 2, 2]).unwrap();
        let r = contingency(&a, &a, 10, 10).unwrap();
        assert_eq!(r.cramers_v, 1.0);
        assert_eq!(r.dof, 4);
        assert_eq!(r.row_labels, vec!["A", "B", "C"]);
        let b = CommunityPartition::from_labels(papers, &[0, 0, 0, 0, 0, 0, 1]).unwrap();
        assert!(contingency(&a, &b, 1, 10).is_err());
    }

    #[test]
    fn letters() {
        assert_eq!(row_letter(0), "A");
        assert_eq!(row_letter(25), "Z");
        assert_eq!(row_letter(26), "AA");
    }

    #[test]
    fn pearson() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert_eq!(pearson_r2(&x, &y).unwrap(), 1.0);
        assert_eq!(pearson_r2(&[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(pearson_r2(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::ConstantInput)));
        assert!(pearson_r2(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn decomposition() {
        use std::collections::BTreeSet;
        let idx = MentionIndex::from_sets([
            ("p0".to_string(), BTreeSet::from([ScholarId::from("K")])),
            ("p1".to_string(), BTreeSet::from([ScholarId::from("K"), ScholarId::from("L")])),
            ("p2".to_string(), BTreeSet::from([ScholarId::from("K")])),
            ("p9".to_string(), BTreeSet::from([ScholarId::from("K")])),
        ]);
        let comm = CommunityPartition::from_labels(vec!["p0".into(), "p1".into(), "p2".into()], &[5, 5, 7]).unwrap();
        let d = mention_decomposition(&idx, &comm, 1, None);
        let k = d.row(&"K".into()).unwrap();
        assert_eq!((k.counts.clone(), k.other, k.total, k.distinct), (vec![2, 1], 1, 3, 2));
        let l = d.row(&"L".into()).unwrap();
        assert_eq!((l.total, l.distinct), (1, 1));
        assert_eq!(mention_decomposition(&idx, &comm, 2, None).rows.len(), 1);
    }
}
