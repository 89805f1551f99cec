//! Jaccard coupling of papers through shared references (intellectual layer)
//! and shared acknowledgees (social layer).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{eligible_papers, Corpus};
use crate::mentions::MentionIndex;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Layer {
    /// Shared cited references.
    Intellectual,
    /// Shared acknowledgees.
    Social,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Intellectual => "intellectual",
            Self::Social => "social",
        })
    }
}

impl FromStr for Layer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "intellectual" | "references" => Ok(Self::Intellectual),
            "s" | "social" | "acknowledgees" => Ok(Self::Social),
            other => Err(Error::InvalidParameter(format!("unknown layer `{other}`"))),
        }
    }
}

/// `|A ∩ B| / |A ∪ B|`; one empty set gives 0, two empty sets are an error.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::EmptyInput("both sets are empty"));
    }
    let inter = a.intersection(b).count();
    Ok(inter as f64 / (a.len() + b.len() - inter) as f64)
}

/// Dense symmetric similarity matrix over papers, unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    papers: Vec<String>,
    layer: Layer,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Validates a row-major matrix: square, symmetric, in `[0,1]`, unit
    /// diagonal.
    pub fn from_values(papers: Vec<String>, layer: Layer, values: Vec<f64>) -> Result<Self> {
        let n = papers.len();
        if values.len() != n * n {
            return Err(Error::LengthMismatch(values.len(), n * n));
        }
        for i in 0..n {
            if values[i * n + i] != 1.0 {
                return Err(Error::InvalidParameter(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) || v != values[j * n + i] {
                    return Err(Error::InvalidParameter(format!("entry ({i},{j}) = {v} breaks symmetry or range")));
                }
            }
        }
        Ok(Self { papers, layer, values })
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn papers(&self) -> &[String] {
        &self.papers
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.papers.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same matrix with papers reordered so that new row `i` is old row
    /// `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.len();
        if order.len() != n || order.iter().collect::<BTreeSet<_>>().len() != n || order.iter().any(|&i| i >= n) {
            return Err(Error::InvalidParameter("order is not a permutation".into()));
        }
        let values = (0..n * n).map(|k| self.get(order[k / n], order[k % n])).collect();
        Ok(Self { papers: order.iter().map(|&i| self.papers[i].clone()).collect(), layer: self.layer, values })
    }
}

/// Undirected weighted network of papers with an edge wherever the
/// similarity is strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingNetwork {
    papers: Vec<String>,
    layer: Layer,
    /// `(i, j, weight)` with `i < j`, sorted.
    edges: Vec<(usize, usize, f64)>,
}

impl CouplingNetwork {
    pub fn new(papers: Vec<String>, layer: Layer, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = papers.len();
        let mut norm: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for (i, j, w) in edges {
            if i >= n || j >= n || i == j {
                return Err(Error::InvalidParameter(format!("edge {i}-{j} invalid for {n} nodes")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!("edge {i}-{j} has weight {w}")));
            }
            norm.push((i.min(j), i.max(j), w));
        }
        norm.sort_by_key(|e| (e.0, e.1));
        if norm.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidParameter("duplicate edge".into()));
        }
        Ok(Self { papers, layer, edges: norm })
    }

    pub fn from_matrix(m: &SimilarityMatrix) -> Self {
        let n = m.len();
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let w = m.get(i, j);
                (w > 0.0).then_some((i, j, w))
            })
            .collect();
        Self { papers: m.papers.clone(), layer: m.layer, edges }
    }

    pub fn node_count(&self) -> usize {
        self.papers.len()
    }

    pub fn papers(&self) -> &[String] {
        &self.papers
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Same network with every weight set to 1.
    pub fn binarized(&self) -> Self {
        Self {
            papers: self.papers.clone(),
            layer: self.layer,
            edges: self.edges.iter().map(|&(i, j, _)| (i, j, 1.0)).collect(),
        }
    }

    pub fn edge_stats(&self) -> Option<EdgeStats> {
        let w: Vec<f64> = self.edges.iter().map(|e| e.2).collect();
        let count = w.len();
        if count == 0 {
            return None;
        }
        let mean = w.iter().sum::<f64>() / count as f64;
        let sd = if count > 1 {
            (w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(EdgeStats {
            count,
            mean,
            sd,
            min: w.iter().copied().fold(f64::INFINITY, f64::min),
            max: w.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Weight statistics over the edges of a coupling network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeStats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

/// Pairwise Jaccard similarity of item sets, unit diagonal. Pairs are found
/// through an inverted index and evaluated in parallel; output order follows
/// `sets`.
pub fn similarity_from_sets<T: Ord + std::hash::Hash + Sync>(
    papers: Vec<String>,
    sets: &[BTreeSet<T>],
    layer: Layer,
) -> Result<SimilarityMatrix> {
    let n = papers.len();
    if sets.len() != n {
        return Err(Error::LengthMismatch(sets.len(), n));
    }
    if let Some(i) = sets.iter().position(BTreeSet::is_empty) {
        return Err(Error::InvalidParameter(format!("paper `{}` has an empty set", papers[i])));
    }
    let mut postings: HashMap<&T, Vec<usize>> = HashMap::new();
    for (i, s) in sets.iter().enumerate() {
        for item in s {
            postings.entry(item).or_default().push(i);
        }
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut shared = vec![0usize; n];
            for item in &sets[i] {
                for &j in &postings[item] {
                    shared[j] += 1;
                }
            }
            (0..n)
                .map(|j| {
                    if i == j {
                        1.0
                    } else {
                        let inter = shared[j];
                        inter as f64 / (sets[i].len() + sets[j].len() - inter) as f64
                    }
                })
                .collect()
        })
        .collect();
    Ok(SimilarityMatrix { papers, layer, values: rows.concat() })
}

/// Similarity matrix and coupling network over the eligible papers (at least
/// one reference and one acknowledgee), ordered by record id.
pub fn build_coupling(
    corpus: &Corpus,
    index: &MentionIndex,
    layer: Layer,
) -> Result<(SimilarityMatrix, CouplingNetwork)> {
    let papers = eligible_papers(corpus, index);
    let sets: Vec<BTreeSet<String>> = papers
        .iter()
        .map(|p| match layer {
            Layer::Intellectual => corpus.get(p).map(|r| r.cited_refs.clone()).unwrap_or_default(),
            Layer::Social => {
                index.acknowledgees(p).map(|k| k.iter().map(|id| id.as_str().to_string()).collect()).unwrap_or_default()
            }
        })
        .collect();
    let m = similarity_from_sets(papers, &sets, layer)?;
    let net = CouplingNetwork::from_matrix(&m);
    Ok((m, net))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u32]) -> BTreeSet<u32> {
        xs.iter().copied().collect()
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&set(&[1, 2, 3]), &set(&[1, 2, 3])).unwrap(), 1.0);
        assert_eq!(jaccard(&set(&[1]), &set(&[2])).unwrap(), 0.0);
        assert_eq!(jaccard(&set(&[1, 2, 3]), &set(&[2, 3, 4])).unwrap(), 0.5);
        assert_eq!(jaccard(&set(&[]), &set(&[2])).unwrap(), 0.0);
        assert!(jaccard(&set(&[]), &set(&[])).is_err());
    }

    #[test]
    fn matrix_matches_pairwise_jaccard() {
        let sets = vec![set(&[1, 2, 3]), set(&[2, 3, 4]), set(&[9]), set(&[1, 9])];
        let ids: Vec<String> = (0..4).map(|i| format!("p{i}")).collect();
        let m = similarity_from_sets(ids, &sets, Layer::Social).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { jaccard(&sets[i], &sets[j]).unwrap() };
                assert_eq!(m.get(i, j), want);
            }
        }
        let net = CouplingNetwork::from_matrix(&m);
        assert_eq!(net.edges().len(), 3);
        assert!(!net.edges().iter().any(|&(i, j, _)| (i, j) == (0, 2)));
        let stats = net.edge_stats().unwrap();
        assert_eq!(stats.max, 0.5);
        assert_eq!(stats.count, 3);
    }

    #[test]
    fn permutation_moves_values() {
        let sets = vec![set(&[1, 2]), set(&[2]), set(&[3, 1])];
        let m = similarity_from_sets(vec!["a".into(), "b".into(), "c".into()], &sets, Layer::Intellectual).unwrap();
        let p = m.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.papers(), ["c", "a", "b"]);
        assert_eq!(p.get(0, 1), m.get(2, 0));
        assert!(m.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn validation() {
        assert!(SimilarityMatrix::from_values(vec!["a".into(), "b".into()], Layer::Social, vec![1.0, 0.2, 0.3, 1.0])
            .is_err());
        assert!(SimilarityMatrix::from_values(vec!["a".into()], Layer::Social, vec![0.5]).is_err());
        assert!(CouplingNetwork::new(vec!["a".into(), "b".into()], Layer::Social, vec![(0, 1, 0.0)]).is_err());
        assert!(similarity_from_sets(vec!["a".into()], &[set(&[])], Layer::Social).is_err());
    }
}
