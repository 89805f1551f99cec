use serde::{Deserialize, Serialize};

/// Assignment of `n` nodes to clusters `0..cluster_count()`.
///
/// Cluster ids are dense and numbered by first appearance in node order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
    clusters: usize,
}

impl Partition {
    /// Builds a partition from arbitrary labels, renumbering them densely.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let labels: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Self { clusters: ids.len(), labels }
    }

    /// Keeps the given numbering. Every id in `0..clusters` must be used.
    pub fn from_dense(labels: Vec<usize>, clusters: usize) -> crate::Result<Self> {
        let mut used = vec![false; clusters];
        for &l in &labels {
            match used.get_mut(l) {
                Some(u) => *u = true,
                None => {
                    return Err(crate::Error::InvalidParameter(format!("cluster id {l} out of range 0..{clusters}")))
                }
            }
        }
        if let Some(missing) = used.iter().position(|u| !u) {
            return Err(crate::Error::InvalidParameter(format!("cluster id {missing} is empty")));
        }
        Ok(Self { labels, clusters })
    }

    pub fn singletons(n: usize) -> Self {
        Self { labels: (0..n).collect(), clusters: n }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.clusters];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Node lists per cluster, each in ascending node order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.clusters];
        for (node, &l) in self.labels.iter().enumerate() {
            members[l].push(node);
        }
        members
    }
}
