//! The directed acknowledgment network: construction, dyad and triad census,
//! strong components and the symmetric-acyclic decomposition.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use petgraph::graph::DiGraph;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::extract::AliasTable;
use crate::mentions::{MentionIndex, ScholarId};
use crate::partition::Partition;
use crate::{Error, Result};

/// Which roles a scholar plays in the corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRole {
    pub author: bool,
    pub acknowledgee: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub source: usize,
    pub target: usize,
    pub weight: BigRational,
    /// Papers contributing to the arc.
    pub count: usize,
}

/// Directed author → acknowledgee network with exact rational weights.
///
/// Nodes are numbered `0..n` in the order of their labels. Arcs are unique
/// per ordered pair and sorted by `(source, target)`.
#[derive(Debug, Clone)]
pub struct AckGraph {
    labels: Vec<ScholarId>,
    roles: Vec<NodeRole>,
    arcs: Vec<Arc>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    index: HashMap<ScholarId, usize>,
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rounds a rational for output.
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl AckGraph {
    /// Builds a graph from weighted arcs. Parallel arcs are summed and
    /// counted; roles are inferred from arc direction.
    pub fn from_arcs<I>(labels: Vec<ScholarId>, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, BigRational)>,
    {
        let n = labels.len();
        let mut merged: BTreeMap<(usize, usize), (BigRational, usize)> = BTreeMap::new();
        for (s, t, w) in arcs {
            if s >= n || t >= n {
                return Err(Error::InvalidParameter(format!("arc {s}->{t} outside 0..{n}")));
            }
            if s == t {
                return Err(Error::InvalidParameter(format!("self-loop on `{}`", labels[s])));
            }
            if w <= BigRational::zero() {
                return Err(Error::InvalidParameter(format!("non-positive weight on arc {s}->{t}")));
            }
            let e = merged.entry((s, t)).or_insert_with(|| (BigRational::zero(), 0));
            e.0 += w;
            e.1 += 1;
        }
        let arcs = merged
            .into_iter()
            .map(|((source, target), (weight, count))| Arc { source, target, weight, count })
            .collect::<Vec<_>>();
        let mut roles = vec![NodeRole::default(); n];
        for a in &arcs {
            roles[a.source].author = true;
            roles[a.target].acknowledgee = true;
        }
        Self::assemble(labels, roles, arcs)
    }

    /// Unit-weight graph on nodes labelled `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n).map(|i| ScholarId::new(i.to_string())).collect();
        Self::from_arcs(labels, edges.iter().map(|&(s, t)| (s, t, ratio(1, 1))))
    }

    /// Reassembles a graph from stored nodes, roles and already merged arcs,
    /// e.g. when reading it back from disk.
    pub fn from_parts(labels: Vec<ScholarId>, roles: Vec<NodeRole>, mut arcs: Vec<Arc>) -> Result<Self> {
        let n = labels.len();
        if roles.len() != n {
            return Err(Error::LengthMismatch(roles.len(), n));
        }
        arcs.sort_by_key(|a| (a.source, a.target));
        for (i, a) in arcs.iter().enumerate() {
            if a.source >= n || a.target >= n {
                return Err(Error::InvalidParameter(format!("arc {}->{} outside 0..{n}", a.source, a.target)));
            }
            if a.source == a.target {
                return Err(Error::InvalidParameter(format!("self-loop on `{}`", labels[a.source])));
            }
            if a.weight <= BigRational::zero() || a.count == 0 {
                return Err(Error::InvalidParameter(format!("empty arc {}->{}", a.source, a.target)));
            }
            if i > 0 && (arcs[i - 1].source, arcs[i - 1].target) == (a.source, a.target) {
                return Err(Error::InvalidParameter(format!("repeated arc {}->{}", a.source, a.target)));
            }
            if !roles[a.source].author || !roles[a.target].acknowledgee {
                return Err(Error::InvalidParameter(format!(
                    "arc {}->{} contradicts the node roles",
                    a.source, a.target
                )));
            }
        }
        Self::assemble(labels, roles, arcs)
    }

    fn assemble(labels: Vec<ScholarId>, roles: Vec<NodeRole>, arcs: Vec<Arc>) -> Result<Self> {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate node label `{l}`")));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for a in &arcs {
            succ[a.source].push(a.target);
            pred[a.target].push(a.source);
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        Ok(Self { labels, roles, arcs, succ, pred, index })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn labels(&self) -> &[ScholarId] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &ScholarId {
        &self.labels[node]
    }

    pub fn node(&self, id: &ScholarId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.pred[node]
    }

    pub fn has_arc(&self, s: usize, t: usize) -> bool {
        self.succ[s].binary_search(&t).is_ok()
    }

    pub fn arc(&self, s: usize, t: usize) -> Option<&Arc> {
        self.arcs.binary_search_by(|a| (a.source, a.target).cmp(&(s, t))).ok().map(|i| &self.arcs[i])
    }

    pub fn in_weight(&self, node: usize) -> BigRational {
        self.pred[node].iter().map(|&s| self.arc(s, node).expect("indexed arc").weight.clone()).sum()
    }

    pub fn out_weight(&self, node: usize) -> BigRational {
        let start = self.arcs.partition_point(|a| a.source < node);
        self.arcs[start..].iter().take_while(|a| a.source == node).map(|a| a.weight.clone()).sum()
    }

    pub fn total_weight(&self) -> BigRational {
        self.arcs.iter().map(|a| a.weight.clone()).sum()
    }

    /// Sorted union of successors and predecessors.
    fn neighbours(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.succ[node].len() + self.pred[node].len());
        let (a, b) = (&self.succ[node], &self.pred[node]);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (_, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            out.push(next);
        }
        out
    }

    /// Subgraph induced by `nodes`, relabelled in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Result<AckGraph> {
        let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let labels = nodes.iter().map(|&v| self.labels[v].clone()).collect();
        let roles = nodes.iter().map(|&v| self.roles[v]).collect();
        let mut arcs: Vec<Arc> = self
            .arcs
            .iter()
            .filter_map(|a| {
                Some(Arc {
                    source: *pos.get(&a.source)?,
                    target: *pos.get(&a.target)?,
                    weight: a.weight.clone(),
                    count: a.count,
                })
            })
            .collect();
        arcs.sort_by_key(|a| (a.source, a.target));
        Self::assemble(labels, roles, arcs)
    }
}

/// Builds the network: every author of a paper points to each of the paper's
/// acknowledgees with weight `1/k` for `k` authors.
///
/// Nodes are the authors of indexed papers plus all acknowledgees, ordered by
/// identity. Authors are mapped through the same alias table as acknowledgees.
pub fn build_network(corpus: &Corpus, index: &MentionIndex, aliases: &AliasTable) -> Result<AckGraph> {
    let mut roles: BTreeMap<ScholarId, NodeRole> = BTreeMap::new();
    let mut contributions: Vec<(ScholarId, ScholarId, BigRational)> = Vec::new();
    for (paper, acknowledgees) in index.papers() {
        let record = corpus
            .get(paper)
            .ok_or_else(|| Error::InvalidParameter(format!("indexed paper `{paper}` missing from corpus")))?;
        let authors: BTreeSet<ScholarId> = record.authors.iter().map(|a| aliases.author_identity(a)).collect();
        if authors.is_empty() {
            return Err(Error::NoAuthors(paper.to_string()));
        }
        let share = ratio(1, authors.len() as i64);
        for a in &authors {
            roles.entry(a.clone()).or_default().author = true;
        }
        for k in acknowledgees {
            roles.entry(k.clone()).or_default().acknowledgee = true;
            for a in &authors {
                contributions.push((a.clone(), k.clone(), share.clone()));
            }
        }
    }
    let pos: HashMap<&ScholarId, usize> = roles.keys().enumerate().map(|(i, id)| (id, i)).collect();
    let mut merged: BTreeMap<(usize, usize), (BigRational, usize)> = BTreeMap::new();
    for (a, k, w) in &contributions {
        let (s, t) = (pos[a], pos[k]);
        if s == t {
            return Err(Error::InvalidParameter(format!("self-mention of `{a}` survived filtering")));
        }
        let e = merged.entry((s, t)).or_insert_with(|| (BigRational::zero(), 0));
        e.0 += w;
        e.1 += 1;
    }
    let arcs =
        merged.into_iter().map(|((source, target), (weight, count))| Arc { source, target, weight, count }).collect();
    let (labels, roles): (Vec<_>, Vec<_>) = roles.into_iter().unzip();
    AckGraph::assemble(labels, roles, arcs)
}

/// Mutual, asymmetric and null dyad counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadCensus {
    pub mutual: u64,
    pub asymmetric: u64,
    pub null: u64,
}

impl DyadCensus {
    pub fn total(&self) -> u64 {
        self.mutual + self.asymmetric + self.null
    }
}

pub fn dyad_census(g: &AckGraph) -> DyadCensus {
    let n = g.node_count() as u64;
    let mut mutual2 = 0u64;
    for a in g.arcs() {
        if g.has_arc(a.target, a.source) {
            mutual2 += 1;
        }
    }
    let mutual = mutual2 / 2;
    let asymmetric = g.arc_count() as u64 - mutual2;
    DyadCensus { mutual, asymmetric, null: n * n.saturating_sub(1) / 2 - mutual - asymmetric }
}

/// State of the dyad between an ordered pair `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DyadState {
    Null,
    /// x → y only.
    Forward,
    /// y → x only.
    Backward,
    Mutual,
}

impl DyadState {
    pub const ALL: [DyadState; 4] = [Self::Null, Self::Forward, Self::Backward, Self::Mutual];

    fn from_bits(bits: u8) -> Self {
        Self::ALL[(bits & 3) as usize]
    }

    pub fn reversed(self) -> Self {
        match self {
            Self::Forward => Self::Backward,
            Self::Backward => Self::Forward,
            s => s,
        }
    }
}

/// The sixteen isomorphism classes of a three-node digraph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TriadType {
    T003,
    T012,
    T102,
    T021D,
    T021U,
    T021C,
    T111D,
    T111U,
    T030T,
    T030C,
    T201,
    T120D,
    T120U,
    T120C,
    T210,
    T300,
}

/// Macrostructure model a triad type is compatible with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MacroModel {
    Balance,
    Clusterability,
    RankedClusters,
    Transitivity,
    HierarchicalClusters,
    Forbidden,
}

impl fmt::Display for MacroModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Balance => "Balance",
            Self::Clusterability => "Clusterability",
            Self::RankedClusters => "Ranked Clusters",
            Self::Transitivity => "Transitivity",
            Self::HierarchicalClusters => "Hierarchical Clusters",
            Self::Forbidden => "Forbidden",
        })
    }
}

impl TriadType {
    pub const ALL: [TriadType; 16] = [
        Self::T003,
        Self::T012,
        Self::T102,
        Self::T021D,
        Self::T021U,
        Self::T021C,
        Self::T111D,
        Self::T111U,
        Self::T030T,
        Self::T030C,
        Self::T201,
        Self::T120D,
        Self::T120U,
        Self::T120C,
        Self::T210,
        Self::T300,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            Self::T003 => "003",
            Self::T012 => "012",
            Self::T102 => "102",
            Self::T021D => "021D",
            Self::T021U => "021U",
            Self::T021C => "021C",
            Self::T111D => "111D",
            Self::T111U => "111U",
            Self::T030T => "030T",
            Self::T030C => "030C",
            Self::T201 => "201",
            Self::T120D => "120D",
            Self::T120U => "120U",
            Self::T120C => "120C",
            Self::T210 => "210",
            Self::T300 => "300",
        }
    }

    pub fn model(self) -> MacroModel {
        use TriadType::*;
        match self {
            T102 | T300 => MacroModel::Balance,
            T003 => MacroModel::Clusterability,
            T021D | T021U | T030T | T120D | T120U => MacroModel::RankedClusters,
            T012 => MacroModel::Transitivity,
            T120C | T210 => MacroModel::HierarchicalClusters,
            T021C | T111D | T111U | T030C | T201 => MacroModel::Forbidden,
        }
    }

    /// Types containing a transitive triple and no intransitive one.
    pub fn is_transitive(self) -> bool {
        matches!(self, Self::T030T | Self::T120D | Self::T120U | Self::T300)
    }

    /// Types containing at least one intransitive two-path.
    pub fn is_intransitive(self) -> bool {
        matches!(self, Self::T021C | Self::T111D | Self::T111U | Self::T030C | Self::T201 | Self::T120C | Self::T210)
    }
}

impl fmt::Display for TriadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TriadType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown triad type `{s}`")))
    }
}

/// Classifies the triad on nodes a, b, c from its dyads `(a,b)`, `(a,c)`,
/// `(b,c)`; `Forward` means the arc goes from the first to the second node.
pub fn classify_triad(ab: DyadState, ac: DyadState, bc: DyadState) -> TriadType {
    // adjacency[x][y] = arc x -> y
    let mut adj = [[false; 3]; 3];
    for (x, y, s) in [(0, 1, ab), (0, 2, ac), (1, 2, bc)] {
        adj[x][y] = matches!(s, DyadState::Forward | DyadState::Mutual);
        adj[y][x] = matches!(s, DyadState::Backward | DyadState::Mutual);
    }
    let (mut m, mut a) = (0, 0);
    for s in [ab, ac, bc] {
        match s {
            DyadState::Mutual => m += 1,
            DyadState::Forward | DyadState::Backward => a += 1,
            DyadState::Null => {}
        }
    }
    // asymmetric arcs only
    let asym: Vec<(usize, usize)> = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .flat_map(|(x, y)| [(x, y), (y, x)])
        .filter(|&(x, y)| adj[x][y] && !adj[y][x])
        .collect();
    let mutual_nodes: Vec<usize> = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .filter(|&(x, y)| adj[x][y] && adj[y][x])
        .flat_map(|(x, y)| [x, y])
        .collect();
    let out_deg = |v: usize| asym.iter().filter(|&&(x, _)| x == v).count();
    let in_deg = |v: usize| asym.iter().filter(|&&(_, y)| y == v).count();
    use TriadType::*;
    match (m, a) {
        (0, 0) => T003,
        (0, 1) => T012,
        (1, 0) => T102,
        (0, 2) => {
            if (0..3).any(|v| out_deg(v) == 2) {
                T021D
            } else if (0..3).any(|v| in_deg(v) == 2) {
                T021U
            } else {
                T021C
            }
        }
        (1, 1) => {
            // the asymmetric arc touches exactly one mutual node
            let (x, _) = asym[0];
            if mutual_nodes.contains(&x) {
                T111U
            } else {
                T111D
            }
        }
        (0, 3) => {
            if (0..3).any(|v| out_deg(v) == 2) {
                T030T
            } else {
                T030C
            }
        }
        (2, 0) => T201,
        (1, 2) => {
            let third = (0..3).find(|v| !mutual_nodes.contains(v)).expect("one node off the mutual dyad");
            if out_deg(third) == 2 {
                T120D
            } else if in_deg(third) == 2 {
                T120U
            } else {
                T120C
            }
        }
        (2, 1) => T210,
        (3, 0) => T300,
        _ => unreachable!("three dyads"),
    }
}

/// Six-bit triad code: bit0 a→b, bit1 b→a, bit2 a→c, bit3 c→a, bit4 b→c,
/// bit5 c→b.
pub fn classify_code(code: u8) -> TriadType {
    classify_triad(DyadState::from_bits(code), DyadState::from_bits(code >> 2), DyadState::from_bits(code >> 4))
}

fn code_table() -> [TriadType; 64] {
    let mut t = [TriadType::T003; 64];
    for (c, slot) in t.iter_mut().enumerate() {
        *slot = classify_code(c as u8);
    }
    t
}

fn tricode(g: &AckGraph, a: usize, b: usize, c: Option<usize>) -> u8 {
    let bit = |x: usize, y: usize, k: u8| if g.has_arc(x, y) { 1u8 << k } else { 0 };
    let mut code = bit(a, b, 0) | bit(b, a, 1);
    if let Some(c) = c {
        code |= bit(a, c, 2) | bit(c, a, 3) | bit(b, c, 4) | bit(c, b, 5);
    }
    code
}

pub fn choose3(n: u64) -> u64 {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// Observed counts per triad type, in [`TriadType::ALL`] order.
///
/// Uses the subquadratic neighbourhood traversal; only triads with at least
/// one arc are visited and `003` is obtained by subtraction.
pub fn observed_triads(g: &AckGraph) -> Result<[u64; 16]> {
    let n = g.node_count();
    if n < 3 {
        return Err(Error::TooFewNodes(n));
    }
    let table = code_table();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.neighbours(v)).collect();
    let counts = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut local = [0u64; 16];
            for &u in nbrs[v].iter().filter(|&&u| u > v) {
                let s = union_without(&nbrs[v], &nbrs[u], v, u);
                local[table[tricode(g, v, u, None) as usize].index()] += (n - s.len() - 2) as u64;
                for &w in &s {
                    if u < w || (v < w && w < u && nbrs[v].binary_search(&w).is_err()) {
                        local[table[tricode(g, v, u, Some(w)) as usize].index()] += 1;
                    }
                }
            }
            local
        })
        .reduce(
            || [0u64; 16],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let mut counts = counts;
    let rest: u64 = counts[1..].iter().sum();
    counts[0] = choose3(n as u64) - rest;
    Ok(counts)
}

fn union_without(a: &[usize], b: &[usize], x: usize, y: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&p), Some(&q)) => {
                if p <= q {
                    i += 1;
                    if p == q {
                        j += 1;
                    }
                    p
                } else {
                    j += 1;
                    q
                }
            }
            (Some(&p), None) => {
                i += 1;
                p
            }
            (None, Some(&q)) => {
                j += 1;
                q
            }
            (None, None) => unreachable!(),
        };
        if next != x && next != y {
            out.push(next);
        }
    }
    out
}

/// Random-graph baseline for expected triad counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpectedModel {
    /// Independent dyads drawn with the observed mutual/asymmetric/null
    /// proportions; each asymmetric orientation gets half the asymmetric mass.
    #[default]
    DyadConditional,
    /// Independent arcs with the observed density `arcs / (n(n-1))`.
    ArcBernoulli,
}

impl FromStr for ExpectedModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['_', ' '], "-").as_str() {
            "dyad" | "dyad-conditional" | "man" => Ok(Self::DyadConditional),
            "bernoulli" | "arc-bernoulli" | "density" => Ok(Self::ArcBernoulli),
            other => Err(Error::InvalidParameter(format!("unknown expected-count model `{other}`"))),
        }
    }
}

impl fmt::Display for ExpectedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DyadConditional => "dyad-conditional",
            Self::ArcBernoulli => "arc-bernoulli",
        })
    }
}

/// Exact expected counts per triad type for a graph on `n` nodes with the
/// given dyad census, by enumerating all 64 dyad-state assignments.
pub fn expected_triads_exact(n: u64, dyads: &DyadCensus, model: ExpectedModel) -> Result<[BigRational; 16]> {
    if n < 3 {
        return Err(Error::TooFewNodes(n as usize));
    }
    let d: BigInt = BigInt::from(n) * BigInt::from(n - 1) / 2;
    // probability of Null, Forward, Backward, Mutual for one dyad
    let probs: [BigRational; 4] = match model {
        ExpectedModel::DyadConditional => {
            let p = |k: u64| BigRational::new(BigInt::from(k), d.clone());
            let half_a = BigRational::new(BigInt::from(dyads.asymmetric), d.clone() * 2);
            [p(dyads.null), half_a.clone(), half_a, p(dyads.mutual)]
        }
        ExpectedModel::ArcBernoulli => {
            let arcs = 2 * dyads.mutual + dyads.asymmetric;
            let p = BigRational::new(BigInt::from(arcs), d.clone() * 2);
            let q = BigRational::from_integer(1.into()) - &p;
            [&q * &q, &p * &q, &p * &q, &p * &p]
        }
    };
    let triples = BigRational::from_integer(BigInt::from(choose3(n)));
    let mut out: [BigRational; 16] = std::array::from_fn(|_| BigRational::zero());
    for code in 0u8..64 {
        let p = &probs[(code & 3) as usize] * &probs[((code >> 2) & 3) as usize] * &probs[((code >> 4) & 3) as usize];
        out[classify_code(code).index()] += p;
    }
    for e in &mut out {
        *e *= &triples;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriadRow {
    pub triad: TriadType,
    pub observed: u64,
    pub expected: f64,
    /// `(observed - expected) / expected`, `None` when nothing is expected.
    pub relative_deviation: Option<f64>,
    pub model: MacroModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriadCensus {
    pub nodes: u64,
    pub dyads: DyadCensus,
    pub expected_model: ExpectedModel,
    pub observed: [u64; 16],
    pub expected: [f64; 16],
}

impl TriadCensus {
    pub fn observed_of(&self, t: TriadType) -> u64 {
        self.observed[t.index()]
    }

    pub fn expected_of(&self, t: TriadType) -> f64 {
        self.expected[t.index()]
    }

    pub fn total(&self) -> u64 {
        self.observed.iter().sum()
    }

    pub fn transitive(&self) -> u64 {
        TriadType::ALL.iter().filter(|t| t.is_transitive()).map(|&t| self.observed_of(t)).sum()
    }

    pub fn intransitive(&self) -> u64 {
        TriadType::ALL.iter().filter(|t| t.is_intransitive()).map(|&t| self.observed_of(t)).sum()
    }

    pub fn rows(&self) -> Vec<TriadRow> {
        TriadType::ALL
            .iter()
            .map(|&t| {
                let (o, e) = (self.observed_of(t), self.expected_of(t));
                TriadRow {
                    triad: t,
                    observed: o,
                    expected: e,
                    relative_deviation: (e > 0.0).then(|| (o as f64 - e) / e),
                    model: t.model(),
                }
            })
            .collect()
    }
}

/// Observed and expected triad counts.
pub fn triad_census(g: &AckGraph, model: ExpectedModel) -> Result<TriadCensus> {
    let observed = observed_triads(g)?;
    let dyads = dyad_census(g);
    let n = g.node_count() as u64;
    let exact = expected_triads_exact(n, &dyads, model)?;
    Ok(TriadCensus {
        nodes: n,
        dyads,
        expected_model: model,
        observed,
        expected: std::array::from_fn(|i| to_f64(&exact[i])),
    })
}

fn digraph(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> DiGraph<(), ()> {
    let mut pg = DiGraph::<(), ()>::with_capacity(n, 0);
    for _ in 0..n {
        pg.add_node(());
    }
    for (s, t) in arcs {
        pg.add_edge((s as u32).into(), (t as u32).into(), ());
    }
    pg
}

fn scc_labels(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut labels = vec![0; n];
    for (c, comp) in petgraph::algo::tarjan_scc(&digraph(n, arcs)).into_iter().enumerate() {
        for v in comp {
            labels[v.index()] = c;
        }
    }
    labels
}

/// Strongly connected components, numbered by first appearance in node order.
pub fn strong_components(g: &AckGraph) -> Partition {
    Partition::from_labels(&scc_labels(g.node_count(), g.arcs().iter().map(|a| (a.source, a.target))))
}

/// Weighted arc between two clusters of a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterArc {
    pub from: usize,
    pub to: usize,
    pub weight: BigRational,
    /// Node-level arcs aggregated.
    pub arcs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterInfo {
    pub size: usize,
    pub rank: usize,
    /// Seed clusters (reciprocated components of two or more nodes) inside.
    pub seed_clusters: usize,
    /// Nodes with at least one reciprocated arc.
    pub directly_symmetric: usize,
}

/// Clusters with internal reciprocation and a ranked, acyclic quotient.
///
/// Clusters are numbered by rank, then by smallest member node.
#[derive(Debug, Clone, PartialEq)]
pub struct SymAcyclicResult {
    pub partition: Partition,
    pub clusters: Vec<ClusterInfo>,
    pub cluster_arcs: Vec<ClusterArc>,
    /// Unreciprocated arcs internalized by merging residual cycles.
    pub errors: usize,
    pub seed_clusters: usize,
    pub directly_symmetric_nodes: usize,
}

impl SymAcyclicResult {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn rank_of_node(&self, node: usize) -> usize {
        self.clusters[self.partition.cluster_of(node)].rank
    }

    pub fn max_rank(&self) -> usize {
        self.clusters.iter().map(|c| c.rank).max().unwrap_or(0)
    }

    /// Cluster ids grouped by rank.
    pub fn layers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); if self.clusters.is_empty() { 0 } else { self.max_rank() + 1 }];
        for (c, info) in self.clusters.iter().enumerate() {
            out[info.rank].push(c);
        }
        out
    }

    /// Node count per rank.
    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers().iter().map(|l| l.iter().map(|&c| self.clusters[c].size).sum()).collect()
    }

    /// Largest cluster containing reciprocated ties, if any.
    pub fn largest_symmetric_cluster(&self) -> Option<usize> {
        (0..self.clusters.len())
            .filter(|&c| self.clusters[c].size > 1)
            .max_by_key(|&c| (self.clusters[c].size, std::cmp::Reverse(c)))
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }

    fn roots(&mut self) -> Vec<usize> {
        (0..self.0.len()).map(|x| self.find(x)).collect()
    }
}

/// Symmetric-acyclic decomposition.
///
/// Reciprocated pairs seed the clusters. Clusters joined by arcs in both
/// directions are merged until none remain. Any directed cycle left among
/// clusters is collapsed, each internalized arc counting as one error. Ranks
/// are longest-path depths in the resulting acyclic quotient.
pub fn symmetric_acyclic_decomposition(g: &AckGraph) -> SymAcyclicResult {
    let n = g.node_count();
    let mut dsu = Dsu::new(n);
    let mut reciprocated = vec![false; n];
    for a in g.arcs() {
        if a.source < a.target && g.has_arc(a.target, a.source) {
            dsu.union(a.source, a.target);
            reciprocated[a.source] = true;
            reciprocated[a.target] = true;
        }
    }
    let seed_roots = dsu.roots();
    let seed_of: Vec<Option<usize>> = (0..n).map(|v| reciprocated[v].then_some(seed_roots[v])).collect();
    let seed_clusters = seed_of.iter().flatten().collect::<BTreeSet<_>>().len();
    let directly_symmetric_nodes = reciprocated.iter().filter(|&&r| r).count();

    // merge clusters linked in both directions until fixpoint
    loop {
        let roots = dsu.roots();
        let quotient: BTreeSet<(usize, usize)> =
            g.arcs().iter().map(|a| (roots[a.source], roots[a.target])).filter(|(x, y)| x != y).collect();
        let mut merged = false;
        for &(x, y) in &quotient {
            if x < y && quotient.contains(&(y, x)) {
                merged |= dsu.union(x, y);
            }
        }
        if !merged {
            break;
        }
    }

    // collapse residual cycles
    let roots = dsu.roots();
    let scc = scc_labels(n, g.arcs().iter().map(|a| (roots[a.source], roots[a.target])).filter(|(x, y)| x != y));
    let mut errors = 0;
    for a in g.arcs() {
        let (x, y) = (roots[a.source], roots[a.target]);
        if x != y && scc[x] == scc[y] {
            errors += 1;
        }
    }
    let mut scc_rep: HashMap<usize, usize> = HashMap::new();
    for &r in &roots {
        let rep = *scc_rep.entry(scc[r]).or_insert(r);
        dsu.union(r, rep);
    }
    let roots = dsu.roots();

    // dense cluster ids, quotient arcs and longest-path ranks
    let mut tmp: BTreeMap<usize, usize> = BTreeMap::new();
    for &r in &roots {
        let next = tmp.len();
        tmp.entry(r).or_insert(next);
    }
    let k = tmp.len();
    let cl: Vec<usize> = roots.iter().map(|r| tmp[r]).collect();
    let mut q: BTreeMap<(usize, usize), (BigRational, usize)> = BTreeMap::new();
    for a in g.arcs() {
        let (x, y) = (cl[a.source], cl[a.target]);
        if x != y {
            let e = q.entry((x, y)).or_insert_with(|| (BigRational::zero(), 0));
            e.0 += &a.weight;
            e.1 += 1;
        }
    }
    let pg = digraph(k, q.keys().copied());
    let order = petgraph::algo::toposort(&pg, None).expect("quotient is acyclic after collapsing cycles");
    let mut rank = vec![0usize; k];
    for v in order {
        let r = rank[v.index()];
        for w in pg.neighbors(v) {
            rank[w.index()] = rank[w.index()].max(r + 1);
        }
    }

    // renumber by (rank, smallest member)
    let mut min_member = vec![usize::MAX; k];
    for (v, &c) in cl.iter().enumerate() {
        min_member[c] = min_member[c].min(v);
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&c| (rank[c], min_member[c]));
    let mut new_id = vec![0; k];
    for (i, &c) in order.iter().enumerate() {
        new_id[c] = i;
    }
    let labels: Vec<usize> = cl.iter().map(|&c| new_id[c]).collect();
    let mut clusters: Vec<ClusterInfo> = order
        .iter()
        .map(|&c| ClusterInfo { size: 0, rank: rank[c], seed_clusters: 0, directly_symmetric: 0 })
        .collect();
    let mut seeds_in: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for v in 0..n {
        let c = labels[v];
        clusters[c].size += 1;
        if let Some(s) = seed_of[v] {
            clusters[c].directly_symmetric += 1;
            seeds_in[c].insert(s);
        }
    }
    for (c, s) in seeds_in.iter().enumerate() {
        clusters[c].seed_clusters = s.len();
    }
    let cluster_arcs = q
        .into_iter()
        .map(|((x, y), (weight, arcs))| ClusterArc { from: new_id[x], to: new_id[y], weight, arcs })
        .collect::<Vec<_>>();
    let mut cluster_arcs = cluster_arcs;
    cluster_arcs.sort_by_key(|a| (a.from, a.to));

    SymAcyclicResult {
        partition: Partition::from_dense(labels, k).expect("dense cluster ids"),
        clusters,
        cluster_arcs,
        errors,
        seed_clusters,
        directly_symmetric_nodes,
    }
}

/// Aggregate arc weight between clusters; intra-cluster weight is kept apart.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlowMatrix {
    pub flows: BTreeMap<(usize, usize), BigRational>,
    pub internal: BigRational,
}

impl FlowMatrix {
    pub fn get(&self, from: usize, to: usize) -> BigRational {
        self.flows.get(&(from, to)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn external_total(&self) -> BigRational {
        self.flows.values().cloned().sum()
    }
}

pub fn cluster_flows(g: &AckGraph, partition: &Partition) -> Result<FlowMatrix> {
    if partition.len() != g.node_count() {
        return Err(Error::LengthMismatch(partition.len(), g.node_count()));
    }
    let mut out = FlowMatrix::default();
    for a in g.arcs() {
        let (x, y) = (partition.cluster_of(a.source), partition.cluster_of(a.target));
        if x == y {
            out.internal += &a.weight;
        } else {
            *out.flows.entry((x, y)).or_insert_with(BigRational::zero) += &a.weight;
        }
    }
    Ok(out)
}

/// Components of the reciprocated-arc subgraph with two or more nodes,
/// largest first (ties by smallest member).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricCore {
    pub components: Vec<Vec<usize>>,
}

impl SymmetricCore {
    pub fn largest(&self) -> Option<&[usize]> {
        self.components.first().map(Vec::as_slice)
    }

    pub fn node_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }
}

pub fn symmetric_core(g: &AckGraph) -> SymmetricCore {
    let n = g.node_count();
    let mut dsu = Dsu::new(n);
    let mut touched = vec![false; n];
    for a in g.arcs() {
        if a.source < a.target && g.has_arc(a.target, a.source) {
            dsu.union(a.source, a.target);
            touched[a.source] = true;
            touched[a.target] = true;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in (0..n).filter(|&v| touched[v]) {
        groups.entry(dsu.find(v)).or_default().push(v);
    }
    let mut components: Vec<Vec<usize>> = groups.into_values().collect();
    components.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
    SymmetricCore { components }
}
