//! Per-paper acknowledgee sets and the statistics of the mention distribution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::extract::{self, AliasTable};
use crate::{Error, Result};

/// Canonical identity of a scholar (the canonical surface form of an alias cluster).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScholarId(pub String);

impl ScholarId {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ScholarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ScholarId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

/// Acknowledgee sets per paper and the derived per-acknowledgee mention counts.
///
/// A mention is one paper naming one acknowledgee, so a paper contributes at
/// most one to any count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionIndex {
    papers: BTreeMap<String, BTreeSet<ScholarId>>,
    counts: BTreeMap<ScholarId, usize>,
}

impl MentionIndex {
    pub fn from_sets<I>(sets: I) -> Self
    where
        I: IntoIterator<Item = (String, BTreeSet<ScholarId>)>,
    {
        let mut papers: BTreeMap<String, BTreeSet<ScholarId>> = BTreeMap::new();
        for (paper, set) in sets {
            papers.entry(paper).or_default().extend(set);
        }
        let mut counts = BTreeMap::new();
        for set in papers.values() {
            for id in set {
                *counts.entry(id.clone()).or_insert(0) += 1;
            }
        }
        Self { papers, counts }
    }

    pub fn acknowledgees(&self, paper: &str) -> Option<&BTreeSet<ScholarId>> {
        self.papers.get(paper)
    }

    /// Papers in record-id order with their acknowledgee sets.
    pub fn papers(&self) -> impl Iterator<Item = (&str, &BTreeSet<ScholarId>)> {
        self.papers.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn paper_count(&self) -> usize {
        self.papers.len()
    }

    pub fn count(&self, id: &ScholarId) -> usize {
        self.counts.get(id).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<ScholarId, usize> {
        &self.counts
    }

    pub fn acknowledgee_count(&self) -> usize {
        self.counts.len()
    }

    /// |K_a| for papers with at least one acknowledgee.
    pub fn acknowledgees_per_paper(&self) -> Vec<usize> {
        self.papers.values().map(BTreeSet::len).filter(|&n| n > 0).collect()
    }

    pub fn papers_without_acknowledgees(&self) -> usize {
        self.papers.values().filter(|k| k.is_empty()).count()
    }

    /// Mention counts in acknowledgee-name order.
    pub fn mention_counts(&self) -> Vec<usize> {
        self.counts.values().copied().collect()
    }

    pub fn total_mentions(&self) -> usize {
        self.papers.values().map(BTreeSet::len).sum()
    }
}

/// Builds the index from the person surfaces extracted per record.
///
/// Only records with an acknowledgment text are indexed. Surfaces are mapped
/// to canonical identities through `aliases` and the record's own authors are
/// removed.
pub fn build_mention_index(
    corpus: &Corpus,
    persons: &BTreeMap<String, Vec<String>>,
    aliases: &AliasTable,
) -> MentionIndex {
    let sets = corpus.records().iter().filter(|r| r.has_ack()).map(|r| {
        let raw: BTreeSet<ScholarId> =
            persons.get(&r.record_id).into_iter().flatten().map(|surface| aliases.identity(surface)).collect();
        let kept = extract::remove_self_mentions(r, &raw, aliases);
        (r.record_id.clone(), kept)
    });
    MentionIndex::from_sets(sets)
}

/// Moment-based description of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (denominator `n - 1`; 0 when `n == 1`).
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    /// `m3 / m2^(3/2)`; `None` when the sample has zero variance.
    pub skewness: Option<f64>,
    /// `m4 / m2^2 - 3`; `None` when the sample has zero variance.
    pub excess_kurtosis: Option<f64>,
}

pub fn summarize(values: &[f64]) -> Result<DistributionSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput("summarize needs at least one value"));
    }
    let n = values.len();
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let sum_sq = m2;
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 };
    let sd = if n > 1 { (sum_sq / (nf - 1.0)).sqrt() } else { 0.0 };
    let (skewness, excess_kurtosis) =
        if m2 > 0.0 { (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0)) } else { (None, None) };
    Ok(DistributionSummary { n, mean, median, sd, min: sorted[0], max: sorted[n - 1], skewness, excess_kurtosis })
}

pub fn summarize_counts(values: &[usize]) -> Result<DistributionSummary> {
    let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
    summarize(&v)
}

/// Lorenz curve and the (uncorrected) Gini coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzGini {
    /// `(population share, cumulative value share)` from `(0, 0)` to `(1, 1)`.
    pub curve: Vec<(f64, f64)>,
    pub gini: f64,
}

impl LorenzGini {
    /// Share of the total held by the bottom `population_share` of the
    /// population, linearly interpolated along the curve.
    pub fn share_of_bottom(&self, population_share: f64) -> f64 {
        let x = population_share.clamp(0.0, 1.0);
        let idx = self.curve.partition_point(|&(px, _)| px < x);
        if idx == 0 {
            return self.curve[0].1;
        }
        let (x1, y1) = self.curve[idx];
        let (x0, y0) = self.curve[idx - 1];
        if x1 == x0 {
            return y1;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

pub fn lorenz_gini(values: &[f64]) -> Result<LorenzGini> {
    if values.is_empty() {
        return Err(Error::EmptyInput("lorenz_gini needs at least one value"));
    }
    if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter("Lorenz curve values must be finite and non-negative".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total == 0.0 {
        return Err(Error::AllZero);
    }
    let n = sorted.len() as f64;

    let mut curve = Vec::with_capacity(sorted.len() + 1);
    curve.push((0.0, 0.0));
    let mut cum = 0.0;
    let mut ranked = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        cum += v;
        ranked += (i + 1) as f64 * v;
        curve.push(((i + 1) as f64 / n, cum / total));
    }
    if let Some(last) = curve.last_mut() {
        *last = (1.0, 1.0);
    }
    let gini = 2.0 * ranked / (n * total) - (n + 1.0) / n;
    Ok(LorenzGini { curve, gini })
}

pub fn lorenz_gini_counts(values: &[usize]) -> Result<LorenzGini> {
    let v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
    lorenz_gini(&v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperQuota {
    pub record_id: String,
    pub acknowledgees: usize,
    pub high: usize,
    pub low: usize,
    pub share_high: f64,
    pub share_one_mention: f64,
}

/// Per-paper counts of highly and lowly mentioned acknowledgees.
///
/// Aggregates are taken over papers with at least one acknowledgee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityQuotas {
    pub threshold: usize,
    pub per_paper: Vec<PaperQuota>,
    pub mean_high: f64,
    pub mean_low: f64,
    pub mean_share_high: f64,
    pub mean_share_one_mention: f64,
    pub papers_without_high: usize,
    /// Mean acknowledgee count among papers without a highly mentioned one.
    pub mean_size_without_high: f64,
    pub papers_only_one_mention: usize,
    pub papers_only_high: usize,
}

pub fn visibility_quotas(index: &MentionIndex, high_threshold: usize) -> Result<VisibilityQuotas> {
    if high_threshold == 0 {
        return Err(Error::InvalidParameter("high-visibility threshold must be at least 1".into()));
    }
    let per_paper: Vec<PaperQuota> = index
        .papers()
        .filter(|(_, k)| !k.is_empty())
        .map(|(id, k)| {
            let total = k.len();
            let high = k.iter().filter(|a| index.count(a) >= high_threshold).count();
            let one = k.iter().filter(|a| index.count(a) == 1).count();
            PaperQuota {
                record_id: id.to_string(),
                acknowledgees: total,
                high,
                low: total - high,
                share_high: high as f64 / total as f64,
                share_one_mention: one as f64 / total as f64,
            }
        })
        .collect();

    let mean = |f: &dyn Fn(&PaperQuota) -> f64, rows: &[&PaperQuota]| {
        if rows.is_empty() {
            0.0
        } else {
            rows.iter().map(|q| f(q)).sum::<f64>() / rows.len() as f64
        }
    };
    let all: Vec<&PaperQuota> = per_paper.iter().collect();
    let without_high: Vec<&PaperQuota> = per_paper.iter().filter(|q| q.high == 0).collect();

    Ok(VisibilityQuotas {
        threshold: high_threshold,
        mean_high: mean(&|q| q.high as f64, &all),
        mean_low: mean(&|q| q.low as f64, &all),
        mean_share_high: mean(&|q| q.share_high, &all),
        mean_share_one_mention: mean(&|q| q.share_one_mention, &all),
        papers_without_high: without_high.len(),
        mean_size_without_high: mean(&|q| q.acknowledgees as f64, &without_high),
        papers_only_one_mention: per_paper.iter().filter(|q| q.share_one_mention == 1.0).count(),
        papers_only_high: per_paper.iter().filter(|q| q.low == 0).count(),
        per_paper,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedAcknowledgee {
    /// Dense rank: tied counts share a rank and the next count gets rank + 1.
    pub rank: usize,
    pub id: ScholarId,
    pub mentions: usize,
}

/// Acknowledgees with at least `min_mentions` mentions, most mentioned first,
/// ties ordered by canonical name.
pub fn top_acknowledgees(index: &MentionIndex, min_mentions: usize) -> Result<Vec<RankedAcknowledgee>> {
    if min_mentions == 0 {
        return Err(Error::InvalidParameter("min_mentions must be at least 1".into()));
    }
    let mut rows: Vec<(&ScholarId, usize)> =
        index.counts().iter().filter(|(_, &c)| c >= min_mentions).map(|(id, &c)| (id, c)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut ranked = Vec::with_capacity(rows.len());
    let mut rank = 0;
    let mut last = None;
    for (id, mentions) in rows {
        if last != Some(mentions) {
            rank += 1;
            last = Some(mentions);
        }
        ranked.push(RankedAcknowledgee { rank, id: id.clone(), mentions });
    }
    Ok(ranked)
}

/// Extra per-acknowledgee columns keyed by canonical name, e.g. editorial
/// boards or prizes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataTable {
    pub columns: Vec<String>,
    pub rows: BTreeMap<String, Vec<String>>,
}

impl MetadataTable {
    /// Reads a tab-separated file whose first column is the canonical name.
    pub fn from_tsv(source: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().delimiter(b'\t').flexible(true).from_reader(source.as_bytes());
        let columns = reader.headers()?.iter().skip(1).map(str::to_string).collect();
        let mut rows = BTreeMap::new();
        for row in reader.records() {
            let row = row?;
            let mut fields = row.iter().map(str::to_string);
            if let Some(key) = fields.next() {
                rows.insert(key, fields.collect());
            }
        }
        Ok(Self { columns, rows })
    }

    /// Metadata columns for `id`, padded with empty strings when absent.
    pub fn lookup(&self, id: &ScholarId) -> Vec<String> {
        let mut values = self.rows.get(id.as_str()).cloned().unwrap_or_default();
        values.resize(self.columns.len(), String::new());
        values
    }
}
