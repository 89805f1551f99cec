//! Acknowledgee extraction: entity recognition, name-variant merging and
//! removal of authors who appear in their own acknowledgments.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::BiblioRecord;
use crate::mentions::ScholarId;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityCategory {
    Person,
    Organization,
    Funder,
    Location,
    Other,
}

impl fmt::Display for EntityCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Person => "person",
            Self::Organization => "organization",
            Self::Funder => "funder",
            Self::Location => "location",
            Self::Other => "other",
        })
    }
}

impl FromStr for EntityCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "person" | "per" => Ok(Self::Person),
            "organization" | "organisation" | "org" => Ok(Self::Organization),
            "funder" => Ok(Self::Funder),
            "location" | "loc" | "gpe" => Ok(Self::Location),
            "other" | "misc" => Ok(Self::Other),
            _ => Err(Error::InvalidParameter(format!("unknown entity category `{s}`"))),
        }
    }
}

/// A named entity found in an acknowledgment text.
///
/// `span` holds character (not byte) offsets, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub surface: String,
    pub category: EntityCategory,
    pub span: (usize, usize),
}

/// Anything that can annotate an acknowledgment text with entities.
pub trait Extractor {
    fn annotate(&self, text: &str) -> Result<Vec<Entity>>;
}

/// Runs `extractor` over `ack_text` and checks its output: spans must lie in
/// the text, match their surfaces and not overlap. Entities come back sorted
/// by span start.
pub fn extract_entities(ack_text: &str, extractor: &dyn Extractor) -> Result<Vec<Entity>> {
    if ack_text.trim().is_empty() {
        return Err(Error::EmptyInput("acknowledgment text is empty"));
    }
    let chars: Vec<char> = ack_text.chars().collect();
    let mut entities = extractor.annotate(ack_text)?;
    entities.sort_by_key(|e| e.span);
    for e in &entities {
        let (start, end) = e.span;
        if start >= end || end > chars.len() {
            return Err(Error::SpanOutOfBounds { start, end, len: chars.len() });
        }
        let at_span: String = chars[start..end].iter().collect();
        if at_span != e.surface {
            return Err(Error::InvalidParameter(format!(
                "entity surface `{}` does not match text `{at_span}` at {start}..{end}",
                e.surface
            )));
        }
    }
    for pair in entities.windows(2) {
        if pair[1].span.0 < pair[0].span.1 {
            return Err(Error::OverlappingSpans { first: pair[0].span, second: pair[1].span });
        }
    }
    Ok(entities)
}

/// Precomputed `(start, end, category)` annotations, e.g. from an external
/// NER model. Surfaces are read back from the text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrecomputedAnnotations(pub Vec<(usize, usize, EntityCategory)>);

impl Extractor for PrecomputedAnnotations {
    fn annotate(&self, text: &str) -> Result<Vec<Entity>> {
        let chars: Vec<char> = text.chars().collect();
        self.0
            .iter()
            .map(|&(start, end, category)| {
                if start >= end || end > chars.len() {
                    return Err(Error::SpanOutOfBounds { start, end, len: chars.len() });
                }
                Ok(Entity { surface: chars[start..end].iter().collect(), category, span: (start, end) })
            })
            .collect()
    }
}

const HONORIFICS: &[&str] = &["dr", "prof", "professor", "mr", "mrs", "ms", "miss", "sir", "dame", "mister"];

/// Lowercase words allowed inside a name run.
const PARTICLES: &[&str] = &[
    "de", "da", "di", "del", "della", "der", "den", "van", "von", "la", "le", "du", "dos", "das", "y", "ten", "ter",
    "bin", "al",
];

/// Lowercase words allowed inside an organization run.
const ORG_CONNECTORS: &[&str] = &["of", "for", "the", "and", "on", "in", "&", "at"];

const SENTENCE_WORDS: &[&str] = &[
    "we",
    "i",
    "the",
    "this",
    "that",
    "these",
    "those",
    "our",
    "my",
    "his",
    "her",
    "their",
    "he",
    "she",
    "they",
    "it",
    "its",
    "thanks",
    "thank",
    "special",
    "all",
    "any",
    "also",
    "in",
    "finally",
    "many",
    "a",
    "an",
    "and",
    "for",
    "from",
    "with",
    "at",
    "on",
    "to",
    "of",
    "as",
    "by",
    "part",
    "financial",
    "support",
    "funding",
    "research",
    "views",
    "opinions",
    "errors",
    "remaining",
    "earlier",
    "previous",
    "previously",
    "an",
    "some",
    "much",
    "most",
    "other",
    "each",
    "both",
    "not",
    "no",
    "yes",
    "one",
    "two",
    "three",
    "first",
    "second",
    "last",
    "responsibility",
    "disclaimer",
    "acknowledgments",
    "acknowledgements",
    "acknowledgment",
    "acknowledgement",
    "correspondence",
    "email",
    "however",
    "further",
    "moreover",
    "additionally",
    "helpful",
    "comments",
    "comment",
    "useful",
    "excellent",
    "outstanding",
    "invaluable",
    "generous",
    "grateful",
    "gratefully",
    "indebted",
    "authors",
    "author",
    "author's",
    "authors'",
    "disclosure",
    "declaration",
    "note",
    "notes",
    "parts",
    "work",
    "any",
];

const EVENT_MARKERS: &[&str] = &[
    "conference",
    "conferences",
    "seminar",
    "seminars",
    "workshop",
    "workshops",
    "meeting",
    "meetings",
    "symposium",
    "congress",
    "forum",
    "colloquium",
    "lecture",
    "lectures",
    "summit",
];

const FUNDER_MARKERS: &[&str] = &[
    "foundation",
    "fund",
    "funds",
    "council",
    "agency",
    "ministry",
    "commission",
    "trust",
    "endowment",
    "grant",
    "grants",
    "fellowship",
    "scholarship",
    "award",
];

const ORG_MARKERS: &[&str] = &[
    "university",
    "universidad",
    "universita",
    "universität",
    "universite",
    "université",
    "institute",
    "institut",
    "instituto",
    "school",
    "national",
    "college",
    "center",
    "centre",
    "department",
    "bank",
    "association",
    "society",
    "laboratory",
    "lab",
    "academy",
    "office",
    "bureau",
    "board",
    "federal",
    "reserve",
    "corporation",
    "company",
    "inc",
    "ltd",
    "program",
    "programme",
    "initiative",
    "group",
    "committee",
    "service",
    "administration",
    "authority",
    "organisation",
    "organization",
    "network",
    "press",
    "journal",
    "review",
    "editor",
    "editors",
    "coeditor",
    "co-editor",
    "referee",
    "referees",
    "economics",
    "economic",
    "econometric",
    "sciences",
    "science",
    "studies",
    "research",
    "policy",
    "statistics",
    "census",
    "government",
    "state",
    "states",
    "united",
    "european",
    "american",
    "royal",
    "library",
    "archive",
    "archives",
    "hospital",
    "museum",
    "project",
];

/// Words that close an organization run but are not part of its name.
const TRAILING_ROLE_WORDS: &[&str] =
    &["grant", "grants", "award", "awards", "no", "number", "project", "contract", "fellowship"];

const MONTHS: &[&str] = &[
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

/// Deterministic capitalization-driven extractor.
///
/// Maximal runs of capitalized tokens are person candidates. Runs holding an
/// organization marker ("University", "Foundation", "Institute", ...) become
/// organizations or funders; runs naming events become `Other`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleBasedExtractor;

#[derive(Debug, Clone)]
struct Token {
    text: String,
    start: usize,
    end: usize,
}

impl Token {
    fn lower(&self) -> String {
        self.text.to_lowercase()
    }

    fn is_capitalized(&self) -> bool {
        self.text.chars().next().is_some_and(char::is_uppercase)
    }

    fn is_acronym(&self) -> bool {
        let letters: Vec<char> = self.text.chars().filter(|c| c.is_alphabetic()).collect();
        letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
    }

    fn has_digit(&self) -> bool {
        self.text.chars().any(|c| c.is_ascii_digit())
    }
}

/// Splits text into word tokens with character offsets. The flag paired with
/// each token is true when a separator other than whitespace (or a
/// sentence-ending period) precedes it.
fn tokenize(chars: &[char]) -> Vec<(Token, bool)> {
    let alnum = |i: usize| chars.get(i).is_some_and(|c| c.is_alphanumeric());
    let mut out = Vec::new();
    let mut i = 0;
    let mut hard_break = true;
    while i < chars.len() {
        if !chars[i].is_alphanumeric() {
            if !chars[i].is_whitespace() {
                hard_break = true;
            }
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len()
            && (chars[i].is_alphanumeric() || (matches!(chars[i], '-' | '\'' | '’' | '.') && alnum(i + 1)))
        {
            i += 1;
        }
        let mut end = i;
        let mut text: String = chars[start..end].iter().collect();
        let mut breaks_after = false;
        if chars.get(i) == Some(&'.') {
            let single_upper = end - start == 1 && chars[start].is_uppercase();
            let lower = text.to_lowercase();
            if single_upper || HONORIFICS.contains(&lower.as_str()) || matches!(text.as_str(), "Jr" | "Sr") {
                text.push('.');
                end += 1;
                i += 1;
            } else {
                breaks_after = true;
            }
        }
        for suffix in ["'s", "’s"] {
            if let Some(base) = text.strip_suffix(suffix) {
                text = base.to_string();
                end -= 2;
                break;
            }
        }
        out.push((Token { text, start, end }, hard_break));
        hard_break = breaks_after;
    }
    out
}

fn in_list(list: &[&str], word: &str) -> bool {
    list.contains(&word)
}

impl RuleBasedExtractor {
    fn runs(chars: &[char]) -> Vec<Vec<Token>> {
        let tokens = tokenize(chars);
        let mut runs: Vec<Vec<Token>> = Vec::new();
        let mut current: Vec<Token> = Vec::new();
        let flush = |current: &mut Vec<Token>, runs: &mut Vec<Vec<Token>>| {
            // Drop trailing lowercase connectors.
            while current.last().is_some_and(|t| !t.is_capitalized()) {
                current.pop();
            }
            if !current.is_empty() {
                runs.push(std::mem::take(current));
            }
            current.clear();
        };
        for (tok, hard_break) in tokens {
            if hard_break {
                flush(&mut current, &mut runs);
            }
            let lower = tok.lower();
            let usable = !tok.has_digit()
                && (tok.is_capitalized()
                    || (!current.is_empty() && (in_list(PARTICLES, &lower) || in_list(ORG_CONNECTORS, &lower))));
            if usable {
                current.push(tok);
            } else {
                flush(&mut current, &mut runs);
            }
        }
        flush(&mut current, &mut runs);
        runs
    }

    /// Splits a run at coordinating "and"/"&" and classifies each segment.
    fn classify(run: &[Token]) -> Vec<(usize, usize, EntityCategory)> {
        run.split(|t| matches!(t.text.as_str(), "and" | "&")).flat_map(Self::classify_segment).collect()
    }

    fn classify_segment(run: &[Token]) -> Vec<(usize, usize, EntityCategory)> {
        let mut run: Vec<&Token> = run.iter().collect();
        // Leading sentence words, honorific-free.
        while run.first().is_some_and(|t| {
            let l = t.lower();
            in_list(SENTENCE_WORDS, &l) || in_list(MONTHS, &l) || !t.is_capitalized()
        }) {
            run.remove(0);
        }
        if run.is_empty() {
            return Vec::new();
        }
        let lowers: Vec<String> = run.iter().map(|t| t.lower()).collect();
        let has = |list: &[&str]| lowers.iter().any(|l| in_list(list, l.trim_end_matches('.')));

        if has(EVENT_MARKERS) {
            return vec![span_of(&run, EntityCategory::Other)];
        }
        if has(FUNDER_MARKERS) || has(ORG_MARKERS) || run.iter().all(|t| t.is_acronym()) {
            while run.len() > 1
                && run.last().is_some_and(|t| {
                    let l = t.lower();
                    in_list(TRAILING_ROLE_WORDS, &l) || !t.is_capitalized()
                })
            {
                run.pop();
            }
            let lowers: Vec<String> = run.iter().map(|t| t.lower()).collect();
            let category = if lowers.iter().any(|l| in_list(FUNDER_MARKERS, l)) {
                EntityCategory::Funder
            } else {
                EntityCategory::Organization
            };
            return vec![span_of(&run, category)];
        }

        // Person candidates: split at connectors that are not name particles.
        let mut out = Vec::new();
        let mut piece: Vec<&Token> = Vec::new();
        let emit = |piece: &mut Vec<&Token>, out: &mut Vec<(usize, usize, EntityCategory)>| {
            while piece.first().is_some_and(|t| {
                let l = t.lower();
                HONORIFICS.contains(&l.trim_end_matches('.')) || !t.is_capitalized()
            }) {
                piece.remove(0);
            }
            while piece.last().is_some_and(|t| !t.is_capitalized()) {
                piece.pop();
            }
            let name_tokens = piece.iter().filter(|t| t.is_capitalized()).count();
            let all_common = piece.iter().all(|t| {
                let l = t.lower();
                in_list(SENTENCE_WORDS, &l) || in_list(MONTHS, &l)
            });
            if name_tokens >= 2 && !all_common {
                out.push(span_of(piece, EntityCategory::Person));
            }
            piece.clear();
        };
        for t in run {
            let l = t.lower();
            if !t.is_capitalized() && !in_list(PARTICLES, &l) {
                emit(&mut piece, &mut out);
            } else {
                piece.push(t);
            }
        }
        emit(&mut piece, &mut out);
        out
    }
}

fn span_of(run: &[&Token], category: EntityCategory) -> (usize, usize, EntityCategory) {
    (run[0].start, run[run.len() - 1].end, category)
}

impl Extractor for RuleBasedExtractor {
    fn annotate(&self, text: &str) -> Result<Vec<Entity>> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::new();
        for run in Self::runs(&chars) {
            for (start, end, category) in Self::classify(&run) {
                out.push(Entity { surface: chars[start..end].iter().collect(), category, span: (start, end) });
            }
        }
        Ok(out)
    }
}

/// Ratcliff/Obershelp gestalt similarity `2·M / (|a| + |b|)` over characters.
///
/// `M` is the number of characters in the matching blocks found by taking the
/// longest common substring (earliest in `a`, then earliest in `b`, on ties)
/// and recursing on both sides of it.
pub fn name_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    2.0 * matching_characters(&a, &b) as f64 / total as f64
}

fn matching_characters(a: &[char], b: &[char]) -> usize {
    let mut matched = 0;
    let mut stack = vec![(0, a.len(), 0, b.len())];
    let mut row = vec![0usize; b.len() + 1];
    while let Some((alo, ahi, blo, bhi)) = stack.pop() {
        let (i, j, k) = longest_match(a, b, alo, ahi, blo, bhi, &mut row);
        if k == 0 {
            continue;
        }
        matched += k;
        if alo < i && blo < j {
            stack.push((alo, i, blo, j));
        }
        if i + k < ahi && j + k < bhi {
            stack.push((i + k, ahi, j + k, bhi));
        }
    }
    matched
}

#[allow(clippy::needless_range_loop)]
fn longest_match(
    a: &[char],
    b: &[char],
    alo: usize,
    ahi: usize,
    blo: usize,
    bhi: usize,
    row: &mut [usize],
) -> (usize, usize, usize) {
    // row[j + 1] = length of the common suffix of a[..i] and b[..=j].
    let (mut best_i, mut best_j, mut best_k) = (alo, blo, 0);
    row[blo..=bhi].iter_mut().for_each(|v| *v = 0);
    for i in alo..ahi {
        let mut prev_diag = 0;
        for j in blo..bhi {
            let above = row[j + 1];
            let k = if a[i] == b[j] { prev_diag + 1 } else { 0 };
            prev_diag = above;
            row[j + 1] = k;
            if k > best_k {
                best_i = i + 1 - k;
                best_j = j + 1 - k;
                best_k = k;
            }
        }
    }
    (best_i, best_j, best_k)
}

/// Cheap upper bound on [`name_similarity`] from the character multisets.
fn similarity_upper_bound(a: &[char], b: &[char]) -> f64 {
    let total = a.len() + b.len();
    if total == 0 {
        return 1.0;
    }
    let mut counts: HashMap<char, isize> = HashMap::new();
    for &c in a {
        *counts.entry(c).or_insert(0) += 1;
    }
    let mut common = 0;
    for &c in b {
        let slot = counts.entry(c).or_insert(0);
        if *slot > 0 {
            common += 1;
        }
        *slot -= 1;
    }
    2.0 * common as f64 / total as f64
}

/// Person surface prepared for comparison: honorifics and trailing role words
/// removed, whitespace collapsed.
pub fn normalize_person(surface: &str) -> String {
    let mut words: Vec<&str> = surface.split_whitespace().collect();
    while words.first().is_some_and(|w| HONORIFICS.contains(&w.trim_end_matches('.').to_lowercase().as_str())) {
        words.remove(0);
    }
    while words.len() > 1
        && words.last().is_some_and(|w| {
            let l = w.trim_end_matches(['.', ',']).to_lowercase();
            matches!(l.as_str(), "phd" | "ph.d" | "md" | "esq" | "editor" | "coeditor" | "co-editor")
        })
    {
        words.pop();
    }
    words.join(" ")
}

/// Turns a by-line name in `Surname, Given` form into `Given Surname`.
pub fn display_form(author: &str) -> String {
    match author.split_once(',') {
        Some((surname, given)) if !given.trim().is_empty() => {
            normalize_person(&format!("{} {}", given.trim(), surname.trim()))
        }
        _ => normalize_person(author),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeProvenance {
    /// Forms identical after normalization, or merged in automatic mode.
    AutoMerged,
    /// Confirmed in a curated-merge file.
    Curated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergeMode {
    /// Only merges confirmed by the curated list are applied.
    #[default]
    Curated,
    /// Every candidate pair above the threshold is merged.
    Auto,
}

/// A pair of forms whose similarity exceeds the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub form_a: String,
    pub form_b: String,
    pub ratio: f64,
    pub merged: bool,
}

/// A manual decision on a pair of surface forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuratedDecision {
    pub form_a: String,
    pub form_b: String,
    pub accept: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub form_a: String,
    pub form_b: String,
    pub provenance: MergeProvenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasCluster {
    pub canonical: String,
    pub forms: BTreeSet<String>,
}

/// Disjoint clusters of surface forms, each with a designated canonical form.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AliasTable {
    clusters: Vec<AliasCluster>,
    merges: Vec<MergeRecord>,
    #[serde(skip)]
    by_form: HashMap<String, usize>,
}

impl AliasTable {
    /// Rebuilds a table from `(surface, canonical)` rows.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut groups: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (surface, canonical) in pairs {
            let canonical = canonical.into();
            groups.entry(canonical.clone()).or_default().insert(surface.into());
        }
        let clusters: Vec<AliasCluster> = groups
            .into_iter()
            .map(|(canonical, mut forms)| {
                forms.insert(canonical.clone());
                AliasCluster { canonical, forms }
            })
            .collect();
        let mut table = Self { clusters, merges: Vec::new(), by_form: HashMap::new() };
        table.reindex()?;
        Ok(table)
    }

    fn reindex(&mut self) -> Result<()> {
        self.by_form.clear();
        for (i, c) in self.clusters.iter().enumerate() {
            for f in &c.forms {
                if self.by_form.insert(f.clone(), i).is_some() {
                    return Err(Error::InvalidParameter(format!(
                        "surface form `{f}` belongs to more than one cluster"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn clusters(&self) -> &[AliasCluster] {
        &self.clusters
    }

    pub fn merges(&self) -> &[MergeRecord] {
        &self.merges
    }

    pub fn canonical_of(&self, surface: &str) -> Option<&str> {
        self.by_form.get(surface).map(|&i| self.clusters[i].canonical.as_str())
    }

    /// Canonical identity of a person surface. Forms absent from the table
    /// are their own identity after normalization.
    pub fn identity(&self, surface: &str) -> ScholarId {
        if let Some(c) = self.canonical_of(surface) {
            return ScholarId::new(c);
        }
        let normalized = normalize_person(surface);
        match self.canonical_of(&normalized) {
            Some(c) => ScholarId::new(c),
            None => ScholarId::new(normalized),
        }
    }

    /// Identity of a by-line author name.
    pub fn author_identity(&self, author: &str) -> ScholarId {
        self.identity(&display_form(author))
    }

    /// `(surface, canonical)` rows sorted by surface.
    pub fn pairs(&self) -> Vec<(&str, &str)> {
        let mut rows: Vec<(&str, &str)> = self
            .clusters
            .iter()
            .flat_map(|c| c.forms.iter().map(move |f| (f.as_str(), c.canonical.as_str())))
            .collect();
        rows.sort();
        rows
    }
}

/// Output of [`build_alias_table`]: the table plus every candidate pair for
/// the audit file.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasBuild {
    pub table: AliasTable,
    pub candidates: Vec<CandidatePair>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut cur = x;
        while self.0[cur] != root {
            let next = self.0[cur];
            self.0[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

/// Clusters surface forms into identities.
///
/// Forms that coincide after [`normalize_person`] always share a cluster.
/// Distinct normalized forms with `name_similarity > threshold` are candidate
/// pairs; which candidates merge depends on `mode`. Curated decisions may also
/// merge pairs that fell below the threshold. Merging is transitive. The
/// canonical form of a cluster is its most frequent surface, then the longest,
/// then the lexicographically smallest.
pub fn build_alias_table(
    names: &[String],
    threshold: f64,
    mode: MergeMode,
    curated: &[CuratedDecision],
) -> Result<AliasBuild> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!("alias threshold must be in (0, 1], got {threshold}")));
    }
    let mut frequency: BTreeMap<&str, usize> = BTreeMap::new();
    for n in names {
        let n = n.trim();
        if !n.is_empty() {
            *frequency.entry(n).or_insert(0) += 1;
        }
    }
    let forms: Vec<&str> = frequency.keys().copied().collect();

    // Normalized keys, each owning the surfaces that normalize to it.
    let mut key_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut form_key = Vec::with_capacity(forms.len());
    for f in &forms {
        let key = normalize_person(f);
        let next = key_ids.len();
        form_key.push(*key_ids.entry(key).or_insert(next));
    }
    let keys: Vec<&String> = {
        let mut v: Vec<(&String, usize)> = key_ids.iter().map(|(k, &i)| (k, i)).collect();
        v.sort_by_key(|&(_, i)| i);
        v.into_iter().map(|(k, _)| k).collect()
    };
    // Keys ordered alphabetically for a deterministic pair sweep.
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&x, &y| keys[x].cmp(keys[y]));
    let key_chars: Vec<Vec<char>> = keys.iter().map(|k| k.chars().collect()).collect();

    let pairs: Vec<(usize, usize, f64)> = (0..order.len())
        .into_par_iter()
        .flat_map_iter(|pi| {
            let a = order[pi];
            let ca = &key_chars[a];
            let key_chars = &key_chars;
            order[pi + 1..].iter().filter_map(move |&b| {
                let cb = &key_chars[b];
                let total = (ca.len() + cb.len()) as f64;
                let length_bound = 2.0 * ca.len().min(cb.len()) as f64 / total;
                if length_bound <= threshold || similarity_upper_bound(ca, cb) <= threshold {
                    return None;
                }
                let ratio = 2.0 * matching_characters(ca, cb) as f64 / total;
                (ratio > threshold).then_some((a, b, ratio))
            })
        })
        .collect();

    let mut uf = UnionFind((0..keys.len()).collect());
    let mut merges = Vec::new();

    // Forms sharing a normalized key.
    let mut key_first_form: Vec<Option<usize>> = vec![None; keys.len()];
    for (fi, &k) in form_key.iter().enumerate() {
        match key_first_form[k] {
            None => key_first_form[k] = Some(fi),
            Some(first) => merges.push(MergeRecord {
                form_a: forms[first].to_string(),
                form_b: forms[fi].to_string(),
                provenance: MergeProvenance::AutoMerged,
            }),
        }
    }

    let resolve = |form: &str| -> Result<usize> {
        if let Some(i) = forms.iter().position(|f| *f == form) {
            return Ok(form_key[i]);
        }
        key_ids.get(&normalize_person(form)).copied().ok_or_else(|| Error::UnknownSurfaceForm(form.to_string()))
    };
    let mut accepted: BTreeSet<(usize, usize)> = BTreeSet::new();
    for d in curated {
        let (a, b) = (resolve(&d.form_a)?, resolve(&d.form_b)?);
        if d.accept && a != b {
            accepted.insert((a.min(b), a.max(b)));
        }
    }

    let mut candidates = Vec::with_capacity(pairs.len());
    for &(a, b, ratio) in &pairs {
        let key = (a.min(b), a.max(b));
        let merged = match mode {
            MergeMode::Auto => true,
            MergeMode::Curated => accepted.contains(&key),
        };
        if merged {
            uf.union(a, b);
            merges.push(MergeRecord {
                form_a: keys[a].clone(),
                form_b: keys[b].clone(),
                provenance: if mode == MergeMode::Auto {
                    MergeProvenance::AutoMerged
                } else {
                    MergeProvenance::Curated
                },
            });
        }
        candidates.push(CandidatePair { form_a: keys[a].clone(), form_b: keys[b].clone(), ratio, merged });
    }
    // Curated pairs outside the candidate list.
    let candidate_keys: BTreeSet<(usize, usize)> = pairs.iter().map(|&(a, b, _)| (a.min(b), a.max(b))).collect();
    for &(a, b) in accepted.difference(&candidate_keys) {
        uf.union(a, b);
        merges.push(MergeRecord {
            form_a: keys[a].clone(),
            form_b: keys[b].clone(),
            provenance: MergeProvenance::Curated,
        });
    }

    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (fi, &k) in form_key.iter().enumerate() {
        let root = uf.find(k);
        grouped.entry(root).or_default().push(fi);
    }
    let mut clusters: Vec<AliasCluster> = grouped
        .into_values()
        .map(|members| {
            let canonical = members
                .iter()
                .map(|&fi| forms[fi])
                .max_by(|x, y| {
                    frequency[x]
                        .cmp(&frequency[y])
                        .then_with(|| x.chars().count().cmp(&y.chars().count()))
                        .then_with(|| y.cmp(x))
                })
                .expect("clusters are non-empty")
                .to_string();
            AliasCluster { canonical, forms: members.iter().map(|&fi| forms[fi].to_string()).collect() }
        })
        .collect();
    clusters.sort_by(|a, b| a.canonical.cmp(&b.canonical));

    let mut table = AliasTable { clusters, merges, by_form: HashMap::new() };
    table.reindex()?;
    Ok(AliasBuild { table, candidates })
}

/// Removes the record's own authors from its acknowledgee set. Matching is by
/// canonical identity, so `Hellman, Ziv` in the by-line removes `Ziv Hellman`.
pub fn remove_self_mentions(
    record: &BiblioRecord,
    acknowledgees: &BTreeSet<ScholarId>,
    aliases: &AliasTable,
) -> BTreeSet<ScholarId> {
    let authors: BTreeSet<ScholarId> = record.authors.iter().map(|a| aliases.author_identity(a)).collect();
    acknowledgees.difference(&authors).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn persons(text: &str) -> Vec<String> {
        extract_entities(text, &RuleBasedExtractor)
            .unwrap()
            .into_iter()
            .filter(|e| e.category == EntityCategory::Person)
            .map(|e| e.surface)
            .collect()
    }

    #[test]
    fn hellman_example() {
        let text = "Ziv Hellman acknowledges research support by Israel Science Foundation Grant 1626/18";
        let ents = extract_entities(text, &RuleBasedExtractor).unwrap();
        let view: Vec<_> = ents.iter().map(|e| (e.surface.as_str(), e.category)).collect();
        assert_eq!(
            view,
            vec![("Ziv Hellman", EntityCategory::Person), ("Israel Science Foundation", EntityCategory::Funder)]
        );
    }

    #[test]
    fn no_capitalized_runs() {
        assert!(extract_entities("thanks to everyone who helped.", &RuleBasedExtractor).unwrap().is_empty());
        assert!(extract_entities("   ", &RuleBasedExtractor).is_err());
    }

    #[test]
    fn lists_of_names() {
        assert_eq!(
            persons("We thank Daron Acemoglu, Lawrence F. Katz and Dr. Jean-Marc Robin for comments."),
            vec!["Daron Acemoglu", "Lawrence F. Katz", "Jean-Marc Robin"]
        );
        assert_eq!(
            persons("We are grateful to Stefano DellaVigna, Jan van der Berg, and seminar participants at Harvard University."),
            vec!["Stefano DellaVigna", "Jan van der Berg"]
        );
    }

    #[test]
    fn spans_are_character_offsets() {
        let text = "Ça va. We thank José Martínez.";
        let ents = extract_entities(text, &RuleBasedExtractor).unwrap();
        assert_eq!(ents.len(), 1);
        let chars: Vec<char> = text.chars().collect();
        let (s, e) = ents[0].span;
        assert_eq!(chars[s..e].iter().collect::<String>(), "José Martínez");
    }

    #[test]
    fn precomputed_annotations() {
        let text = "Thanks to Ann Lee and Bo Wu.";
        let ann = PrecomputedAnnotations(vec![(10, 17, EntityCategory::Person), (22, 27, EntityCategory::Person)]);
        let ents = extract_entities(text, &ann).unwrap();
        assert_eq!(ents[0].surface, "Ann Lee");
        assert_eq!(ents[1].surface, "Bo Wu");
        let overlapping =
            PrecomputedAnnotations(vec![(10, 17, EntityCategory::Person), (14, 20, EntityCategory::Person)]);
        assert!(matches!(extract_entities(text, &overlapping), Err(Error::OverlappingSpans { .. })));
        let outside = PrecomputedAnnotations(vec![(10, 99, EntityCategory::Person)]);
        assert!(matches!(extract_entities(text, &outside), Err(Error::SpanOutOfBounds { .. })));
    }

    #[test]
    fn similarity_basics() {
        assert_eq!(name_similarity("abcd", "abcd"), 1.0);
        assert_eq!(name_similarity("abcd", "bcde"), 0.75);
        assert_eq!(name_similarity("xyz", "abc"), 0.0);
    }

    #[test]
    fn person_normalization() {
        assert_eq!(normalize_person("Prof.  Amy   Finkelstein"), "Amy Finkelstein");
        assert_eq!(display_form("Katz, Lawrence F."), "Lawrence F. Katz");
        assert_eq!(display_form("Madonna"), "Madonna");
    }

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identical_forms_one_cluster() {
        let b = build_alias_table(&strings(&["J. Smith", "J. Smith"]), 0.8, MergeMode::Curated, &[]).unwrap();
        assert_eq!(b.table.clusters().len(), 1);
        assert!(b.candidates.is_empty());
    }

    #[test]
    fn transitive_closure_in_auto_mode() {
        // sim(A,B) and sim(B,C) exceed 0.8, sim(A,C) does not.
        let a = "Jon Smith";
        let b = "John Smith";
        let c = "John Smithe";
        assert!(name_similarity(a, b) > 0.8 && name_similarity(b, c) > 0.8);
        let a2 = "Jo Smith";
        let c2 = "John Smithee";
        assert!(name_similarity(a2, b) > 0.8 && name_similarity(b, c2) > 0.8);
        assert_eq!(name_similarity(a2, c2), 0.8);
        let built = build_alias_table(&strings(&[a2, b, c2]), 0.8, MergeMode::Auto, &[]).unwrap();
        assert_eq!(built.table.clusters().len(), 1);
        assert_eq!(built.candidates.len(), 2);
        let _ = (a, c);
    }

    #[test]
    fn curated_mode_merges_only_accepted() {
        let names =
            strings(&["Matthew Gentzkow", "Matt Gentzkow", "Matthew Gentzkow", "Andrei Shleifer", "Andrei Schleifer"]);
        let curated =
            vec![CuratedDecision { form_a: "Matt Gentzkow".into(), form_b: "Matthew Gentzkow".into(), accept: true }];
        let built = build_alias_table(&names, 0.8, MergeMode::Curated, &curated).unwrap();
        assert_eq!(built.table.canonical_of("Matt Gentzkow"), Some("Matthew Gentzkow"));
        assert_eq!(built.table.canonical_of("Andrei Schleifer"), Some("Andrei Schleifer"));
        assert_eq!(built.candidates.len(), 2);
        assert_eq!(built.candidates.iter().filter(|c| c.merged).count(), 1);

        let bad = vec![CuratedDecision { form_a: "Nobody Here".into(), form_b: "Matt Gentzkow".into(), accept: true }];
        assert!(matches!(build_alias_table(&names, 0.8, MergeMode::Curated, &bad), Err(Error::UnknownSurfaceForm(_))));
        assert!(build_alias_table(&names, 0.0, MergeMode::Curated, &[]).is_err());
    }

    #[test]
    fn canonical_tie_breaks() {
        let names = strings(&["Larry Katz", "Lawrence Katz"]);
        let curated =
            vec![CuratedDecision { form_a: "Larry Katz".into(), form_b: "Lawrence Katz".into(), accept: true }];
        // Below threshold, merged by curation; equal frequency, longer wins.
        let built = build_alias_table(&names, 0.8, MergeMode::Curated, &curated).unwrap();
        assert_eq!(built.table.canonical_of("Larry Katz"), Some("Lawrence Katz"));
        let names = strings(&["Bo Wu", "Bo Wo"]);
        let built = build_alias_table(&names, 0.7, MergeMode::Auto, &[]).unwrap();
        assert_eq!(built.table.canonical_of("Bo Wu"), Some("Bo Wo"));
    }

    #[test]
    fn self_mentions_are_removed() {
        let record = BiblioRecord {
            record_id: "194".into(),
            journal: String::new(),
            year: 2019,
            authors: vec!["Hellman, Ziv".into(), "Levy, John Yehuda".into()],
            ack_text: Some(
                "Ziv Hellman acknowledges research support by Israel Science Foundation Grant 1626/18".into(),
            ),
            cited_refs: BTreeSet::new(),
            doc_type: "Article".into(),
        };
        let table = AliasTable::default();
        let found: BTreeSet<ScholarId> =
            persons(record.ack_text.as_deref().unwrap()).iter().map(|p| table.identity(p)).collect();
        assert_eq!(found.len(), 1);
        assert!(remove_self_mentions(&record, &found, &table).is_empty());
        let other: BTreeSet<ScholarId> = [ScholarId::from("Amy Finkelstein")].into();
        assert_eq!(remove_self_mentions(&record, &other, &table), other);
    }
}
