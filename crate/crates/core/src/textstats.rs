//! Word-level statistics over acknowledgment texts: lemma frequencies and
//! keyword-family counts.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::{Error, Result};

const LEXICON: &str = include_str!("../data/lexicon.txt");
const EXCEPTIONS: &str = include_str!("../data/lemma_exceptions.tsv");

struct Lemmatizer {
    lexicon: HashSet<&'static str>,
    exceptions: HashMap<&'static str, &'static str>,
}

fn lemmatizer() -> &'static Lemmatizer {
    static CELL: OnceLock<Lemmatizer> = OnceLock::new();
    CELL.get_or_init(|| {
        let data_lines = |s: &'static str| s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        Lemmatizer {
            lexicon: data_lines(LEXICON).collect(),
            exceptions: data_lines(EXCEPTIONS)
                .filter_map(|l| l.split_once('\t'))
                .map(|(k, v)| (k.trim(), v.trim()))
                .collect(),
        }
    })
}

impl Lemmatizer {
    fn base_form(&self, lower: &str) -> String {
        if let Some(l) = self.exceptions.get(lower) {
            return l.to_string();
        }
        if self.lexicon.contains(lower) {
            return lower.to_string();
        }
        for candidate in inflection_candidates(lower) {
            if self.lexicon.contains(candidate.as_str()) {
                return candidate;
            }
        }
        lower.to_string()
    }
}

/// Possible base forms of an inflected lowercase word, most specific first.
fn inflection_candidates(w: &str) -> Vec<String> {
    let mut out = Vec::new();
    let undouble = |stem: &str| -> Option<String> {
        let mut cs = stem.chars().rev();
        match (cs.next(), cs.next()) {
            (Some(a), Some(b)) if a == b && !"aeiou".contains(a) => Some(stem[..stem.len() - a.len_utf8()].to_string()),
            _ => None,
        }
    };
    if let Some(stem) = w.strip_suffix("ies") {
        out.push(format!("{stem}y"));
    }
    if let Some(stem) = w.strip_suffix("ied") {
        out.push(format!("{stem}y"));
    }
    if let Some(stem) = w.strip_suffix('s') {
        if !stem.ends_with('s') {
            out.push(stem.to_string());
        }
    }
    if let Some(stem) = w.strip_suffix("es") {
        out.push(stem.to_string());
    }
    if let Some(stem) = w.strip_suffix("ing") {
        out.push(stem.to_string());
        out.push(format!("{stem}e"));
        out.extend(undouble(stem));
    }
    if let Some(stem) = w.strip_suffix("ed") {
        out.push(stem.to_string());
        out.push(format!("{stem}e"));
        out.extend(undouble(stem));
    }
    out.retain(|c| c.chars().count() >= 2);
    out
}

/// Restores the capitalization pattern of `surface` on `lemma`.
fn match_case(surface: &str, lemma: String) -> String {
    let letters: Vec<char> = surface.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.len() > 1 && letters.iter().all(|c| c.is_uppercase()) {
        return lemma.to_uppercase();
    }
    if surface.chars().next().is_some_and(char::is_uppercase) {
        let mut cs = lemma.chars();
        return match cs.next() {
            Some(first) => first.to_uppercase().chain(cs).collect(),
            None => lemma,
        };
    }
    lemma
}

/// Word tokens: maximal runs of alphanumeric characters.
pub fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty())
}

/// Dictionary form of every token, keeping the token's capitalization.
///
/// ```
/// use ackscope::textstats::lemmatize;
/// assert_eq!(lemmatize("reads reading read"), vec!["read", "read", "read"]);
/// assert_eq!(lemmatize("University universities"), vec!["University", "university"]);
/// ```
pub fn lemmatize(text: &str) -> Vec<String> {
    let lem = lemmatizer();
    tokens(text).map(|t| match_case(t, lem.base_form(&t.to_lowercase()))).collect()
}

/// Lemma counts, most frequent first (ties by lemma). Counting is
/// case-sensitive: `research` and `Research` are separate rows.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaTable {
    pub rows: Vec<(String, usize)>,
}

impl LemmaTable {
    pub fn get(&self, lemma: &str) -> Option<usize> {
        self.rows.iter().find(|(l, _)| l == lemma).map(|&(_, n)| n)
    }

    pub fn total(&self) -> usize {
        self.rows.iter().map(|(_, n)| n).sum()
    }
}

/// Lemma counts over every acknowledgment text; rows with fewer than
/// `min_occurrences` occurrences are dropped.
pub fn lemma_table(corpus: &Corpus, min_occurrences: usize) -> LemmaTable {
    let counts = corpus
        .records()
        .par_iter()
        .filter_map(|r| r.ack_text.as_deref())
        .map(|text| {
            let mut local: HashMap<String, usize> = HashMap::new();
            for l in lemmatize(text) {
                *local.entry(l).or_insert(0) += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let mut rows: Vec<(String, usize)> = counts.into_iter().filter(|&(_, n)| n >= min_occurrences).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    LemmaTable { rows }
}

/// One term of a keyword family. Every word matches a token by
/// case-insensitive prefix, so `referee` also matches `referees`; phrases
/// require their words on consecutive tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term(pub Vec<String>);

impl Term {
    pub fn parse(pattern: &str) -> Option<Self> {
        let words: Vec<String> = tokens(pattern).map(str::to_lowercase).collect();
        (!words.is_empty()).then_some(Self(words))
    }

    fn matches(&self, lowered: &[String]) -> bool {
        let n = self.0.len();
        lowered.len() >= n
            && lowered.windows(n).any(|w| w.iter().zip(&self.0).all(|(tok, word)| tok.starts_with(word.as_str())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordFamily {
    pub name: String,
    pub terms: Vec<Term>,
}

impl KeywordFamily {
    pub fn new(name: impl Into<String>, patterns: &[&str]) -> Result<Self> {
        let terms: Vec<Term> = patterns.iter().filter_map(|p| Term::parse(p)).collect();
        let name = name.into();
        if terms.is_empty() {
            return Err(Error::InvalidParameter(format!("keyword family `{name}` has no terms")));
        }
        Ok(Self { name, terms })
    }

    /// True when any term occurs in the lowercased token list.
    pub fn matches_tokens(&self, lowered: &[String]) -> bool {
        self.terms.iter().any(|t| t.matches(lowered))
    }

    pub fn matches(&self, text: &str) -> bool {
        self.matches_tokens(&lowered_tokens(text))
    }
}

fn lowered_tokens(text: &str) -> Vec<String> {
    tokens(text).map(str::to_lowercase).collect()
}

/// Peer interactive communication vocabulary.
pub const PIC_TERMS: [&str; 18] = [
    "comment",
    "suggestion",
    "communication",
    "discussion",
    "reading",
    "advice",
    "insight",
    "inspiration",
    "inspiring",
    "correspondence",
    "feedback",
    "intellectual debt",
    "intellectual influence",
    "conversation",
    "remark",
    "discussant",
    "helpful",
    "insightful",
];

/// The five standard families: conference/seminar, audience, reviewers,
/// editors and peer interactive communication.
pub fn default_families() -> Vec<KeywordFamily> {
    let fam = |name: &str, terms: &[&str]| KeywordFamily::new(name, terms).expect("non-empty family");
    vec![
        fam("Conference and/or seminar", &["conference", "seminar"]),
        fam("Audience", &["audience"]),
        fam("Reviewers", &["reviewer", "referee"]),
        fam("Editors", &["editor"]),
        fam("Peer interactive communication words", &PIC_TERMS),
    ]
}

/// Mentions of criticism ("critic", "criticism", ...).
pub fn negative_feedback_family() -> KeywordFamily {
    KeywordFamily::new("Negative feedback", &["critic"]).expect("non-empty family")
}

/// Reads families from an INI-like file: a `[Family name]` header opens a
/// section, every other non-empty line is a term. `#` starts a comment.
pub fn parse_families(source: &str) -> Result<Vec<KeywordFamily>> {
    let mut families: Vec<(String, Vec<String>)> = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            families.push((name.trim().to_string(), Vec::new()));
        } else {
            match families.last_mut() {
                Some((_, terms)) => terms.push(line.to_string()),
                None => return Err(Error::Parse { line: idx + 1, message: "term outside a [family] section".into() }),
            }
        }
    }
    families
        .into_iter()
        .map(|(name, terms)| {
            let refs: Vec<&str> = terms.iter().map(String::as_str).collect();
            KeywordFamily::new(name, &refs)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCount {
    pub family: String,
    pub articles: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordReport {
    /// Articles with an acknowledgment text, the percentage base.
    pub articles_with_ack: usize,
    pub families: Vec<FamilyCount>,
    /// Articles matching every family in `families`.
    pub all_families: usize,
    pub negative: Option<FamilyCount>,
}

fn percent(count: usize, base: usize) -> f64 {
    if base == 0 {
        0.0
    } else {
        100.0 * count as f64 / base as f64
    }
}

/// Counts articles whose acknowledgment matches each family; an article
/// counts once per family.
pub fn keyword_report(corpus: &Corpus, families: &[KeywordFamily], negative: Option<&KeywordFamily>) -> KeywordReport {
    let texts: Vec<Vec<String>> = corpus
        .records()
        .par_iter()
        .filter(|r| r.has_ack())
        .map(|r| lowered_tokens(r.ack_text.as_deref().unwrap_or_default()))
        .collect();
    let base = texts.len();
    let hits: Vec<Vec<bool>> =
        texts.par_iter().map(|t| families.iter().map(|f| f.matches_tokens(t)).collect()).collect();

    let families_out = families
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let articles = hits.iter().filter(|h| h[i]).count();
            FamilyCount { family: f.name.clone(), articles, percent: percent(articles, base) }
        })
        .collect();
    let all_families = if families.is_empty() { 0 } else { hits.iter().filter(|h| h.iter().all(|&x| x)).count() };
    let negative = negative.map(|f| {
        let articles = texts.iter().filter(|t| f.matches_tokens(t)).count();
        FamilyCount { family: f.name.clone(), articles, percent: percent(articles, base) }
    });
    KeywordReport { articles_with_ack: base, families: families_out, all_families, negative }
}

/// Total token count over the corpus' acknowledgment texts.
pub fn token_count(corpus: &Corpus) -> usize {
    corpus.records().iter().filter_map(|r| r.ack_text.as_deref()).map(|t| tokens(t).count()).sum()
}

/// Lemma table restricted to rows above a threshold, as a map.
pub fn lemma_counts(table: &LemmaTable) -> BTreeMap<&str, usize> {
    table.rows.iter().map(|(l, n)| (l.as_str(), *n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::BiblioRecord;

    fn corpus(texts: &[Option<&str>]) -> Corpus {
        let records = texts
            .iter()
            .enumerate()
            .map(|(i, t)| BiblioRecord {
                record_id: format!("r{i}"),
                journal: String::new(),
                year: 2017,
                authors: vec!["A, B".into()],
                ack_text: t.map(str::to_string),
                cited_refs: Default::default(),
                doc_type: "Article".into(),
            })
            .collect();
        Corpus::new(records, "test").unwrap()
    }

    #[test]
    fn lemmatize_examples() {
        assert_eq!(lemmatize("reads reading read"), vec!["read", "read", "read"]);
        assert!(lemmatize("").is_empty());
        assert_eq!(lemmatize("University universities"), vec!["University", "university"]);
    }

    #[test]
    fn lemmatize_acknowledgment_vocabulary() {
        assert_eq!(
            lemmatize(
                "We thank seminar participants for helpful comments and gratefully acknowledged financial support"
            ),
            vec![
                "We",
                "thank",
                "seminar",
                "participant",
                "for",
                "helpful",
                "comment",
                "and",
                "gratefully",
                "acknowledge",
                "financial",
                "support"
            ]
        );
        assert_eq!(lemmatize("Thanks referees studies was NBER"), vec!["Thank", "referee", "study", "be", "NBER"]);
        // Unknown words pass through; hyphens split.
        assert_eq!(lemmata("co-authors Blorbs"), vec!["co", "author", "Blorbs"]);
        assert_eq!(lemmatize("planned running"), vec!["plan", "run"]);
        assert_eq!(lemmatize("Economics anonymous"), vec!["Economics", "anonymous"]);
    }

    fn lemmata(s: &str) -> Vec<String> {
        lemmatize(s)
    }

    #[test]
    fn lemma_table_is_case_sensitive() {
        let c = corpus(&[Some("Research research researches."), Some("research support"), None]);
        let t = lemma_table(&c, 0);
        assert_eq!(t.get("research"), Some(3));
        assert_eq!(t.get("Research"), Some(1));
        assert_eq!(t.rows[0], ("research".to_string(), 3));
        assert_eq!(t.total(), token_count(&c));
        assert_eq!(lemma_table(&c, 2).rows.len(), 1);
        assert!(lemma_table(&corpus(&[Some(""), None]), 0).rows.is_empty());
    }

    #[test]
    fn keyword_matching() {
        let c = corpus(&[
            Some("We thank two anonymous referees, the editor and seminar audiences."),
            Some("Comments from conference participants. Constructive criticism from X."),
            Some("Financial support from the NSF."),
            Some("We owe an intellectual debt to our advisors."),
            None,
        ]);
        let report = keyword_report(&c, &default_families(), Some(&negative_feedback_family()));
        assert_eq!(report.articles_with_ack, 4);
        let counts: Vec<usize> = report.families.iter().map(|f| f.articles).collect();
        // conference/seminar, audience, reviewers, editors, PIC
        assert_eq!(counts, vec![2, 1, 1, 1, 2]);
        assert_eq!(report.families[0].percent, 50.0);
        assert_eq!(report.all_families, 0);
        assert_eq!(report.negative.as_ref().unwrap().articles, 1);
    }

    #[test]
    fn phrase_terms_need_consecutive_words() {
        let f = KeywordFamily::new("x", &["intellectual debt"]).unwrap();
        assert!(f.matches("an Intellectual  debts owed"));
        assert!(!f.matches("intellectual and debt"));
        assert!(KeywordFamily::new("empty", &["  ", "--"]).is_err());
    }

    #[test]
    fn family_file() {
        let fams = parse_families("# families\n[PIC]\ncomment\nintellectual debt\n\n[Editors]\neditor\n").unwrap();
        assert_eq!(fams.len(), 2);
        assert_eq!(fams[0].terms.len(), 2);
        assert!(parse_families("orphan\n[A]\nx\n").is_err());
        assert!(parse_families("[Empty]\n").is_err());
    }

    #[test]
    fn pic_list_has_eighteen_items() {
        assert_eq!(PIC_TERMS.len(), 18);
        assert_eq!(default_families()[4].terms.len(), 18);
    }
}
