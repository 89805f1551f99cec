//! Bibliographic records and the exported-file parsers that produce them.
//!
//! Three input layouts are understood:
//!
//! * **field-tagged**: the plain-text export where every line starts with a
//!   two-letter tag (`PT`, `AU`, `FX`, `CR`, ...). A record runs from `PT` to
//!   `ER`; lines starting with whitespace continue the previous field.
//! * **delimited**: tab-separated text whose header row names the same tags.
//! * **structured**: JSON Lines, one [`BiblioRecord`] object per line. This is
//!   also the canonical serialization written by [`Corpus::to_jsonl`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mentions::MentionIndex;
use crate::{Error, Result};

/// One publication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiblioRecord {
    pub record_id: String,
    #[serde(default)]
    pub journal: String,
    pub year: i32,
    #[serde(default)]
    pub authors: Vec<String>,
    #[serde(default)]
    pub ack_text: Option<String>,
    /// Normalized reference keys, see [`reference_key`].
    #[serde(default)]
    pub cited_refs: BTreeSet<String>,
    #[serde(default)]
    pub doc_type: String,
}

impl BiblioRecord {
    /// True when the first document type component is "Article".
    ///
    /// Exports list combined types such as `Article; Proceedings Paper`.
    pub fn is_research_article(&self) -> bool {
        self.doc_type.split(';').next().map(|t| t.trim().eq_ignore_ascii_case("article")).unwrap_or(false)
    }

    pub fn has_ack(&self) -> bool {
        self.ack_text.as_deref().is_some_and(|t| !t.trim().is_empty())
    }
}

/// An immutable collection of records with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Corpus {
    records: Vec<BiblioRecord>,
    provenance: String,
}

impl Corpus {
    pub fn new(records: Vec<BiblioRecord>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.record_id.as_str()) {
                return Err(Error::DuplicateRecord(r.record_id.clone()));
            }
        }
        Ok(Self { records, provenance: provenance.into() })
    }

    pub fn records(&self) -> &[BiblioRecord] {
        &self.records
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, record_id: &str) -> Option<&BiblioRecord> {
        self.records.iter().find(|r| r.record_id == record_id)
    }

    /// Records carrying a non-empty acknowledgment text.
    pub fn filter_with_ack(&self) -> Corpus {
        self.filtered(BiblioRecord::has_ack)
    }

    /// Records whose document type is a research article.
    pub fn articles(&self) -> Corpus {
        self.filtered(BiblioRecord::is_research_article)
    }

    pub fn filtered(&self, keep: impl Fn(&BiblioRecord) -> bool) -> Corpus {
        Corpus {
            records: self.records.iter().filter(|r| keep(r)).cloned().collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// One JSON object per line, in record order.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecordFormat {
    FieldTagged,
    Delimited,
    Structured,
}

impl FromStr for RecordFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "field-tagged" | "tagged" | "plain" | "wos" => Ok(Self::FieldTagged),
            "delimited" | "tsv" | "tab" => Ok(Self::Delimited),
            "structured" | "jsonl" | "json" => Ok(Self::Structured),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for RecordFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FieldTagged => "field-tagged",
            Self::Delimited => "delimited",
            Self::Structured => "structured",
        })
    }
}

/// A record block that could not be turned into a [`BiblioRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedRecord {
    /// 1-based line where the offending block starts.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseOutcome {
    pub corpus: Corpus,
    pub skipped: Vec<SkippedRecord>,
}

/// Parses an exported record stream. Malformed blocks are skipped and listed
/// in [`ParseOutcome::skipped`]; they never abort the whole parse.
pub fn parse_records(source: &str, format: RecordFormat, provenance: impl Into<String>) -> Result<ParseOutcome> {
    let mut builder = CorpusBuilder::default();
    match format {
        RecordFormat::FieldTagged => parse_field_tagged(source, &mut builder),
        RecordFormat::Delimited => parse_delimited(source, &mut builder)?,
        RecordFormat::Structured => parse_structured(source, &mut builder),
    }
    let corpus = Corpus::new(builder.records, provenance)?;
    Ok(ParseOutcome { corpus, skipped: builder.skipped })
}

/// Normalizes a raw cited-reference string: uppercase, punctuation removed,
/// runs of whitespace collapsed to one space.
///
/// ```
/// use ackscope::corpus::reference_key;
/// assert_eq!(
///     reference_key("Merton, R.K., 1988, ISIS, V79, P606").unwrap(),
///     "MERTON RK 1988 ISIS V79 P606"
/// );
/// ```
pub fn reference_key(raw_citation: &str) -> Result<String> {
    let mut key = String::with_capacity(raw_citation.len());
    for word in raw_citation.split_whitespace() {
        let cleaned: String = word.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_uppercase).collect();
        if cleaned.is_empty() {
            continue;
        }
        if !key.is_empty() {
            key.push(' ');
        }
        key.push_str(&cleaned);
    }
    if key.is_empty() {
        return Err(Error::EmptyReference);
    }
    Ok(key)
}

/// Papers with at least one cited reference and at least one acknowledgee,
/// ordered by record id.
pub fn eligible_papers(corpus: &Corpus, index: &MentionIndex) -> Vec<String> {
    let mut ids: Vec<String> = corpus
        .records()
        .iter()
        .filter(|r| !r.cited_refs.is_empty())
        .filter(|r| index.acknowledgees(&r.record_id).is_some_and(|k| !k.is_empty()))
        .map(|r| r.record_id.clone())
        .collect();
    ids.sort();
    ids
}

#[derive(Default)]
struct CorpusBuilder {
    records: Vec<BiblioRecord>,
    skipped: Vec<SkippedRecord>,
    ids: HashSet<String>,
}

impl CorpusBuilder {
    fn push(&mut self, line: usize, record: std::result::Result<BiblioRecord, String>) {
        match record {
            Ok(r) if self.ids.contains(&r.record_id) => {
                self.skip(line, format!("duplicate record id `{}`", r.record_id))
            }
            Ok(r) => {
                self.ids.insert(r.record_id.clone());
                self.records.push(r);
            }
            Err(reason) => self.skip(line, reason),
        }
    }

    fn skip(&mut self, line: usize, reason: impl Into<String>) {
        self.skipped.push(SkippedRecord { line, reason: reason.into() });
    }
}

/// Tags whose continuation lines start a new value rather than extending text.
const MULTI_VALUED: &[&str] = &["AU", "AF", "CR", "BA", "BF", "CA", "GP", "ED"];

fn parse_field_tagged(source: &str, out: &mut CorpusBuilder) {
    let mut block: Option<TaggedBlock> = None;
    // Set when a malformed line poisons the open block.
    let mut poisoned: Option<String> = None;

    for (idx, raw) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches(['\r', '\u{feff}']);
        let line = if idx == 0 { line.trim_start_matches('\u{feff}') } else { line };
        if line.trim().is_empty() {
            continue;
        }

        if line.starts_with(char::is_whitespace) {
            match block.as_mut() {
                Some(b) if b.last_tag.is_some() => b.continue_field(line.trim()),
                Some(_) => poisoned = Some(format!("continuation line {lineno} before any field")),
                None => {}
            }
            continue;
        }

        let Some((tag, value)) = split_tag(line) else {
            if block.is_some() {
                poisoned.get_or_insert_with(|| format!("unrecognized line {lineno}"));
            }
            continue;
        };

        match tag {
            "FN" | "VR" | "EF" if block.is_none() => {}
            "PT" => {
                if let Some(open) = block.take() {
                    out.skip(open.start, "record not terminated by ER");
                }
                poisoned = None;
                let mut b = TaggedBlock::new(lineno);
                b.add_field(tag, value);
                block = Some(b);
            }
            "ER" => match block.take() {
                Some(b) => {
                    let start = b.start;
                    match poisoned.take() {
                        Some(reason) => out.skip(start, reason),
                        None => out.push(start, b.into_record()),
                    }
                }
                None => out.skip(lineno, "ER without a matching PT"),
            },
            _ => match block.as_mut() {
                Some(b) => b.add_field(tag, value),
                None => out.skip(lineno, format!("field `{tag}` outside a record")),
            },
        }
    }
    if let Some(open) = block {
        out.skip(open.start, "record not terminated by ER");
    }
}

fn split_tag(line: &str) -> Option<(&str, &str)> {
    let tag = line.get(..2)?;
    if !tag.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit()) {
        return None;
    }
    if !tag.starts_with(|c: char| c.is_ascii_uppercase()) {
        return None;
    }
    let rest = &line[2..];
    if !rest.is_empty() && !rest.starts_with(' ') {
        return None;
    }
    Some((tag, rest.trim()))
}

struct TaggedBlock {
    start: usize,
    fields: BTreeMap<String, Vec<String>>,
    last_tag: Option<String>,
}

impl TaggedBlock {
    fn new(start: usize) -> Self {
        Self { start, fields: BTreeMap::new(), last_tag: None }
    }

    fn add_field(&mut self, tag: &str, value: &str) {
        self.fields.entry(tag.to_string()).or_default().push(value.to_string());
        self.last_tag = Some(tag.to_string());
    }

    fn continue_field(&mut self, value: &str) {
        let Some(tag) = self.last_tag.clone() else {
            return;
        };
        let values = self.fields.entry(tag.clone()).or_default();
        if MULTI_VALUED.contains(&tag.as_str()) {
            values.push(value.to_string());
        } else if let Some(last) = values.last_mut() {
            if !last.is_empty() {
                last.push(' ');
            }
            last.push_str(value);
        }
    }

    fn single(&self, tag: &str) -> Option<&str> {
        self.fields.get(tag).and_then(|v| v.first()).map(String::as_str).filter(|s| !s.is_empty())
    }

    fn into_record(self) -> std::result::Result<BiblioRecord, String> {
        let record_id = self.single("UT").ok_or("missing UT (record id)")?.to_string();
        let year = parse_year(self.single("PY"))?;
        let authors = self
            .fields
            .get("AF")
            .or_else(|| self.fields.get("AU"))
            .map(|v| v.iter().filter(|a| !a.is_empty()).cloned().collect())
            .unwrap_or_default();
        let ack_text = self.single("FX").or_else(|| self.single("FT")).map(str::to_string);
        let cited_refs =
            self.fields.get("CR").map(|v| v.iter().filter_map(|c| reference_key(c).ok()).collect()).unwrap_or_default();
        Ok(BiblioRecord {
            record_id,
            journal: self.single("SO").unwrap_or_default().to_string(),
            year,
            authors,
            ack_text,
            cited_refs,
            doc_type: self.single("DT").unwrap_or_default().to_string(),
        })
    }
}

fn parse_year(value: Option<&str>) -> std::result::Result<i32, String> {
    let raw = value.ok_or("missing PY (publication year)")?;
    raw.trim().parse().map_err(|_| format!("invalid publication year `{raw}`"))
}

fn split_multi(value: &str) -> Vec<String> {
    value.split(';').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn parse_delimited(source: &str, out: &mut CorpusBuilder) -> Result<()> {
    let source = source.trim_start_matches('\u{feff}');
    if source.trim().is_empty() {
        return Ok(());
    }
    let mut reader =
        csv::ReaderBuilder::new().delimiter(b'\t').quoting(false).flexible(true).from_reader(source.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let ut = column("UT");
    let py = column("PY");
    let so = column("SO");
    let dt = column("DT");
    let authors_col = column("AF").or_else(|| column("AU"));
    let ack_col = column("FX").or_else(|| column("FT"));
    let cr = column("CR");

    for (idx, row) in reader.records().enumerate() {
        // Header occupies line 1.
        let lineno = idx + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                out.skip(lineno, e.to_string());
                continue;
            }
        };
        let get = |col: Option<usize>| col.and_then(|c| row.get(c)).map(str::trim).filter(|s| !s.is_empty());
        let record = (|| {
            let record_id = get(ut).ok_or("missing UT (record id)")?.to_string();
            let year = parse_year(get(py))?;
            Ok(BiblioRecord {
                record_id,
                journal: get(so).unwrap_or_default().to_string(),
                year,
                authors: get(authors_col).map(split_multi).unwrap_or_default(),
                ack_text: get(ack_col).map(str::to_string),
                cited_refs: get(cr)
                    .map(|v| v.split(';').filter_map(|c| reference_key(c).ok()).collect())
                    .unwrap_or_default(),
                doc_type: get(dt).unwrap_or_default().to_string(),
            })
        })();
        out.push(lineno, record);
    }
    Ok(())
}

#[derive(Deserialize)]
struct StructuredRecord {
    record_id: String,
    #[serde(default)]
    journal: String,
    year: i32,
    #[serde(default)]
    authors: Vec<String>,
    #[serde(default)]
    ack_text: Option<String>,
    #[serde(default)]
    cited_refs: Vec<String>,
    #[serde(default)]
    doc_type: String,
}

fn parse_structured(source: &str, out: &mut CorpusBuilder) {
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim().trim_start_matches('\u{feff}');
        if line.is_empty() {
            continue;
        }
        let record = serde_json::from_str::<StructuredRecord>(line).map_err(|e| e.to_string()).map(|s| BiblioRecord {
            record_id: s.record_id,
            journal: s.journal,
            year: s.year,
            authors: s.authors,
            ack_text: s.ack_text,
            cited_refs: s.cited_refs.iter().filter_map(|c| reference_key(c).ok()).collect(),
            doc_type: s.doc_type,
        });
        out.push(lineno, record);
    }
}
