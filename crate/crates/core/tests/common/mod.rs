#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use ackscope::corpus::{parse_records, Corpus, RecordFormat};
use ackscope::extract::{
    build_alias_table, extract_entities, AliasBuild, EntityCategory, MergeMode, RuleBasedExtractor,
};
use ackscope::mentions::{build_mention_index, MentionIndex};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture present")
}

pub fn manifest() -> serde_json::Value {
    serde_json::from_str(&read_fixture("manifest.json")).expect("valid manifest")
}

pub struct Pipeline {
    pub corpus: Corpus,
    pub persons: BTreeMap<String, Vec<String>>,
    pub aliases: AliasBuild,
    pub index: MentionIndex,
}

/// Runs ingest → extract → alias → mention index on the 30-record fixture.
pub fn fixture_pipeline() -> Pipeline {
    let outcome = parse_records(&read_fixture("corpus30.wos"), RecordFormat::FieldTagged, "corpus30.wos").unwrap();
    assert!(outcome.skipped.is_empty(), "{:?}", outcome.skipped);
    let corpus = outcome.corpus;
    let persons: BTreeMap<String, Vec<String>> = corpus
        .records()
        .iter()
        .filter_map(|r| r.ack_text.as_deref().map(|t| (r, t)))
        .map(|(r, text)| {
            let names = extract_entities(text, &RuleBasedExtractor)
                .unwrap()
                .into_iter()
                .filter(|e| e.category == EntityCategory::Person)
                .map(|e| e.surface)
                .collect();
            (r.record_id.clone(), names)
        })
        .collect();
    let all: Vec<String> = persons.values().flatten().cloned().collect();
    let curated = ackscope::io::read_curated_tsv(&read_fixture("curated.tsv")).unwrap();
    let aliases = build_alias_table(&all, 0.8, MergeMode::Curated, &curated).unwrap();
    let index = build_mention_index(&corpus, &persons, &aliases.table);
    Pipeline { corpus, persons, aliases, index }
}
