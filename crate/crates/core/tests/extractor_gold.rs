use std::collections::BTreeSet;

use ackscope::extract::{extract_entities, RuleBasedExtractor};
use ackscope::EntityCategory;
use serde::Deserialize;

#[derive(Deserialize)]
struct Annotated {
    text: String,
    persons: Vec<String>,
}

#[derive(Deserialize)]
struct Recorded {
    texts: usize,
    gold_persons: usize,
    true_positives: usize,
    false_positives: usize,
    false_negatives: usize,
    precision: f64,
    recall: f64,
}

fn fixture(name: &str) -> String {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn person_extraction_against_hand_annotations() {
    let gold: Vec<Annotated> = fixture("gold_acks.jsonl")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let recorded: Recorded = serde_json::from_str(&fixture("gold_manifest.json")).unwrap();

    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for a in &gold {
        let want: BTreeSet<&str> = a.persons.iter().map(String::as_str).collect();
        let found = extract_entities(&a.text, &RuleBasedExtractor).unwrap();
        let got: BTreeSet<&str> =
            found.iter().filter(|e| e.category == EntityCategory::Person).map(|e| e.surface.as_str()).collect();
        for g in &got {
            if want.contains(g) {
                tp += 1;
            } else {
                fp += 1;
                eprintln!("spurious: {g:?} in {:?}", a.text);
            }
        }
        for w in want.difference(&got) {
            fn_ += 1;
            eprintln!("missed: {w:?} in {:?}", a.text);
        }
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    println!("tp={tp} fp={fp} fn={fn_} precision={precision:.4} recall={recall:.4}");

    assert_eq!(gold.len(), recorded.texts);
    assert_eq!(gold.iter().map(|a| a.persons.len()).sum::<usize>(), recorded.gold_persons);
    assert_eq!((tp, fp, fn_), (recorded.true_positives, recorded.false_positives, recorded.false_negatives));
    assert!((precision - recorded.precision).abs() < 1e-4);
    assert!((recall - recorded.recall).abs() < 1e-4);
}
