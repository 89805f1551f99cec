use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::Value;

/// Stages in pipeline order. Each writes `<stage>.summary.json`.
pub const STAGES: [&str; 9] =
    ["ingest", "extract", "textstats", "mentions", "network", "decompose", "triads", "coupling", "compare"];

/// Which subcommand produces an artifact.
fn producer(artifact: &str) -> &'static str {
    match artifact {
        "corpus.jsonl" | "skipped.tsv" => "ingest",
        "entities.tsv" | "aliases.tsv" | "alias_candidates.tsv" => "extract",
        "mentions.tsv" | "top_acknowledgees.tsv" | "quotas.tsv" | "lorenz.tsv" => "mentions",
        "nodes.tsv" | "arcs.tsv" | "network.net" => "network",
        "similarity_intellectual.tsv" | "similarity_social.tsv" => "coupling",
        s => STAGES.iter().find(|st| s == format!("{st}.summary.json")).copied().unwrap_or("the producing stage"),
    }
}

/// The output directory holding every artifact.
pub struct Workspace {
    dir: PathBuf,
}

impl Workspace {
    pub fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf() }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Reads an upstream artifact, naming the subcommand that creates it when
    /// it is missing.
    pub fn read(&self, name: &str) -> Result<String> {
        let path = self.path(name);
        if !path.is_file() {
            bail!("missing artifact {}; run `ackscope {}` first", path.display(), producer(name));
        }
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))
    }

    pub fn write(&self, name: &str, content: &str) -> Result<()> {
        std::fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let path = self.path(name);
        std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))
    }

    pub fn write_summary(&self, stage: &str, summary: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(summary)?;
        text.push('\n');
        self.write(&format!("{stage}.summary.json"), &text)
    }

    pub fn read_summary(&self, stage: &str) -> Result<Value> {
        Ok(serde_json::from_str(&self.read(&format!("{stage}.summary.json"))?)?)
    }
}
