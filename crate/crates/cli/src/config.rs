use std::path::{Path, PathBuf};

use ackscope::acknet::ExpectedModel;
use ackscope::corpus::RecordFormat;
use ackscope::extract::MergeMode;
use anyhow::{Context, Result};
use serde::Deserialize;

use crate::Usage;

pub const OUTPUT_DIR_ENV: &str = "ACKSCOPE_OUTPUT_DIR";

/// Settings shared by every subcommand.
///
/// Values come from the built-in defaults, then the TOML config file, then
/// the output directory environment variable, then command-line flags.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: Vec<PathBuf>,
    /// `None` picks the format from each file's extension.
    pub format: Option<RecordFormat>,
    pub alias_threshold: f64,
    pub merge_mode: MergeMode,
    pub curated: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub high_threshold: usize,
    pub families: Option<PathBuf>,
    /// Acknowledgees with more than this many mentions are listed as top.
    pub top_cutoff: usize,
    pub metadata: Option<PathBuf>,
    pub min_lemma: usize,
    pub resolution: f64,
    pub binarize: bool,
    pub expected_model: ExpectedModel,
    pub top_social: usize,
    pub top_intellectual: usize,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: Vec::new(),
            format: None,
            alias_threshold: 0.8,
            merge_mode: MergeMode::Curated,
            curated: None,
            annotations: None,
            high_threshold: 10,
            families: None,
            top_cutoff: 20,
            metadata: None,
            min_lemma: 1,
            resolution: 1.0,
            binarize: false,
            expected_model: ExpectedModel::DyadConditional,
            top_social: 6,
            top_intellectual: 7,
            output_dir: PathBuf::from("ackscope-out"),
        }
    }
}

/// On-disk layout of the config file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub input: Option<Vec<PathBuf>>,
    pub format: Option<String>,
    pub alias_threshold: Option<f64>,
    pub merge_mode: Option<String>,
    pub curated: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub high_threshold: Option<usize>,
    pub families: Option<PathBuf>,
    pub top_cutoff: Option<usize>,
    pub metadata: Option<PathBuf>,
    pub min_lemma: Option<usize>,
    pub resolution: Option<f64>,
    pub binarize: Option<bool>,
    pub expected_model: Option<String>,
    pub top_social: Option<usize>,
    pub top_intellectual: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

pub fn parse_format(s: &str) -> Result<Option<RecordFormat>, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|e: ackscope::Error| e.to_string())
}

pub fn parse_merge_mode(s: &str) -> Result<MergeMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "curated" => Ok(MergeMode::Curated),
        "auto" => Ok(MergeMode::Auto),
        _ => Err(format!("unknown merge mode `{s}` (expected curated or auto)")),
    }
}

pub fn parse_expected_model(s: &str) -> Result<ExpectedModel, String> {
    s.parse().map_err(|e: ackscope::Error| e.to_string())
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

impl PipelineConfig {
    /// Applies a config file; relative paths are taken from its directory.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Usage(format!("cannot read config file {}: {e}", path.display())))?;
        let file: ConfigFile =
            toml::from_str(&text).map_err(|e| Usage(format!("invalid config file {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let usage = |e: String| Usage(format!("{}: {e}", path.display()));

        if let Some(v) = file.input {
            self.input = v.into_iter().map(|p| resolve(base, p)).collect();
        }
        if let Some(v) = file.format {
            self.format = parse_format(&v).map_err(usage)?;
        }
        if let Some(v) = file.merge_mode {
            self.merge_mode = parse_merge_mode(&v).map_err(usage)?;
        }
        if let Some(v) = file.expected_model {
            self.expected_model = parse_expected_model(&v).map_err(usage)?;
        }
        macro_rules! take {
            ($($field:ident),*) => { $(if let Some(v) = file.$field { self.$field = v; })* };
        }
        take!(
            alias_threshold,
            high_threshold,
            top_cutoff,
            min_lemma,
            resolution,
            binarize,
            top_social,
            top_intellectual
        );
        macro_rules! take_path {
            ($($field:ident),*) => { $(if let Some(v) = file.$field { self.$field = Some(resolve(base, v)); })* };
        }
        take_path!(curated, annotations, families, metadata);
        if let Some(v) = file.output_dir {
            self.output_dir = resolve(base, v);
        }
        Ok(())
    }

    /// Range checks and presence of every configured input file.
    pub fn validate(&self) -> Result<()> {
        if !(self.alias_threshold > 0.0 && self.alias_threshold <= 1.0) {
            return Err(Usage(format!("alias threshold must be in (0, 1], got {}", self.alias_threshold)).into());
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Usage(format!("resolution must be positive, got {}", self.resolution)).into());
        }
        for (name, v) in [
            ("high-visibility threshold", self.high_threshold),
            ("top-social", self.top_social),
            ("top-intellectual", self.top_intellectual),
        ] {
            if v == 0 {
                return Err(Usage(format!("{name} must be at least 1")).into());
            }
        }
        let optional = [&self.curated, &self.annotations, &self.families, &self.metadata];
        for p in self.input.iter().chain(optional.into_iter().flatten()) {
            if !p.is_file() {
                return Err(Usage(format!("configured file {} does not exist", p.display())).into());
            }
        }
        Ok(())
    }
}

/// Record format from a file extension.
pub fn format_for(path: &Path, configured: Option<RecordFormat>) -> RecordFormat {
    configured.unwrap_or_else(|| {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("jsonl" | "json" | "ndjson") => RecordFormat::Structured,
            Some("tsv" | "tab") => RecordFormat::Delimited,
            _ => RecordFormat::FieldTagged,
        }
    })
}

pub fn read_optional(path: &Option<PathBuf>) -> Result<Option<String>> {
    path.as_ref().map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))).transpose()
}
