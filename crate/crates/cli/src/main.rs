//! `ackscope`: staged pipeline from exported bibliographic records to
//! acknowledgment network analyses. Stages exchange plain-text artifacts in
//! the output directory, so each can be re-run on its own.

mod config;
mod stages;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use ackscope::acknet::ExpectedModel;
use ackscope::corpus::RecordFormat;
use ackscope::extract::MergeMode;
use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{parse_expected_model, parse_format, parse_merge_mode, PipelineConfig, OUTPUT_DIR_ENV};
use workspace::Workspace;

/// Invalid invocation or configuration. Reported with exit status 1; every
/// other failure is a data error with status 2.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// `None` selects the format from the file extension.
#[derive(Debug, Clone, Copy)]
struct FormatArg(Option<RecordFormat>);

#[derive(Parser, Debug)]
#[command(name = "ackscope", version, about = "Acknowledgment mining and network analysis pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Artifact directory (overrides the config file and the environment).
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Exported record file; repeat for several files.
    #[arg(long, global = true, value_name = "PATH")]
    input: Vec<PathBuf>,

    /// Record format: field-tagged, delimited, structured or auto.
    #[arg(long, global = true, value_parser = |s: &str| parse_format(s).map(FormatArg))]
    format: Option<FormatArg>,

    /// Similarity above which two name forms become merge candidates.
    #[arg(long, global = true)]
    alias_threshold: Option<f64>,

    /// curated: apply only confirmed merges; auto: merge every candidate.
    #[arg(long, global = true, value_parser = parse_merge_mode)]
    merge_mode: Option<MergeMode>,

    /// Curated merge decisions (form_a, form_b, decision).
    #[arg(long, global = true, value_name = "PATH")]
    curated: Option<PathBuf>,

    /// Precomputed entity annotations used instead of the rule-based extractor.
    #[arg(long, global = true, value_name = "PATH")]
    annotations: Option<PathBuf>,

    /// Mentions needed for an acknowledgee to count as highly visible.
    #[arg(long, global = true)]
    high_threshold: Option<usize>,

    /// Keyword family definitions, one `[Name]` section per family.
    #[arg(long, global = true, value_name = "PATH")]
    families: Option<PathBuf>,

    /// Acknowledgees with more than this many mentions are ranked as top.
    #[arg(long, global = true)]
    top_cutoff: Option<usize>,

    /// Extra columns for the top acknowledgees, keyed by canonical name.
    #[arg(long, global = true, value_name = "PATH")]
    metadata: Option<PathBuf>,

    /// Minimum occurrences for a lemma to be listed.
    #[arg(long, global = true)]
    min_lemma: Option<usize>,

    /// Louvain resolution.
    #[arg(long, global = true)]
    resolution: Option<f64>,

    /// Run Louvain on unweighted coupling networks.
    #[arg(long, global = true)]
    binarize: bool,

    /// Baseline for expected triad counts: dyad-conditional or arc-bernoulli.
    #[arg(long, global = true, value_parser = parse_expected_model)]
    expected_model: Option<ExpectedModel>,

    /// Social communities kept in the contingency table.
    #[arg(long, global = true)]
    top_social: Option<usize>,

    /// Intellectual communities kept in the contingency and decomposition tables.
    #[arg(long, global = true)]
    top_intellectual: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Parse exported records into corpus.jsonl.
    Ingest,
    /// Find acknowledgees and build the alias table.
    Extract,
    /// Lemma frequencies and keyword-family report.
    Textstats,
    /// Mention index, distribution statistics and rankings.
    Mentions,
    /// Build the author -> acknowledgee network.
    Network,
    /// Strong components and symmetric-acyclic decomposition.
    Decompose,
    /// Triad census with expected counts.
    Triads,
    /// Intellectual and social similarity between papers.
    Coupling,
    /// Distance correlation, communities and contingency analysis.
    Compare,
    /// Combine every stage summary into report.json.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::Ingest => "ingest",
            Self::Extract => "extract",
            Self::Textstats => "textstats",
            Self::Mentions => "mentions",
            Self::Network => "network",
            Self::Decompose => "decompose",
            Self::Triads => "triads",
            Self::Coupling => "coupling",
            Self::Compare => "compare",
            Self::Report => "report",
        }
    }
}

fn build_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
        cfg.output_dir = PathBuf::from(dir);
    }
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    if !cli.input.is_empty() {
        cfg.input = cli.input.clone();
    }
    macro_rules! flag {
        ($($field:ident),*) => { $(if let Some(v) = cli.$field.clone() { cfg.$field = v; })* };
    }
    if let Some(FormatArg(f)) = cli.format {
        cfg.format = f;
    }
    flag!(alias_threshold, merge_mode, high_threshold, top_cutoff, min_lemma, resolution);
    flag!(expected_model, top_social, top_intellectual);
    macro_rules! path_flag {
        ($($field:ident),*) => { $(if let Some(v) = cli.$field.clone() { cfg.$field = Some(v); })* };
    }
    path_flag!(curated, annotations, families, metadata);
    cfg.binarize |= cli.binarize;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = build_config(&cli).and_then(|cfg| {
        let ws = Workspace::new(&cfg.output_dir);
        stages::run(cli.command.name(), &cfg, &ws)
    });
    match result {
        Ok(out) => {
            println!("{}", out.line);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
