use std::collections::{BTreeMap, BTreeSet};

use ackscope::acknet::{
    self, build_network, cluster_flows, dyad_census, strong_components, symmetric_acyclic_decomposition,
    symmetric_core, triad_census, AckGraph,
};
use ackscope::assoc::{contingency, distance_correlation, louvain, mention_decomposition, pearson_r2};
use ackscope::corpus::{parse_records, Corpus, RecordFormat};
use ackscope::coupling::{build_coupling, CouplingNetwork, Layer};
use ackscope::extract::{
    build_alias_table, extract_entities, Entity, EntityCategory, PrecomputedAnnotations, RuleBasedExtractor,
};
use ackscope::io;
use ackscope::mentions::{
    build_mention_index, lorenz_gini_counts, summarize_counts, top_acknowledgees, visibility_quotas, MetadataTable,
};
use ackscope::textstats::{
    default_families, keyword_report, lemma_table, negative_feedback_family, parse_families, token_count,
};
use ackscope::{AliasTable, CommunityPartition, MentionIndex};
use anyhow::{bail, Context, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::config::{format_for, read_optional, PipelineConfig};
use crate::workspace::{Workspace, STAGES};
use crate::Usage;

/// Output of one stage: its summary and the line printed to stdout.
pub struct StageOutput {
    pub summary: Value,
    pub line: String,
}

pub fn run(stage: &str, cfg: &PipelineConfig, ws: &Workspace) -> Result<StageOutput> {
    let out = match stage {
        "ingest" => ingest(cfg, ws)?,
        "extract" => extract(cfg, ws)?,
        "textstats" => textstats(cfg, ws)?,
        "mentions" => mentions(cfg, ws)?,
        "network" => network(ws)?,
        "decompose" => decompose(ws)?,
        "triads" => triads(cfg, ws)?,
        "coupling" => coupling(ws)?,
        "compare" => compare(cfg, ws)?,
        "report" => return report(ws),
        other => bail!(Usage(format!("unknown subcommand `{other}`"))),
    };
    ws.write_summary(stage, &out.summary)?;
    Ok(out)
}

fn load_corpus(ws: &Workspace) -> Result<Corpus> {
    let outcome = parse_records(&ws.read("corpus.jsonl")?, RecordFormat::Structured, "corpus.jsonl")?;
    if let Some(bad) = outcome.skipped.first() {
        bail!("corpus.jsonl line {} is malformed: {}", bad.line, bad.reason);
    }
    Ok(outcome.corpus)
}

fn load_aliases(ws: &Workspace) -> Result<AliasTable> {
    io::read_alias_tsv(&ws.read("aliases.tsv")?).context("reading aliases.tsv")
}

fn load_index(ws: &Workspace) -> Result<MentionIndex> {
    io::read_mentions_tsv(&ws.read("mentions.tsv")?).context("reading mentions.tsv")
}

fn load_graph(ws: &Workspace) -> Result<AckGraph> {
    let (nodes, arcs) = (ws.read("nodes.tsv")?, ws.read("arcs.tsv")?);
    io::read_graph_tsv(&nodes, &arcs).context("reading nodes.tsv and arcs.tsv")
}

/// Person surfaces per record with an acknowledgment, in text order.
fn load_persons(ws: &Workspace, corpus: &Corpus) -> Result<BTreeMap<String, Vec<String>>> {
    let stored = io::read_entities_tsv(&ws.read("entities.tsv")?).context("reading entities.tsv")?;
    let mut persons: BTreeMap<String, Vec<String>> =
        corpus.records().iter().filter(|r| r.has_ack()).map(|r| (r.record_id.clone(), Vec::new())).collect();
    for (id, rows) in stored {
        let Some(list) = persons.get_mut(&id) else {
            bail!("entities.tsv names record `{id}`, which has no acknowledgment in the corpus");
        };
        list.extend(rows.into_iter().filter(|r| r.2 == EntityCategory::Person).filter_map(|r| r.3));
    }
    Ok(persons)
}

fn ingest(cfg: &PipelineConfig, ws: &Workspace) -> Result<StageOutput> {
    if cfg.input.is_empty() {
        bail!(Usage("ingest needs at least one input file (--input or `input` in the config)".into()));
    }
    let mut records = Vec::new();
    let mut skipped = String::from("source\tline\treason\n");
    let mut skipped_count = 0;
    let mut sources = Vec::new();
    for path in &cfg.input {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let format = format_for(path, cfg.format);
        let outcome = parse_records(&text, format, path.display().to_string())
            .with_context(|| format!("parsing {}", path.display()))?;
        for s in &outcome.skipped {
            skipped.push_str(&format!("{}\t{}\t{}\n", path.display(), s.line, s.reason.replace(['\t', '\n'], " ")));
        }
        skipped_count += outcome.skipped.len();
        sources.push(json!({
            "path": path.display().to_string(),
            "format": format.to_string(),
            "records": outcome.corpus.len(),
            "skipped": outcome.skipped.len(),
        }));
        records.extend(outcome.corpus.records().iter().cloned());
    }
    let provenance = cfg.input.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(";");
    let corpus = Corpus::new(records, provenance)?;
    ws.write("corpus.jsonl", &corpus.to_jsonl()?)?;
    ws.write("skipped.tsv", &skipped)?;

    let articles = corpus.articles();
    let with_ack = corpus.filter_with_ack().len();
    let summary = json!({
        "records": corpus.len(),
        "articles": articles.len(),
        "articles_with_ack": articles.filter_with_ack().len(),
        "records_with_ack": with_ack,
        "skipped": skipped_count,
        "sources": sources,
    });
    let line = format!(
        "ingest: {} records ({} articles, {} with acknowledgments), {} skipped",
        corpus.len(),
        articles.len(),
        with_ack,
        skipped_count
    );
    Ok(StageOutput { summary, line })
}

type StoredAnnotations = BTreeMap<String, Vec<(usize, usize, EntityCategory, Option<String>)>>;

fn extract(cfg: &PipelineConfig, ws: &Workspace) -> Result<StageOutput> {
    let corpus = load_corpus(ws)?;
    let annotations: Option<StoredAnnotations> = read_optional(&cfg.annotations)?
        .map(|t| io::read_entities_tsv(&t))
        .transpose()
        .context("reading the annotation file")?;

    let mut entities: BTreeMap<String, Vec<Entity>> = BTreeMap::new();
    for r in corpus.records() {
        let Some(text) = r.ack_text.as_deref() else { continue };
        let found = match &annotations {
            Some(stored) => {
                let rows = stored.get(&r.record_id).cloned().unwrap_or_default();
                let spans = PrecomputedAnnotations(rows.iter().map(|&(s, e, c, _)| (s, e, c)).collect());
                let found =
                    extract_entities(text, &spans).with_context(|| format!("annotations of `{}`", r.record_id))?;
                for (s, e, _, surface) in &rows {
                    let got = found.iter().find(|x| x.span == (*s, *e)).map(|x| x.surface.as_str());
                    if surface.is_some() && got != surface.as_deref() {
                        bail!("annotation {s}..{e} of `{}` does not match the acknowledgment text", r.record_id);
                    }
                }
                found
            }
            None => extract_entities(text, &RuleBasedExtractor)
                .with_context(|| format!("extracting entities from `{}`", r.record_id))?,
        };
        entities.insert(r.record_id.clone(), found);
    }

    let surfaces: Vec<String> = entities
        .values()
        .flatten()
        .filter(|e| e.category == EntityCategory::Person)
        .map(|e| e.surface.clone())
        .collect();
    let curated = read_optional(&cfg.curated)?
        .map(|t| io::read_curated_tsv(&t))
        .transpose()
        .context("reading the curated merge file")?
        .unwrap_or_default();
    let build = build_alias_table(&surfaces, cfg.alias_threshold, cfg.merge_mode, &curated)?;

    ws.write("entities.tsv", &io::write_entities_tsv(&entities))?;
    ws.write("alias_candidates.tsv", &io::write_candidates_tsv(&build.candidates))?;
    ws.write("aliases.tsv", &io::write_alias_tsv(&build.table))?;

    let mut by_category: BTreeMap<String, usize> = BTreeMap::new();
    for e in entities.values().flatten() {
        *by_category.entry(e.category.to_string()).or_insert(0) += 1;
    }
    let forms: BTreeSet<&str> = surfaces.iter().map(String::as_str).collect();
    let identities: BTreeSet<_> = forms.iter().map(|f| build.table.identity(f)).collect();
    let merged = build.candidates.iter().filter(|c| c.merged).count();
    let summary = json!({
        "records_with_ack": entities.len(),
        "extractor": if annotations.is_some() { "annotations" } else { "rule-based" },
        "entities": by_category,
        "person_mentions": surfaces.len(),
        "distinct_person_forms": forms.len(),
        "identities": identities.len(),
        "candidate_pairs": build.candidates.len(),
        "merged_pairs": merged,
        "alias_threshold": cfg.alias_threshold,
    });
    let line = format!(
        "extract: {} person mentions, {} forms -> {} identities ({} candidate pairs, {} merged)",
        surfaces.len(),
        forms.len(),
        identities.len(),
        build.candidates.len(),
        merged
    );
    Ok(StageOutput { summary, line })
}

fn textstats(cfg: &PipelineConfig, ws: &Workspace) -> Result<StageOutput> {
    let corpus = load_corpus(ws)?;
    let families = match read_optional(&cfg.families)? {
        Some(text) => parse_families(&text).context("reading the keyword family file")?,
        None => default_families(),
    };
    let table = lemma_table(&corpus, cfg.min_lemma.max(1));
    let negative = negative_feedback_family();
    let report = keyword_report(&corpus, &families, Some(&negative));
    ws.write("lemmas.tsv", &io::write_lemma_tsv(&table))?;
    ws.write("keywords.tsv", &io::write_keywords_tsv(&report))?;

    let top: Vec<Value> = table.rows.iter().take(10).map(|(l, c)| json!([l, c])).collect();
    let summary = json!({
        "tokens": token_count(&corpus),
        "lemma_types": table.rows.len(),
        "lemma_occurrences": table.total(),
        "top_lemmas": top,
        "keywords": report,
    });
    let line = format!(
        "textstats: {} tokens, {} lemma types, {} keyword families over {} acknowledgments",
        token_count(&corpus),
        table.rows.len(),
        families.len(),
        report.articles_with_ack
    );
    Ok(StageOutput { summary, line })
}

fn mentions(cfg: &PipelineConfig, ws: &Workspace) -> Result<StageOutput> {
    let corpus = load_corpus(ws)?;
    let persons = load_persons(ws, &corpus)?;
    let aliases = load_aliases(ws)?;
    let index = build_mention_index(&corpus, &persons, &aliases);
    let metadata = read_optional(&cfg.metadata)?
        .map(|t| MetadataTable::from_tsv(&t))
        .transpose()
        .context("reading the metadata file")?;

    let per_paper = index.acknowledgees_per_paper();
    let counts = index.mention_counts();
    let lorenz = (!counts.is_empty()).then(|| lorenz_gini_counts(&counts)).transpose()?;
    let top = top_acknowledgees(&index, cfg.top_cutoff + 1)?;
    let quotas = visibility_quotas(&index, cfg.high_threshold)?;

    ws.write("mentions.tsv", &io::write_mentions_tsv(&index))?;
    ws.write("top_acknowledgees.tsv", &io::write_top_tsv(&top, metadata.as_ref()))?;
    ws.write("quotas.tsv", &io::write_quotas_tsv(&quotas))?;
    let lorenz_text =
        lorenz.as_ref().map(io::write_lorenz_tsv).unwrap_or_else(|| "population_share\tmention_share\n".into());
    ws.write("lorenz.tsv", &lorenz_text)?;

    let summary = json!({
        "papers": index.paper_count(),
        "papers_without_acknowledgees": index.papers_without_acknowledgees(),
        "acknowledgees": index.acknowledgee_count(),
        "mentions": index.total_mentions(),
        "acknowledgees_per_paper": (!per_paper.is_empty()).then(|| summarize_counts(&per_paper)).transpose()?,
        "mentions_per_acknowledgee": (!counts.is_empty()).then(|| summarize_counts(&counts)).transpose()?,
        "one_mention": counts.iter().filter(|&&c| c == 1).count(),
        "five_or_more": counts.iter().filter(|&&c| c >= 5).count(),
        "gini": lorenz.as_ref().map(|l| l.gini),
        "bottom_75_share": lorenz.as_ref().map(|l| l.share_of_bottom(0.75)),
        "top_cutoff": cfg.top_cutoff,
        "top_acknowledgees": top.len(),
        "visibility": {
            "threshold": quotas.threshold,
            "mean_high": quotas.mean_high,
            "mean_low": quotas.mean_low,
            "mean_share_high": quotas.mean_share_high,
            "mean_share_one_mention": quotas.mean_share_one_mention,
            "papers_without_high": quotas.papers_without_high,
            "mean_size_without_high": quotas.mean_size_without_high,
            "papers_only_one_mention": quotas.papers_only_one_mention,
            "papers_only_high": quotas.papers_only_high,
        },
    });
    let line = format!(
        "mentions: {} acknowledgees, {} mentions over {} papers, gini {}",
        index.acknowledgee_count(),
        index.total_mentions(),
        index.paper_count(),
        lorenz.map_or_else(|| "n/a".to_string(), |l| format!("{:.3}", l.gini))
    );
    Ok(StageOutput { summary, line })
}

fn network(ws: &Workspace) -> Result<StageOutput> {
    let corpus = load_corpus(ws)?;
    let aliases = load_aliases(ws)?;
    let index = load_index(ws)?;
    let g = build_network(&corpus, &index, &aliases)?;
    ws.write("network.net", &io::write_net_arcs(&g))?;
    ws.write("nodes.tsv", &io::write_nodes_tsv(&g))?;
    ws.write("arcs.tsv", &io::write_arcs_tsv(&g))?;

    let roles = g.roles();
    let authors = roles.iter().filter(|r| r.author).count();
    let acknowledgees = roles.iter().filter(|r| r.acknowledgee).count();
    let both = roles.iter().filter(|r| r.author && r.acknowledgee).count();
    let dyads = dyad_census(&g);
    let scc = strong_components(&g);
    let core = symmetric_core(&g);
    let total = g.total_weight();
    let summary = json!({
        "nodes": g.node_count(),
        "arcs": g.arc_count(),
        "authors": authors,
        "acknowledgees": acknowledgees,
        "both_roles": both,
        "total_weight": rational(&total),
        "dyads": dyads,
        "strong_components": scc.cluster_count(),
        "largest_strong_component": scc.sizes().into_iter().max().unwrap_or(0),
        "symmetric_components": core.components.len(),
        "symmetric_nodes": core.node_count(),
        "largest_symmetric_component": core.largest().map_or(0, <[usize]>::len),
    });
    let line = format!(
        "network: {} nodes, {} arcs, {} mutual dyads, largest symmetric component {}",
        g.node_count(),
        g.arc_count(),
        dyads.mutual,
        core.largest().map_or(0, <[usize]>::len)
    );
    Ok(StageOutput { summary, line })
}

fn rational(r: &BigRational) -> Value {
    json!({ "exact": r.to_string(), "value": acknet::to_f64(r) })
}

fn decompose(ws: &Workspace) -> Result<StageOutput> {
    let g = load_graph(ws)?;
    let scc = strong_components(&g);
    let r = symmetric_acyclic_decomposition(&g);
    let flows = cluster_flows(&g, &r.partition)?;
    let core = symmetric_core(&g);

    ws.write("strong_components.clu", &io::write_clu(&scc))?;
    ws.write("decomposition.clu", &io::write_clu(&r.partition))?;
    ws.write("clusters.tsv", &io::write_clusters_tsv(&r))?;
    let names: Vec<String> = (1..=r.cluster_count()).map(|c| c.to_string()).collect();
    ws.write("cluster_flows.tsv", &io::write_flows_tsv(&flows, &names))?;
    let mut core_tsv = String::from("component\tlabel\n");
    for (i, comp) in core.components.iter().enumerate() {
        for &v in comp {
            core_tsv.push_str(&format!("{}\t{}\n", i + 1, g.label(v).as_str().replace('\t', " ")));
        }
    }
    ws.write("symmetric_core.tsv", &core_tsv)?;

    let largest = r.largest_symmetric_cluster();
    let summary = json!({
        "nodes": g.node_count(),
        "strong_components": scc.cluster_count(),
        "seed_clusters": r.seed_clusters,
        "directly_symmetric_nodes": r.directly_symmetric_nodes,
        "clusters": r.cluster_count(),
        "errors": r.errors,
        "max_rank": r.max_rank(),
        "layer_sizes": r.layer_sizes(),
        "largest_symmetric_cluster": largest.map(|c| json!({ "cluster": c + 1, "size": r.clusters[c].size })),
        "internal_weight": rational(&flows.internal),
        "external_weight": rational(&flows.external_total()),
        "symmetric_core_nodes": core.node_count(),
    });
    let line = format!(
        "decompose: {} clusters in {} ranks, {} errors, {} strong components",
        r.cluster_count(),
        r.max_rank() + 1,
        r.errors,
        scc.cluster_count()
    );
    Ok(StageOutput { summary, line })
}

fn triads(cfg: &PipelineConfig, ws: &Workspace) -> Result<StageOutput> {
    let g = load_graph(ws)?;
    let census = triad_census(&g, cfg.expected_model)?;
    ws.write("triads.tsv", &io::write_census_tsv(&census))?;
    let sum = |f: fn(acknet::TriadType) -> bool| -> f64 {
        acknet::TriadType::ALL.into_iter().filter(|t| f(*t)).map(|t| census.expected_of(t)).sum()
    };
    let rows: BTreeMap<String, Value> = census
        .rows()
        .into_iter()
        .map(|r| (r.triad.to_string(), json!({ "observed": r.observed, "expected": r.expected })))
        .collect();
    let summary = json!({
        "nodes": census.nodes,
        "expected_model": census.expected_model.to_string(),
        "dyads": census.dyads,
        "triads": census.total(),
        "transitive": { "observed": census.transitive(), "expected": sum(acknet::TriadType::is_transitive) },
        "intransitive": { "observed": census.intransitive(), "expected": sum(acknet::TriadType::is_intransitive) },
        "types": rows,
    });
    let line = format!(
        "triads: {} triads over {} nodes, transitive {} (expected {:.2}), intransitive {} (expected {:.2})",
        census.total(),
        census.nodes,
        census.transitive(),
        sum(acknet::TriadType::is_transitive),
        census.intransitive(),
        sum(acknet::TriadType::is_intransitive)
    );
    Ok(StageOutput { summary, line })
}

fn coupling(ws: &Workspace) -> Result<StageOutput> {
    let corpus = load_corpus(ws)?;
    let index = load_index(ws)?;
    let mut layers = serde_json::Map::new();
    let mut papers = 0;
    let mut parts = Vec::new();
    for layer in [Layer::Intellectual, Layer::Social] {
        let (m, net) = build_coupling(&corpus, &index, layer)?;
        ws.write(&format!("similarity_{layer}.tsv"), &io::write_matrix_tsv(&m))?;
        ws.write(&format!("coupling_{layer}.net"), &io::write_net_edges(&net))?;
        papers = m.len();
        let stats = net.edge_stats();
        parts.push(format!(
            "{layer} {} edges (mean {})",
            net.edges().len(),
            stats.map_or_else(|| "n/a".into(), |s| format!("{:.4}", s.mean))
        ));
        layers.insert(layer.to_string(), json!({ "edges": net.edges().len(), "weights": stats }));
    }
    let summary = json!({ "papers": papers, "layers": layers });
    let line = format!("coupling: {papers} papers; {}", parts.join(", "));
    Ok(StageOutput { summary, line })
}

fn communities(net: &CouplingNetwork, cfg: &PipelineConfig) -> Result<CommunityPartition> {
    let net = if cfg.binarize { net.binarized() } else { net.clone() };
    Ok(louvain(&net, cfg.resolution)?)
}

fn compare(cfg: &PipelineConfig, ws: &Workspace) -> Result<StageOutput> {
    let si = io::read_matrix_tsv(&ws.read("similarity_intellectual.tsv")?, Layer::Intellectual)
        .context("reading similarity_intellectual.tsv")?;
    let ss = io::read_matrix_tsv(&ws.read("similarity_social.tsv")?, Layer::Social)
        .context("reading similarity_social.tsv")?;
    let index = load_index(ws)?;
    if si.is_empty() {
        bail!("no paper has both references and acknowledgees; nothing to compare");
    }
    let dcor = distance_correlation(&ss, &si)?;
    let social = communities(&CouplingNetwork::from_matrix(&ss), cfg)?;
    let intellectual = communities(&CouplingNetwork::from_matrix(&si), cfg)?;

    let mut table = String::from("paper\tsocial\tintellectual\n");
    for (i, p) in social.papers.iter().enumerate() {
        table.push_str(&format!(
            "{}\t{}\t{}\n",
            p,
            social.partition.cluster_of(i) + 1,
            intellectual.partition.cluster_of(i) + 1
        ));
    }
    ws.write("communities.tsv", &table)?;
    ws.write("communities_social.clu", &io::write_clu(&social.partition))?;
    ws.write("communities_intellectual.clu", &io::write_clu(&intellectual.partition))?;

    let cross = contingency(&social, &intellectual, cfg.top_social, cfg.top_intellectual);
    let cross_summary = match &cross {
        Ok(c) => {
            ws.write("contingency.tsv", &io::write_contingency_tsv(c))?;
            ws.write("residuals.tsv", &io::write_residuals_tsv(c))?;
            json!({ "n": c.n, "rows": c.row_labels.len(), "columns": c.col_labels.len(), "chi2": c.chi2, "dof": c.dof, "cramers_v": c.cramers_v })
        }
        Err(e) => {
            // a degenerate table is a finding on small corpora, not a failure
            for stale in ["contingency.tsv", "residuals.tsv"] {
                let _ = std::fs::remove_file(ws.path(stale));
            }
            json!({ "error": e.to_string() })
        }
    };

    let top = mention_decomposition(&index, &intellectual, cfg.top_cutoff + 1, Some(cfg.top_intellectual));
    ws.write("mention_decomposition.tsv", &io::write_decomposition_tsv(&top))?;
    let all = mention_decomposition(&index, &intellectual, 1, Some(cfg.top_intellectual));
    let mentions: Vec<f64> = all.rows.iter().map(|r| (r.total + r.other) as f64).collect();
    let distinct: Vec<f64> = all.rows.iter().map(|r| r.distinct as f64).collect();
    let r2 = match pearson_r2(&mentions, &distinct) {
        Ok(v) => json!(v),
        Err(e) => json!({ "error": e.to_string() }),
    };

    let layer_summary = |c: &CommunityPartition, k: usize| {
        json!({
            "communities": c.community_count(),
            "modularity": c.modularity,
            "sizes": c.sizes(),
            "top": k.min(c.community_count()),
            "top_coverage": c.coverage(k),
        })
    };
    let summary = json!({
        "papers": si.len(),
        "r_d": dcor.r_d,
        "sqrt_r_d": dcor.sqrt_r_d,
        "resolution": cfg.resolution,
        "binarized": cfg.binarize,
        "social": layer_summary(&social, cfg.top_social),
        "intellectual": layer_summary(&intellectual, cfg.top_intellectual),
        "contingency": cross_summary,
        "top_acknowledgees_decomposed": top.rows.len(),
        "mentions_vs_distinct_communities_r2": r2,
    });
    let chi = cross.as_ref().map_or_else(|_| "n/a".to_string(), |c| format!("{:.3}", c.chi2));
    let line = format!(
        "compare: sqrt(R_d) {:.4}, {} social / {} intellectual communities, chi2 {}",
        dcor.sqrt_r_d,
        social.community_count(),
        intellectual.community_count(),
        chi
    );
    Ok(StageOutput { summary, line })
}

fn report(ws: &Workspace) -> Result<StageOutput> {
    let mut stages = serde_json::Map::new();
    for stage in STAGES {
        stages.insert(stage.to_string(), ws.read_summary(stage)?);
    }
    let summary = json!({ "stages": stages });
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    ws.write("report.json", &text)?;
    let line = format!("report: {} stage summaries combined into {}", STAGES.len(), ws.path("report.json").display());
    Ok(StageOutput { summary, line })
}
