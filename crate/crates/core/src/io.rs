//! Plain-text artifact formats: NET/CLU graph files and tab-delimited tables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_rational::BigRational;

use crate::acknet::{to_f64, AckGraph, Arc, FlowMatrix, NodeRole, SymAcyclicResult, TriadCensus};
use crate::assoc::{ContingencyResult, MentionDecomposition};
use crate::coupling::{CouplingNetwork, Layer, SimilarityMatrix};
use crate::extract::{AliasTable, CandidatePair, CuratedDecision, Entity, EntityCategory};
use crate::mentions::{LorenzGini, MentionIndex, MetadataTable, RankedAcknowledgee, ScholarId, VisibilityQuotas};
use crate::partition::Partition;
use crate::textstats::{KeywordReport, LemmaTable};
use crate::{Error, Result};

/// Tabs and line breaks would corrupt a delimited row.
fn cell(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// NET file with an `*Arcs` section, 1-based ids, weights as decimals.
pub fn write_net_arcs(g: &AckGraph) -> String {
    let mut out = String::new();
    writeln!(out, "*Vertices {}", g.node_count()).unwrap();
    for (i, l) in g.labels().iter().enumerate() {
        writeln!(out, "{} {}", i + 1, quote(l.as_str())).unwrap();
    }
    out.push_str("*Arcs\n");
    for a in g.arcs() {
        writeln!(out, "{} {} {}", a.source + 1, a.target + 1, to_f64(&a.weight)).unwrap();
    }
    out
}

/// NET file with an `*Edges` section.
pub fn write_net_edges(net: &CouplingNetwork) -> String {
    let mut out = String::new();
    writeln!(out, "*Vertices {}", net.node_count()).unwrap();
    for (i, l) in net.papers().iter().enumerate() {
        writeln!(out, "{} {}", i + 1, quote(l)).unwrap();
    }
    out.push_str("*Edges\n");
    for &(i, j, w) in net.edges() {
        writeln!(out, "{} {} {}", i + 1, j + 1, w).unwrap();
    }
    out
}

/// Contents of a NET file, 0-based.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NetGraph {
    pub labels: Vec<String>,
    pub arcs: Vec<(usize, usize, f64)>,
    pub edges: Vec<(usize, usize, f64)>,
}

fn parse_label(rest: &str, line: usize) -> Result<String> {
    let rest = rest.trim();
    let Some(body) = rest.strip_prefix('"') else {
        return Ok(rest.split_whitespace().next().unwrap_or_default().to_string());
    };
    let mut out = String::new();
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                out.push(chars.next().ok_or_else(|| Error::Parse { line, message: "dangling escape in label".into() })?)
            }
            '"' => return Ok(out),
            c => out.push(c),
        }
    }
    Err(Error::Parse { line, message: "unterminated label".into() })
}

pub fn read_net(source: &str) -> Result<NetGraph> {
    enum Section {
        None,
        Vertices,
        Arcs,
        Edges,
    }
    let mut g = NetGraph::default();
    let mut section = Section::None;
    let mut declared = 0;
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let perr = |message: String| Error::Parse { line: line_no, message };
        if line.starts_with('*') {
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap_or_default().to_ascii_lowercase();
            section = match head.as_str() {
                "*vertices" => {
                    declared =
                        parts.next().and_then(|x| x.parse().ok()).ok_or_else(|| perr("missing vertex count".into()))?;
                    g.labels = (1..=declared).map(|i| i.to_string()).collect();
                    Section::Vertices
                }
                "*arcs" => Section::Arcs,
                "*edges" => Section::Edges,
                other => return Err(perr(format!("unsupported section `{other}`"))),
            };
            continue;
        }
        let (first, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let id: usize = first.parse().map_err(|_| perr(format!("bad vertex id `{first}`")))?;
        if id == 0 || id > declared {
            return Err(perr(format!("vertex id {id} outside 1..={declared}")));
        }
        match section {
            Section::Vertices => g.labels[id - 1] = parse_label(rest, line_no)?,
            Section::Arcs | Section::Edges => {
                let mut parts = rest.split_whitespace();
                let t: usize = parts
                    .next()
                    .and_then(|x| x.parse().ok())
                    .filter(|&t| t >= 1 && t <= declared)
                    .ok_or_else(|| perr("bad target id".into()))?;
                let w: f64 = match parts.next() {
                    Some(x) => x.parse().map_err(|_| perr(format!("bad weight `{x}`")))?,
                    None => 1.0,
                };
                let list = if matches!(section, Section::Arcs) { &mut g.arcs } else { &mut g.edges };
                list.push((id - 1, t - 1, w));
            }
            Section::None => return Err(perr("data before *Vertices".into())),
        }
    }
    Ok(g)
}

/// CLU file: vertex count, then the 1-based cluster of each node.
pub fn write_clu(p: &Partition) -> String {
    let mut out = format!("*Vertices {}\n", p.len());
    for &c in p.labels() {
        writeln!(out, "{}", c + 1).unwrap();
    }
    out
}

pub fn read_clu(source: &str) -> Result<Partition> {
    let mut lines = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (line, head) = lines.next().ok_or(Error::EmptyInput("CLU file"))?;
    let n: usize = head
        .strip_prefix("*Vertices")
        .or_else(|| head.strip_prefix("*vertices"))
        .and_then(|x| x.trim().parse().ok())
        .ok_or_else(|| Error::Parse { line, message: "expected `*Vertices n`".into() })?;
    let labels = lines
        .map(|(line, l)| {
            l.parse::<usize>()
                .ok()
                .filter(|&c| c >= 1)
                .map(|c| c - 1)
                .ok_or_else(|| Error::Parse { line, message: format!("bad cluster `{l}`") })
        })
        .collect::<Result<Vec<_>>>()?;
    if labels.len() != n {
        return Err(Error::LengthMismatch(labels.len(), n));
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    Partition::from_dense(labels, k)
}

/// Dense matrix with a header row of paper ids.
pub fn write_matrix_tsv(m: &SimilarityMatrix) -> String {
    let mut out = String::from("paper");
    for p in m.papers() {
        write!(out, "\t{}", cell(p)).unwrap();
    }
    out.push('\n');
    for (i, p) in m.papers().iter().enumerate() {
        out.push_str(&cell(p));
        for j in 0..m.len() {
            write!(out, "\t{}", m.get(i, j)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_census_tsv(c: &TriadCensus) -> String {
    let mut out = String::from("type\tobserved\texpected\trelative_deviation\tmodel\n");
    for r in c.rows() {
        let dev = r.relative_deviation.map(|d| format!("{d:.2}")).unwrap_or_default();
        writeln!(out, "{}\t{}\t{:.2}\t{}\t{}", r.triad, r.observed, r.expected, dev, r.model).unwrap();
    }
    out
}

/// Observed table with marginals, laid out like a published cross-tab.
pub fn write_contingency_tsv(c: &ContingencyResult) -> String {
    let mut out = String::new();
    for l in &c.col_labels {
        write!(out, "\t{}", cell(l)).unwrap();
    }
    out.push_str("\tTotal\n");
    let mut col_tot = vec![0u64; c.col_labels.len()];
    for (label, row) in c.row_labels.iter().zip(&c.observed) {
        out.push_str(&cell(label));
        for (j, v) in row.iter().enumerate() {
            write!(out, "\t{v}").unwrap();
            col_tot[j] += v;
        }
        writeln!(out, "\t{}", row.iter().sum::<u64>()).unwrap();
    }
    out.push_str("Total");
    for v in &col_tot {
        write!(out, "\t{v}").unwrap();
    }
    writeln!(out, "\t{}", c.n).unwrap();
    out
}

pub fn write_residuals_tsv(c: &ContingencyResult) -> String {
    let mut out = String::new();
    for l in &c.col_labels {
        write!(out, "\t{}", cell(l)).unwrap();
    }
    out.push('\n');
    for (label, row) in c.row_labels.iter().zip(&c.residuals) {
        out.push_str(&cell(label));
        for v in row {
            write!(out, "\t{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_lorenz_tsv(l: &LorenzGini) -> String {
    let mut out = String::from("population_share\tmention_share\n");
    for (x, y) in &l.curve {
        writeln!(out, "{x}\t{y}").unwrap();
    }
    out
}

/// Inter-cluster flows as an edge list; `labels` names the clusters.
pub fn write_flows_tsv(f: &FlowMatrix, labels: &[String]) -> String {
    let mut out = String::from("from\tto\tweight\n");
    for ((a, b), w) in &f.flows {
        let name = |i: usize| labels.get(i).cloned().unwrap_or_else(|| (i + 1).to_string());
        writeln!(out, "{}\t{}\t{}", name(*a), name(*b), to_f64(w)).unwrap();
    }
    out
}

pub fn write_decomposition_tsv(d: &MentionDecomposition) -> String {
    let mut out = String::from("acknowledgee");
    for c in 1..=d.columns {
        write!(out, "\t{c}").unwrap();
    }
    out.push_str("\tother\ttotal\tdistinct\n");
    for r in &d.rows {
        out.push_str(&cell(r.id.as_str()));
        for v in &r.counts {
            write!(out, "\t{v}").unwrap();
        }
        writeln!(out, "\t{}\t{}\t{}", r.other, r.total, r.distinct).unwrap();
    }
    out
}

/// `surface<TAB>canonical` rows.
pub fn write_alias_tsv(t: &AliasTable) -> String {
    let mut out = String::from("surface\tcanonical\n");
    for (s, c) in t.pairs() {
        writeln!(out, "{}\t{}", cell(s), cell(c)).unwrap();
    }
    out
}

fn data_rows(source: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    source
        .lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.split('\t').collect()))
}

pub fn read_alias_tsv(source: &str) -> Result<AliasTable> {
    let rows = data_rows(source)
        .map(|(line, f)| match f.as_slice() {
            [s, c, ..] => Ok((s.to_string(), c.to_string())),
            _ => Err(Error::Parse { line, message: "expected surface and canonical".into() }),
        })
        .collect::<Result<Vec<_>>>()?;
    AliasTable::from_pairs(rows)
}

/// Audit file of candidate pairs. The decision column is `accept` for merged
/// pairs and `pending` otherwise, so an edited copy can be passed back as
/// the curated file.
pub fn write_candidates_tsv(pairs: &[CandidatePair]) -> String {
    let mut out = String::from("form_a\tform_b\tratio\tdecision\n");
    for p in pairs {
        let decision = if p.merged { "accept" } else { "pending" };
        writeln!(out, "{}\t{}\t{}\t{decision}", cell(&p.form_a), cell(&p.form_b), p.ratio).unwrap();
    }
    out
}

/// Curated merge file: header line, then rows with `form_a`, `form_b` and
/// `decision` columns. Columns are found by header name, falling back to the
/// first three. Decisions are accept/reject, yes/no, true/false or 1/0;
/// `pending` or an empty decision leaves the pair undecided.
pub fn read_curated_tsv(source: &str) -> Result<Vec<CuratedDecision>> {
    let header: Vec<String> =
        source.lines().next().unwrap_or("").split('\t').map(|h| h.trim().to_ascii_lowercase()).collect();
    let col = |name: &str, default: usize| header.iter().position(|h| h == name).unwrap_or(default);
    let (ia, ib, id) = (col("form_a", 0), col("form_b", 1), col("decision", 2));
    let mut out = Vec::new();
    for (line, f) in data_rows(source) {
        let perr = |message: String| Error::Parse { line, message };
        let (Some(a), Some(b), Some(d)) = (f.get(ia), f.get(ib), f.get(id)) else {
            return Err(perr("expected form_a, form_b, decision".into()));
        };
        let accept = match d.trim().to_ascii_lowercase().as_str() {
            "accept" | "yes" | "y" | "true" | "1" | "merge" => true,
            "reject" | "no" | "n" | "false" | "0" | "keep" => false,
            "pending" | "" => continue,
            other => return Err(perr(format!("unknown decision `{other}`"))),
        };
        out.push(CuratedDecision { form_a: a.trim().to_string(), form_b: b.trim().to_string(), accept });
    }
    Ok(out)
}

/// `record_id<TAB>acknowledgee` rows; a paper without acknowledgees is a row
/// with an empty second field.
pub fn write_mentions_tsv(index: &MentionIndex) -> String {
    let mut out = String::from("record_id\tacknowledgee\n");
    for (paper, set) in index.papers() {
        if set.is_empty() {
            writeln!(out, "{}\t", cell(paper)).unwrap();
        }
        for id in set {
            writeln!(out, "{}\t{}", cell(paper), cell(id.as_str())).unwrap();
        }
    }
    out
}

pub fn read_mentions_tsv(source: &str) -> Result<MentionIndex> {
    let rows = data_rows(source)
        .map(|(line, f)| {
            let paper = f
                .first()
                .map(|p| p.trim())
                .filter(|p| !p.is_empty())
                .ok_or(Error::Parse { line, message: "missing record id".into() })?;
            let set: BTreeSet<ScholarId> =
                f.get(1).map(|s| s.trim()).filter(|s| !s.is_empty()).map(ScholarId::from).into_iter().collect();
            Ok((paper.to_string(), set))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MentionIndex::from_sets(rows))
}

fn parse_field<T: std::str::FromStr>(field: Option<&&str>, line: usize, what: &str) -> Result<T> {
    field
        .and_then(|f| f.trim().parse().ok())
        .ok_or_else(|| Error::Parse { line, message: format!("missing or invalid {what}") })
}

/// Node table: label, roles and weighted degrees.
pub fn write_nodes_tsv(g: &AckGraph) -> String {
    let mut out = String::from("label\tauthor\tacknowledgee\tin_weight\tout_weight\n");
    for (i, (l, r)) in g.labels().iter().zip(g.roles()).enumerate() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            cell(l.as_str()),
            r.author,
            r.acknowledgee,
            g.in_weight(i),
            g.out_weight(i)
        )
        .unwrap();
    }
    out
}

/// Arc table keyed by node label, weights as exact fractions.
pub fn write_arcs_tsv(g: &AckGraph) -> String {
    let mut out = String::from("source\ttarget\tweight\tpapers\n");
    let labels = g.labels();
    for a in g.arcs() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            cell(labels[a.source].as_str()),
            cell(labels[a.target].as_str()),
            a.weight,
            a.count
        )
        .unwrap();
    }
    out
}

/// Inverse of [`write_nodes_tsv`] plus [`write_arcs_tsv`]; weights stay exact.
pub fn read_graph_tsv(nodes: &str, arcs: &str) -> Result<AckGraph> {
    let mut labels = Vec::new();
    let mut roles = Vec::new();
    for (line, f) in data_rows(nodes) {
        let label = f.first().ok_or(Error::Parse { line, message: "missing label".into() })?;
        labels.push(ScholarId::new(*label));
        roles.push(NodeRole {
            author: parse_field(f.get(1), line, "author flag")?,
            acknowledgee: parse_field(f.get(2), line, "acknowledgee flag")?,
        });
    }
    let pos: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let lookup = |name: Option<&&str>, line: usize| -> Result<usize> {
        name.and_then(|n| pos.get(n).copied())
            .ok_or_else(|| Error::Parse { line, message: "arc endpoint is not a listed node".into() })
    };
    let parsed = data_rows(arcs)
        .map(|(line, f)| {
            Ok(Arc {
                source: lookup(f.first(), line)?,
                target: lookup(f.get(1), line)?,
                weight: parse_field::<BigRational>(f.get(2), line, "weight")?,
                count: parse_field(f.get(3), line, "paper count")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AckGraph::from_parts(labels, roles, parsed)
}

/// Inverse of [`write_matrix_tsv`].
pub fn read_matrix_tsv(source: &str, layer: Layer) -> Result<SimilarityMatrix> {
    let mut lines = source.lines().filter(|l| !l.trim().is_empty());
    let Some(header) = lines.next() else {
        return SimilarityMatrix::from_values(Vec::new(), layer, Vec::new());
    };
    let papers: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
    let mut values = Vec::with_capacity(papers.len() * papers.len());
    for (i, row) in lines.enumerate() {
        let mut f = row.split('\t');
        if f.next() != papers.get(i).map(String::as_str) {
            return Err(Error::Parse { line: i + 2, message: "row label does not match the header".into() });
        }
        for v in f {
            values.push(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Parse { line: i + 2, message: format!("invalid similarity `{v}`") })?,
            );
        }
    }
    SimilarityMatrix::from_values(papers, layer, values)
}

/// Entities per record: `record_id, start, end, category, surface`.
pub fn write_entities_tsv(entities: &BTreeMap<String, Vec<Entity>>) -> String {
    let mut out = String::from("record_id\tstart\tend\tcategory\tsurface\n");
    for (id, list) in entities {
        for e in list {
            writeln!(out, "{}\t{}\t{}\t{}\t{}", cell(id), e.span.0, e.span.1, e.category, cell(&e.surface)).unwrap();
        }
    }
    out
}

/// Start, end, category and surface (when present) of one entity row.
pub type EntityRow = (usize, usize, EntityCategory, Option<String>);

/// Reads entity rows. The surface column may be missing, as in externally
/// produced annotation files; spans are then resolved against the text.
pub fn read_entities_tsv(source: &str) -> Result<BTreeMap<String, Vec<EntityRow>>> {
    let mut out: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for (line, f) in data_rows(source) {
        let id = f
            .first()
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .ok_or(Error::Parse { line, message: "missing record id".into() })?;
        let start = parse_field(f.get(1), line, "start offset")?;
        let end = parse_field(f.get(2), line, "end offset")?;
        let category = parse_field(f.get(3), line, "category")?;
        let surface = f.get(4).map(|s| s.to_string()).filter(|s| !s.is_empty());
        out.entry(id.to_string()).or_default().push((start, end, category, surface));
    }
    Ok(out)
}

/// Ranked acknowledgees, with metadata columns appended when given.
pub fn write_top_tsv(rows: &[RankedAcknowledgee], metadata: Option<&MetadataTable>) -> String {
    let mut out = String::from("rank\tacknowledgee\tmentions");
    for c in metadata.map(|m| m.columns.as_slice()).unwrap_or_default() {
        write!(out, "\t{}", cell(c)).unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(out, "{}\t{}\t{}", r.rank, cell(r.id.as_str()), r.mentions).unwrap();
        for v in metadata.map(|m| m.lookup(&r.id)).unwrap_or_default() {
            write!(out, "\t{}", cell(&v)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_quotas_tsv(q: &VisibilityQuotas) -> String {
    let mut out = String::from("record_id\tacknowledgees\thigh\tlow\tshare_high\tshare_one_mention\n");
    for p in &q.per_paper {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            cell(&p.record_id),
            p.acknowledgees,
            p.high,
            p.low,
            p.share_high,
            p.share_one_mention
        )
        .unwrap();
    }
    out
}

pub fn write_lemma_tsv(t: &LemmaTable) -> String {
    let mut out = String::from("lemma\toccurrences\n");
    for (l, c) in &t.rows {
        writeln!(out, "{}\t{c}", cell(l)).unwrap();
    }
    out
}

/// One row per family; the all-families and negative-feedback rows follow.
pub fn write_keywords_tsv(r: &KeywordReport) -> String {
    let mut out = String::from("family\tarticles\tpercent\n");
    for f in r.families.iter().chain(&r.negative) {
        writeln!(out, "{}\t{}\t{:.2}", cell(&f.family), f.articles, f.percent).unwrap();
    }
    let all = if r.articles_with_ack == 0 { 0.0 } else { 100.0 * r.all_families as f64 / r.articles_with_ack as f64 };
    writeln!(out, "all families\t{}\t{all:.2}", r.all_families).unwrap();
    out
}

/// Cluster table of a symmetric-acyclic decomposition, 1-based ids.
pub fn write_clusters_tsv(r: &SymAcyclicResult) -> String {
    let mut out = String::from("cluster\tsize\trank\tseed_clusters\tdirectly_symmetric\n");
    for (i, c) in r.clusters.iter().enumerate() {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", i + 1, c.size, c.rank, c.seed_clusters, c.directly_symmetric).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acknet::ratio;

    #[test]
    fn two_node_net_file() {
        let g = AckGraph::from_arcs(vec!["Jane Doe".into(), "Lawrence Katz".into()], [(0, 1, ratio(1, 4))]).unwrap();
        let text = write_net_arcs(&g);
        assert_eq!(text, "*Vertices 2\n1 \"Jane Doe\"\n2 \"Lawrence Katz\"\n*Arcs\n1 2 0.25\n");
        assert_eq!(text.lines().count(), 5);
        let back = read_net(&text).unwrap();
        assert_eq!(back.labels, vec!["Jane Doe", "Lawrence Katz"]);
        assert_eq!(back.arcs, vec![(0, 1, 0.25)]);
    }

    #[test]
    fn net_label_escapes() {
        let g = AckGraph::from_arcs(vec!["A \"B\" C".into(), "x\\y".into()], [(1, 0, ratio(1, 3))]).unwrap();
        let back = read_net(&write_net_arcs(&g)).unwrap();
        assert_eq!(back.labels, vec!["A \"B\" C", "x\\y"]);
        assert_eq!(back.arcs[0].2, 1.0 / 3.0);
        assert!(read_net("*Vertices 1\n1 \"open\n").is_err());
        assert!(read_net("*Vertices 1\n*Arcs\n1 2\n").is_err());
    }

    #[test]
    fn graph_tsv_keeps_exact_weights() {
        let g = AckGraph::from_arcs(
            vec!["A".into(), "B".into(), "C".into()],
            [(0, 1, ratio(1, 3)), (0, 1, ratio(1, 2)), (2, 1, ratio(1, 1)), (1, 0, ratio(1, 7))],
        )
        .unwrap();
        let back = read_graph_tsv(&write_nodes_tsv(&g), &write_arcs_tsv(&g)).unwrap();
        assert_eq!(back.arcs(), g.arcs());
        assert_eq!(back.roles(), g.roles());
        assert_eq!(back.arc(0, 1).unwrap().weight, ratio(5, 6));
        assert!(read_graph_tsv("label\tauthor\tacknowledgee\nA\ttrue\tfalse\n", "s\tt\tw\tp\nA\tZ\t1\t1\n").is_err());
    }

    #[test]
    fn matrix_tsv_round_trip() {
        let m = SimilarityMatrix::from_values(
            vec!["p1".into(), "p2".into()],
            Layer::Social,
            vec![1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0],
        )
        .unwrap();
        assert_eq!(read_matrix_tsv(&write_matrix_tsv(&m), Layer::Social).unwrap(), m);
    }

    #[test]
    fn clu_round_trip() {
        let p = Partition::from_labels(&[3, 3, 1, 2]);
        let text = write_clu(&p);
        assert_eq!(text, "*Vertices 4\n1\n1\n2\n3\n");
        assert_eq!(read_clu(&text).unwrap(), p);
        assert!(read_clu("*Vertices 3\n1\n").is_err());
    }

    #[test]
    fn curated_and_mentions_files() {
        let d =
            read_curated_tsv("form_a\tform_b\tdecision\nLarry Katz\tLawrence Katz\taccept\nA B\tA C\tno\n").unwrap();
        assert_eq!(d.len(), 2);
        assert!(d[0].accept && !d[1].accept);
        assert!(read_curated_tsv("h\nx\ty\tmaybe\n").is_err());

        // An audit file reads back as curated input.
        let pairs = [
            CandidatePair { form_a: "A".into(), form_b: "B".into(), ratio: 0.9, merged: true },
            CandidatePair { form_a: "C".into(), form_b: "D".into(), ratio: 0.85, merged: false },
        ];
        let d = read_curated_tsv(&write_candidates_tsv(&pairs)).unwrap();
        assert_eq!(d, vec![CuratedDecision { form_a: "A".into(), form_b: "B".into(), accept: true }]);

        let idx = MentionIndex::from_sets([
            ("p1".to_string(), BTreeSet::from([ScholarId::from("K"), ScholarId::from("L")])),
            ("p2".to_string(), BTreeSet::new()),
        ]);
        let back = read_mentions_tsv(&write_mentions_tsv(&idx)).unwrap();
        assert_eq!(back, idx);
    }
}
