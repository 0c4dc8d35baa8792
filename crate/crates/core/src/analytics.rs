//! Cross-paper comparison tables and corpus statistics.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{TaskLabel, Triple, UnitKind, KEY_EVIDENCE};
use crate::store::ContributionGraph;

pub const DEFAULT_MIN_COMMON: usize = 2;

/// Papers (rows) against the properties they share under one unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub unit: UnitKind,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// `cells[row][column]`: the objects that paper records for the property.
    pub cells: Vec<Vec<Vec<String>>>,
}

impl ComparisonTable {
    pub fn cell(&self, paper_id: &str, column: &str) -> Option<&[String]> {
        let r = self.rows.iter().position(|p| p == paper_id)?;
        let c = self.columns.iter().position(|k| k == column)?;
        Some(&self.cells[r][c])
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "| paper |");
        for c in &self.columns {
            let _ = write!(out, " {} |", md_escape(c));
        }
        out.push('\n');
        out.push_str("|---|");
        out.push_str(&"---|".repeat(self.columns.len()));
        out.push('\n');
        for (row, cells) in self.rows.iter().zip(&self.cells) {
            let _ = write!(out, "| {} |", md_escape(row));
            for cell in cells {
                let _ = write!(out, " {} |", md_escape(&cell.join("; ")));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["paper_id".to_string()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for (row, cells) in self.rows.iter().zip(&self.cells) {
            let mut record = vec![row.clone()];
            record.extend(cells.iter().map(|c| c.join("; ")));
            w.write_record(&record)?;
        }
        w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))
    }
}

fn md_escape(text: &str) -> String {
    text.replace('|', "\\|").replace('\n', " ")
}

/// The unit-level properties of one paper. A unit-level `has` edge to an
/// entity that has its own edges contributes that entity as the property
/// (valued by its objects); every other unit-level edge contributes its
/// predicate.
fn unit_properties(triples: &[&Triple], unit: UnitKind) -> IndexMap<String, Vec<String>> {
    let in_unit: Vec<&Triple> = triples
        .iter()
        .copied()
        .filter(|t| t.unit.canonical == unit)
        .collect();
    let mut children: HashMap<&[u32], Vec<&Triple>> = HashMap::new();
    for t in &in_unit {
        if t.path.len() >= 3 {
            children.entry(&t.path[..t.path.len() - 2]).or_default().push(t);
        }
    }
    let mut props: IndexMap<String, Vec<String>> = IndexMap::new();
    for t in in_unit.iter().filter(|t| t.path.len() == 3) {
        match children.get(t.path.as_slice()) {
            Some(below) if t.predicate == "has" => {
                props
                    .entry(t.object.clone())
                    .or_default()
                    .extend(below.iter().map(|c| c.object.clone()));
            }
            _ => props.entry(t.predicate.clone()).or_default().push(t.object.clone()),
        }
    }
    props
}

pub fn compare(
    graph: &ContributionGraph,
    unit: UnitKind,
    paper_ids: &[String],
    min_common: usize,
) -> Result<ComparisonTable> {
    let mut per_paper = Vec::with_capacity(paper_ids.len());
    for id in paper_ids {
        if graph.paper(id).is_none() {
            return Err(Error::UnknownPaper(id.clone()));
        }
        per_paper.push(unit_properties(&graph.paper_triples(id), unit));
    }
    let mut support: HashMap<&str, usize> = HashMap::new();
    for props in &per_paper {
        for (name, values) in props {
            if !values.is_empty() {
                *support.entry(name.as_str()).or_default() += 1;
            }
        }
    }
    let mut columns: Vec<(&str, usize)> = support
        .into_iter()
        .filter(|(_, n)| *n >= min_common.max(1))
        .collect();
    columns.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let columns: Vec<String> = columns.into_iter().map(|(c, _)| c.to_string()).collect();
    let cells = per_paper
        .iter()
        .map(|props| {
            columns
                .iter()
                .map(|c| props.get(c).cloned().unwrap_or_default())
                .collect()
        })
        .collect();
    Ok(ComparisonTable {
        unit,
        rows: paper_ids.to_vec(),
        columns,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsOptions {
    /// Keep only predicates seen more than this many times (0 keeps all).
    pub min_count: usize,
    /// Leave out the `Contribution -> unit` attachments.
    pub exclude_root: bool,
    /// Leave out `(node, from sentence, sentence)` statements.
    pub exclude_evidence: bool,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            min_count: 0,
            exclude_root: true,
            exclude_evidence: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub unique_subjects: usize,
    pub unique_predicates: usize,
    pub unique_objects: usize,
    pub unique_triples: usize,
    pub total_triples: usize,
}

#[derive(Default)]
struct Tally<'a> {
    subjects: HashSet<&'a str>,
    predicates: HashSet<&'a str>,
    objects: HashSet<&'a str>,
    triples: HashSet<(&'a str, &'a str, &'a str)>,
    total: usize,
}

impl<'a> Tally<'a> {
    fn add(&mut self, s: &'a str, p: &'a str, o: &'a str) {
        self.subjects.insert(s);
        self.predicates.insert(p);
        self.objects.insert(o);
        self.triples.insert((s, p, o));
        self.total += 1;
    }

    fn counts(&self) -> Counts {
        Counts {
            unique_subjects: self.subjects.len(),
            unique_predicates: self.predicates.len(),
            unique_objects: self.objects.len(),
            unique_triples: self.triples.len(),
            total_triples: self.total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateCount {
    pub predicate: String,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub options: StatsOptions,
    pub papers: usize,
    pub overall: Counts,
    pub per_task: BTreeMap<TaskLabel, Counts>,
    /// Most frequent first, ties broken lexicographically.
    pub predicate_frequencies: Vec<PredicateCount>,
}

/// Every statement the report counts under `options`, as (paper, s, p, o).
pub fn counted_statements<'a>(
    graph: &'a ContributionGraph,
    options: &StatsOptions,
) -> Vec<(&'a str, &'a str, &'a str, &'a str)> {
    let mut out = Vec::new();
    for t in graph.triples() {
        if !(options.exclude_root && t.is_root_attachment()) {
            out.push((t.paper_id.as_str(), t.subject.as_str(), t.predicate.as_str(), t.object.as_str()));
        }
        if !options.exclude_evidence {
            for span in &t.object_evidence {
                out.push((t.paper_id.as_str(), t.object.as_str(), KEY_EVIDENCE, span.sentence.as_str()));
            }
        }
    }
    out
}

pub fn stats(graph: &ContributionGraph, options: StatsOptions) -> StatsReport {
    let task_of: HashMap<&str, TaskLabel> = graph
        .papers()
        .map(|p| (p.paper_id.as_str(), p.task_label))
        .collect();
    let mut overall = Tally::default();
    let mut per_task: BTreeMap<TaskLabel, Tally> = BTreeMap::new();
    let mut frequencies: HashMap<&str, usize> = HashMap::new();
    for (paper, s, p, o) in counted_statements(graph, &options) {
        overall.add(s, p, o);
        let task = task_of.get(paper).copied().unwrap_or_default();
        per_task.entry(task).or_default().add(s, p, o);
        *frequencies.entry(p).or_default() += 1;
    }
    let mut predicate_frequencies: Vec<PredicateCount> = frequencies
        .into_iter()
        .filter(|(_, n)| options.min_count == 0 || *n > options.min_count)
        .map(|(predicate, count)| PredicateCount {
            predicate: predicate.to_string(),
            count,
        })
        .collect();
    predicate_frequencies.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.predicate.cmp(&b.predicate)));
    StatsReport {
        options,
        papers: graph.paper_count(),
        overall: overall.counts(),
        per_task: per_task.into_iter().map(|(k, v)| (k, v.counts())).collect(),
        predicate_frequencies,
    }
}

impl StatsReport {
    fn scopes(&self) -> Vec<(String, Counts)> {
        let mut rows = vec![("overall".to_string(), self.overall)];
        rows.extend(self.per_task.iter().map(|(t, c)| (t.code().to_string(), *c)));
        rows
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from(
            "| scope | unique subjects | unique predicates | unique objects | unique triples | total triples |\n|---|---|---|---|---|---|\n",
        );
        for (scope, c) in self.scopes() {
            let _ = writeln!(
                out,
                "| {scope} | {} | {} | {} | {} | {} |",
                c.unique_subjects, c.unique_predicates, c.unique_objects, c.unique_triples, c.total_triples
            );
        }
        out.push('\n');
        out.push_str(&self.frequencies_markdown());
        out
    }

    pub fn frequencies_markdown(&self) -> String {
        let mut out = String::from("| predicate | count |\n|---|---|\n");
        for pc in &self.predicate_frequencies {
            let _ = writeln!(out, "| {} | {} |", md_escape(&pc.predicate), pc.count);
        }
        out
    }

    /// Counts per scope as CSV.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scope",
            "unique_subjects",
            "unique_predicates",
            "unique_objects",
            "unique_triples",
            "total_triples",
        ])?;
        for (scope, c) in self.scopes() {
            w.write_record([
                scope,
                c.unique_subjects.to_string(),
                c.unique_predicates.to_string(),
                c.unique_objects.to_string(),
                c.unique_triples.to_string(),
                c.total_triples.to_string(),
            ])?;
        }
        w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))
    }

    pub fn frequencies_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["predicate", "count"])?;
        for pc in &self.predicate_frequencies {
            w.write_record([pc.predicate.clone(), pc.count.to_string()])?;
        }
        w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_value;
    use crate::validate::Profile;
    use serde_json::{json, Value};

    fn graph(docs: &[Value]) -> ContributionGraph {
        let mut g = ContributionGraph::new();
        for d in docs {
            g.ingest_with(&parse_value(d).document, Profile::Fragment).unwrap();
        }
        g
    }

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn shared_predicate_becomes_column() {
        let g = graph(&[
            json!({"paper": {"id": "a"}, "contribution": {"Results": {"F1-score": "91.57%"}}}),
            json!({"paper": {"id": "b"}, "contribution": {"Results": {"F1-score": ["90.1", "88.0"], "BLEU": "30"}}}),
        ]);
        let table = compare(&g, UnitKind::Results, &ids(&["a", "b"]), 2).unwrap();
        assert_eq!(table.columns, ["F1-score"]);
        assert_eq!(table.cell("a", "F1-score").unwrap(), ["91.57%"]);
        assert_eq!(table.cell("b", "F1-score").unwrap(), ["90.1", "88.0"]);
    }

    #[test]
    fn threshold_drops_rare_columns() {
        let g = graph(&[
            json!({"paper": {"id": "a"}, "contribution": {"Results": {"F1": "1", "BLEU": "2"}}}),
            json!({"paper": {"id": "b"}, "contribution": {"Results": {"F1": "3"}}}),
            json!({"paper": {"id": "c"}, "contribution": {"Results": {"F1": "4"}}}),
        ]);
        let table = compare(&g, UnitKind::Results, &ids(&["a", "b", "c"]), 2).unwrap();
        assert_eq!(table.columns, ["F1"]);
        let table = compare(&g, UnitKind::Results, &ids(&["a", "b", "c"]), 1).unwrap();
        assert_eq!(table.columns, ["F1", "BLEU"]);
    }

    #[test]
    fn root_entities_are_properties() {
        let g = graph(&[
            json!({"paper": {"id": "a"}, "contribution": {"Results": {"TACRED": {"F1": "66.4"}}}}),
            json!({"paper": {"id": "b"}, "contribution": {"Results": {"TACRED": {"F1": "68.2"}}}}),
        ]);
        let table = compare(&g, UnitKind::Results, &ids(&["b", "a"]), 2).unwrap();
        assert_eq!(table.rows, ["b", "a"]);
        assert_eq!(table.columns, ["TACRED"]);
        assert_eq!(table.cell("a", "TACRED").unwrap(), ["66.4"]);
    }

    #[test]
    fn unknown_paper() {
        let g = graph(&[]);
        assert!(matches!(
            compare(&g, UnitKind::Results, &ids(&["x"]), 2),
            Err(Error::UnknownPaper(_))
        ));
    }

    #[test]
    fn markdown_rendering() {
        let g = graph(&[
            json!({"paper": {"id": "a"}, "contribution": {"Results": {"F1": "1|2"}}}),
            json!({"paper": {"id": "b"}, "contribution": {"Results": {"F1": "3"}}}),
        ]);
        let md = compare(&g, UnitKind::Results, &ids(&["a", "b"]), 2).unwrap().to_markdown();
        assert_eq!(md, "| paper | F1 |\n|---|---|\n| a | 1\\|2 |\n| b | 3 |\n");
    }

    #[test]
    fn empty_graph_stats() {
        let report = stats(&ContributionGraph::new(), StatsOptions::default());
        assert_eq!(report.overall, Counts::default());
        assert!(report.per_task.is_empty());
        assert!(report.predicate_frequencies.is_empty());
    }

    #[test]
    fn evidence_toggle_adds_statements() {
        let g = graph(&[json!({"paper": {"id": "a"}, "contribution": {"Approach": {
            "from sentence": "We call it X.", "called": "X"
        }}})]);
        let base = stats(&g, StatsOptions::default());
        assert_eq!(base.overall.total_triples, 1);
        let with_root = stats(&g, StatsOptions { exclude_root: false, ..Default::default() });
        assert_eq!(with_root.overall.total_triples, 2);
        let with_evidence = stats(&g, StatsOptions { exclude_evidence: false, ..Default::default() });
        assert_eq!(with_evidence.overall.total_triples, 2);
        assert!(with_evidence.predicate_frequencies.iter().any(|p| p.predicate == "from sentence"));
    }

    #[test]
    fn min_count_filters_frequencies() {
        let g = graph(&[json!({"paper": {"id": "a"}, "contribution": {"Results": {
            "has": ["x", "y", "z"], "F1": "1"
        }}})]);
        let report = stats(&g, StatsOptions { min_count: 2, ..Default::default() });
        assert_eq!(report.predicate_frequencies, [PredicateCount { predicate: "has".into(), count: 3 }]);
        let all = stats(&g, StatsOptions::default());
        assert_eq!(all.predicate_frequencies.iter().map(|p| p.count).sum::<usize>(), all.overall.total_triples);
    }
}
