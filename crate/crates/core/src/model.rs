//! Typed representation of contribution-annotation documents.
//!
//! A document hangs every information unit off a synthetic `Contribution`
//! root. Each unit is itself a [`SequenceNode`] whose label is the unit's
//! surface label; its outgoing edges start the unit's contribution
//! sequences. Below that, entities and predicates alternate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Label of the synthetic node every information unit hangs from.
pub const CONTRIBUTION_ROOT: &str = "Contribution";

/// Predicates an annotator may introduce when the text offers none.
pub const INFERRED_VOCAB: [&str; 9] = [
    "has",
    "on",
    "by",
    "for",
    "has value",
    "has description",
    "based on",
    "called",
    "name",
];

/// Reserved entity-level keys of the annotation file format.
pub const KEY_EVIDENCE: &str = "from sentence";
pub const KEY_ROLE: &str = "role";
pub const KEY_TABLE: &str = "table";
pub const KEY_INFERRED: &str = "inferred";

pub const RESERVED_KEYS: [&str; 4] = [KEY_EVIDENCE, KEY_ROLE, KEY_TABLE, KEY_INFERRED];

pub fn is_reserved_key(key: &str) -> bool {
    RESERVED_KEYS.contains(&key)
}

/// True when `predicate` belongs to [`INFERRED_VOCAB`] (case-insensitive).
pub fn in_inferred_vocab(predicate: &str) -> bool {
    let p = predicate.trim();
    INFERRED_VOCAB.iter().any(|v| v.eq_ignore_ascii_case(p))
}

/// Research task a paper addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TaskLabel {
    #[serde(rename = "MT")]
    MachineTranslation,
    #[serde(rename = "NER")]
    NamedEntityRecognition,
    #[serde(rename = "QA")]
    QuestionAnswering,
    #[serde(rename = "RC")]
    RelationClassification,
    #[serde(rename = "TC")]
    TextClassification,
    #[default]
    Other,
}

impl TaskLabel {
    pub const ALL: [TaskLabel; 6] = [
        TaskLabel::MachineTranslation,
        TaskLabel::NamedEntityRecognition,
        TaskLabel::QuestionAnswering,
        TaskLabel::RelationClassification,
        TaskLabel::TextClassification,
        TaskLabel::Other,
    ];

    pub fn code(self) -> &'static str {
        match self {
            TaskLabel::MachineTranslation => "MT",
            TaskLabel::NamedEntityRecognition => "NER",
            TaskLabel::QuestionAnswering => "QA",
            TaskLabel::RelationClassification => "RC",
            TaskLabel::TextClassification => "TC",
            TaskLabel::Other => "OTHER",
        }
    }

    /// Accepts the short codes and the spelled-out task names in any case,
    /// with spaces, hyphens or underscores as separators. Anything else is
    /// `Other`.
    pub fn from_label(label: &str) -> TaskLabel {
        let key: String = label
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        match key.as_str() {
            "mt" | "machinetranslation" => TaskLabel::MachineTranslation,
            "ner" | "namedentityrecognition" => TaskLabel::NamedEntityRecognition,
            "qa" | "questionanswering" => TaskLabel::QuestionAnswering,
            "rc" | "relationclassification" | "relationextraction" => {
                TaskLabel::RelationClassification
            }
            "tc" | "textclassification" => TaskLabel::TextClassification,
            _ => TaskLabel::Other,
        }
    }
}

impl fmt::Display for TaskLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PaperRecord {
    #[serde(rename = "id")]
    pub paper_id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, rename = "task")]
    pub task_label: TaskLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_uri: Option<String>,
}

impl PaperRecord {
    pub fn new(paper_id: impl Into<String>) -> Self {
        PaperRecord {
            paper_id: paper_id.into(),
            ..Default::default()
        }
    }
}

/// The ten canonical information units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnitKind {
    ResearchProblem,
    Approach,
    Objective,
    ExperimentalSetup,
    Results,
    Tasks,
    Experiments,
    AblationAnalysis,
    Baselines,
    Code,
}

impl UnitKind {
    pub const ALL: [UnitKind; 10] = [
        UnitKind::ResearchProblem,
        UnitKind::Approach,
        UnitKind::Objective,
        UnitKind::ExperimentalSetup,
        UnitKind::Results,
        UnitKind::Tasks,
        UnitKind::Experiments,
        UnitKind::AblationAnalysis,
        UnitKind::Baselines,
        UnitKind::Code,
    ];

    pub const MANDATORY: [UnitKind; 3] =
        [UnitKind::ResearchProblem, UnitKind::Approach, UnitKind::Results];

    pub fn name(self) -> &'static str {
        match self {
            UnitKind::ResearchProblem => "ResearchProblem",
            UnitKind::Approach => "Approach",
            UnitKind::Objective => "Objective",
            UnitKind::ExperimentalSetup => "ExperimentalSetup",
            UnitKind::Results => "Results",
            UnitKind::Tasks => "Tasks",
            UnitKind::Experiments => "Experiments",
            UnitKind::AblationAnalysis => "AblationAnalysis",
            UnitKind::Baselines => "Baselines",
            UnitKind::Code => "Code",
        }
    }

    pub fn is_mandatory(self) -> bool {
        UnitKind::MANDATORY.contains(&self)
    }

    /// Predicate linking `Contribution` to a unit of this kind.
    pub fn root_predicate(self) -> &'static str {
        match self {
            UnitKind::ResearchProblem => "hasResearchProblem",
            _ => "has",
        }
    }
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UnitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        canonicalize_unit(s).map(|k| k.canonical)
    }
}

/// Folds case and drops separators so "Experimental Setup",
/// "experimental-setup" and "ExperimentalSetup" compare equal.
fn fold_label(label: &str) -> String {
    label
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '-' && *c != '_')
        .flat_map(char::to_lowercase)
        .collect()
}

fn alias_kind(folded: &str) -> Option<UnitKind> {
    let kind = match folded {
        "researchproblem" => UnitKind::ResearchProblem,
        "approach" | "model" | "method" | "architecture" | "system" | "application" | "idea" => {
            UnitKind::Approach
        }
        "objective" => UnitKind::Objective,
        "experimentalsetup" | "hyperparameters" => UnitKind::ExperimentalSetup,
        "results" | "mainresults" | "endtoendresults" => UnitKind::Results,
        "tasks" => UnitKind::Tasks,
        "experiments" => UnitKind::Experiments,
        "ablationanalysis" => UnitKind::AblationAnalysis,
        "baselines" => UnitKind::Baselines,
        "code" => UnitKind::Code,
        _ if folded.contains("results") => UnitKind::Results,
        _ => return None,
    };
    Some(kind)
}

/// An information unit as written in a document: its canonical kind plus
/// the label the annotator used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InfoUnitKind {
    #[serde(rename = "unit")]
    pub canonical: UnitKind,
    #[serde(rename = "unit_label")]
    pub surface_label: String,
}

impl InfoUnitKind {
    pub fn canonical(kind: UnitKind) -> Self {
        InfoUnitKind {
            canonical: kind,
            surface_label: kind.name().to_string(),
        }
    }
}

/// Maps a unit label onto its canonical kind, keeping the trimmed surface
/// label for display.
pub fn canonicalize_unit(surface_label: &str) -> Result<InfoUnitKind, Error> {
    let trimmed = surface_label.trim();
    if trimmed.is_empty() {
        return Err(Error::UnknownUnit(surface_label.to_string()));
    }
    alias_kind(&fold_label(trimmed))
        .map(|canonical| InfoUnitKind {
            canonical,
            surface_label: trimmed.to_string(),
        })
        .ok_or_else(|| Error::UnknownUnit(trimmed.to_string()))
}

pub fn root_predicate(kind: UnitKind) -> &'static str {
    kind.root_predicate()
}

/// Role of an entity inside a Results sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultRole {
    Dataset,
    Task,
    Metric,
    Score,
}

impl ResultRole {
    pub fn name(self) -> &'static str {
        match self {
            ResultRole::Dataset => "dataset",
            ResultRole::Task => "task",
            ResultRole::Metric => "metric",
            ResultRole::Score => "score",
        }
    }

    pub fn from_name(name: &str) -> Option<ResultRole> {
        match name.trim().to_ascii_lowercase().as_str() {
            "dataset" => Some(ResultRole::Dataset),
            "task" => Some(ResultRole::Task),
            "metric" => Some(ResultRole::Metric),
            "score" => Some(ResultRole::Score),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EvidenceSpan {
    pub sentence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<String>,
}

impl EvidenceSpan {
    pub fn new(sentence: impl Into<String>) -> Self {
        EvidenceSpan {
            sentence: sentence.into(),
            section: None,
        }
    }
}

/// An entity in a contribution sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SequenceNode {
    pub label: String,
    pub evidence: Vec<EvidenceSpan>,
    pub edges: Vec<PredicateEdge>,
    pub table_ref: Option<u32>,
    pub role: Option<ResultRole>,
}

impl SequenceNode {
    pub fn leaf(label: impl Into<String>) -> Self {
        SequenceNode {
            label: label.into(),
            ..Default::default()
        }
    }

    pub fn with_edge(mut self, edge: PredicateEdge) -> Self {
        self.edges.push(edge);
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.edges.is_empty()
    }

    /// Number of entity bindings in this subtree, fan-out included.
    pub fn binding_count(&self) -> usize {
        self.edges
            .iter()
            .flat_map(|e| &e.targets)
            .map(|t| 1 + t.binding_count())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateEdge {
    pub predicate: String,
    /// `None` until either the document or the inference heuristic says.
    pub inferred: Option<bool>,
    pub targets: Vec<SequenceNode>,
}

impl PredicateEdge {
    pub fn new(predicate: impl Into<String>, targets: Vec<SequenceNode>) -> Self {
        PredicateEdge {
            predicate: predicate.into(),
            inferred: None,
            targets,
        }
    }

    pub fn to_leaf(predicate: impl Into<String>, object: impl Into<String>) -> Self {
        PredicateEdge::new(predicate, vec![SequenceNode::leaf(object)])
    }
}

/// One information unit of a document. The body's label always equals
/// `kind.surface_label`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoUnit {
    pub kind: InfoUnitKind,
    pub body: SequenceNode,
}

impl InfoUnit {
    pub fn new(kind: InfoUnitKind) -> Self {
        let body = SequenceNode::leaf(kind.surface_label.clone());
        InfoUnit { kind, body }
    }

    pub fn with_edge(mut self, edge: PredicateEdge) -> Self {
        self.body.edges.push(edge);
        self
    }

    /// Root entities of the unit's contribution sequences.
    pub fn sequences(&self) -> impl Iterator<Item = &SequenceNode> {
        self.body.edges.iter().flat_map(|e| &e.targets)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotationDocument {
    pub paper: PaperRecord,
    pub units: Vec<InfoUnit>,
}

impl AnnotationDocument {
    pub fn new(paper: PaperRecord) -> Self {
        AnnotationDocument {
            paper,
            units: Vec::new(),
        }
    }

    pub fn with_unit(mut self, unit: InfoUnit) -> Self {
        self.units.push(unit);
        self
    }

    pub fn unit(&self, kind: UnitKind) -> Option<&InfoUnit> {
        self.units.iter().find(|u| u.kind.canonical == kind)
    }

    pub fn has_mandatory_units(&self) -> bool {
        UnitKind::MANDATORY.iter().all(|k| self.unit(*k).is_some())
    }

    /// Equality on what survives triplification: paper id and unit trees.
    pub fn same_structure(&self, other: &AnnotationDocument) -> bool {
        self.paper.paper_id == other.paper.paper_id && self.units == other.units
    }

    /// Trims every label and predicate in place; internal whitespace is kept.
    pub fn canonicalize(mut self) -> Self {
        fn trim_node(node: &mut SequenceNode) {
            node.label = node.label.trim().to_string();
            for edge in &mut node.edges {
                edge.predicate = edge.predicate.trim().to_string();
                edge.targets.iter_mut().for_each(trim_node);
            }
        }
        self.paper.paper_id = self.paper.paper_id.trim().to_string();
        for unit in &mut self.units {
            unit.kind.surface_label = unit.kind.surface_label.trim().to_string();
            trim_node(&mut unit.body);
        }
        self
    }
}

/// A flattened statement with its provenance.
///
/// `path` locates the binding in the document tree: `[u]` for the
/// `Contribution -> unit` attachment, then `[.., edge, target]` pairs for
/// every step down a contribution sequence. `evidence` belongs to the
/// subject; the `object_*` fields carry the object node's own annotations
/// so the tree can be rebuilt from triples alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: String,
    #[serde(flatten)]
    pub unit: InfoUnitKind,
    pub paper_id: String,
    pub path: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<EvidenceSpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inferred: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub object_evidence: Vec<EvidenceSpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_role: Option<ResultRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_table: Option<u32>,
}

impl Triple {
    /// True for the synthetic `Contribution -> unit` attachments.
    pub fn is_root_attachment(&self) -> bool {
        self.path.len() == 1
    }

    pub fn spo(&self) -> (&str, &str, &str) {
        (&self.subject, &self.predicate, &self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_aliases() {
        let kind = |s| canonicalize_unit(s).unwrap().canonical;
        assert_eq!(kind("Hyperparameters"), UnitKind::ExperimentalSetup);
        assert_eq!(kind("Results"), UnitKind::Results);
        assert_eq!(kind("Main results"), UnitKind::Results);
        assert_eq!(kind("End-to-end results"), UnitKind::Results);
        assert_eq!(kind("Experimental results"), UnitKind::Results);
        for alias in ["Model", "Method", "Architecture", "System", "Application", "idea"] {
            assert_eq!(kind(alias), UnitKind::Approach, "{alias}");
        }
        assert_eq!(kind("research problem"), UnitKind::ResearchProblem);
        assert_eq!(kind("  Code "), UnitKind::Code);
    }

    #[test]
    fn keeps_surface_label() {
        let k = canonicalize_unit(" Main results ").unwrap();
        assert_eq!(k.surface_label, "Main results");
    }

    #[test]
    fn rejects_unknown_units() {
        assert!(matches!(
            canonicalize_unit("Acknowledgements"),
            Err(Error::UnknownUnit(_))
        ));
        assert!(canonicalize_unit("   ").is_err());
    }

    #[test]
    fn canonicalization_is_idempotent() {
        for kind in UnitKind::ALL {
            let once = canonicalize_unit(kind.name()).unwrap();
            assert_eq!(once.canonical, kind);
            let twice = canonicalize_unit(&once.surface_label).unwrap();
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn root_predicates() {
        assert_eq!(root_predicate(UnitKind::ResearchProblem), "hasResearchProblem");
        assert_eq!(root_predicate(UnitKind::Results), "has");
        assert_eq!(root_predicate(UnitKind::Code), "has");
    }

    #[test]
    fn task_labels() {
        assert_eq!(TaskLabel::from_label("machine-translation"), TaskLabel::MachineTranslation);
        assert_eq!(TaskLabel::from_label("NER"), TaskLabel::NamedEntityRecognition);
        assert_eq!(TaskLabel::from_label("something"), TaskLabel::Other);
        assert_eq!(TaskLabel::default(), TaskLabel::Other);
    }

    #[test]
    fn vocab_lookup_ignores_case() {
        assert!(in_inferred_vocab("Has Description"));
        assert!(in_inferred_vocab("name"));
        assert!(!in_inferred_vocab("evaluated-against"));
    }
}
