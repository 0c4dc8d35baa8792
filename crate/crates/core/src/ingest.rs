//! Reading annotation files into [`AnnotationDocument`]s.
//!
//! File layout:
//!
//! ```json
//! {
//!   "paper": {"id": "...", "title": "...", "task": "NER"},
//!   "contribution": {
//!     "<unit label>": { "<predicate>": <object> , ... }
//!   }
//! }
//! ```
//!
//! An object is a string (leaf entity), an array (fan-out of strings and
//! entity dictionaries), or an entity dictionary whose keys are entity
//! labels mapping to predicate dictionaries. Predicate dictionaries may
//! carry the reserved keys `from sentence`, `role`, `table` and `inferred`
//! which annotate the entity that owns them. A `from sentence` key inside
//! an entity dictionary annotates the predicate's subject.
//!
//! At unit level a key whose value is an object can be either a predicate
//! (`{"used": {"BERT": {...}}}`) or a root entity
//! (`{"CoNLL test set": {"For": ...}}`). The reading that parses cleanly
//! wins, the predicate reading on a tie. Root entities are attached to the
//! unit through a single merged `has` edge.

use serde_json::{Map, Value};

use crate::diagnostics::{has_errors, Code, Diagnostic, Pointer};
use crate::model::{
    canonicalize_unit, in_inferred_vocab, AnnotationDocument, EvidenceSpan, InfoUnit,
    PaperRecord, PredicateEdge, ResultRole, SequenceNode, TaskLabel, KEY_EVIDENCE,
    KEY_INFERRED, KEY_ROLE, KEY_TABLE,
};

const UNIT_ROOT_PREDICATE: &str = "has";

/// A document together with everything the parser complained about.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub document: AnnotationDocument,
    pub diagnostics: Vec<Diagnostic>,
    /// False when the input was not a JSON object at all.
    pub well_formed: bool,
}

/// Parses an annotation file, rejecting it if any grammar error was found.
pub fn parse_document(text: &str) -> Result<AnnotationDocument, Vec<Diagnostic>> {
    let parsed = parse_lenient(text);
    if has_errors(&parsed.diagnostics) {
        Err(parsed.diagnostics)
    } else {
        Ok(parsed.document)
    }
}

pub fn parse_bytes(bytes: &[u8]) -> Result<AnnotationDocument, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_document(text),
        Err(e) => Err(vec![Diagnostic::new(
            Code::MalformedJson,
            "",
            format!("input is not UTF-8: {e}"),
        )]),
    }
}

/// Parses as much of the document as the grammar allows. Offending
/// subtrees are dropped and reported.
pub fn parse_lenient(text: &str) -> Parsed {
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return malformed(format!("invalid JSON: {e}")),
    };
    parse_value(&value)
}

pub fn parse_value(value: &Value) -> Parsed {
    let Value::Object(top) = value else {
        return malformed("top level must be a JSON object".to_string());
    };
    let mut sink = Sink::default();
    let paper = match top.get("paper") {
        Some(v) => read_paper(v, &Pointer::root().key("paper"), &mut sink),
        None => PaperRecord::default(),
    };
    let mut document = AnnotationDocument::new(paper);
    let contribution_ptr = Pointer::root().key("contribution");
    match top.get("contribution") {
        None => {}
        Some(Value::Object(units)) => {
            for (label, body) in units {
                read_unit(label, body, &contribution_ptr.key(label), &mut document, &mut sink);
            }
        }
        Some(_) => sink.push(
            Code::MalformedSequence,
            &contribution_ptr,
            "\"contribution\" must be an object keyed by information unit",
        ),
    }
    Parsed {
        document,
        diagnostics: sink.diagnostics,
        well_formed: true,
    }
}

fn malformed(message: String) -> Parsed {
    Parsed {
        document: AnnotationDocument::default(),
        diagnostics: vec![Diagnostic::new(Code::MalformedJson, "", message)],
        well_formed: false,
    }
}

#[derive(Default)]
struct Sink {
    diagnostics: Vec<Diagnostic>,
}

impl Sink {
    fn push(&mut self, code: Code, at: &Pointer, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::new(code, at.as_str(), message));
    }

    fn error_count(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.is_error()).count()
    }
}

fn read_paper(value: &Value, at: &Pointer, sink: &mut Sink) -> PaperRecord {
    let mut paper = PaperRecord::default();
    let Value::Object(map) = value else {
        sink.push(Code::MalformedSequence, at, "\"paper\" must be an object");
        return paper;
    };
    let text_field = |key: &str, sink: &mut Sink| -> Option<String> {
        match map.get(key) {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.trim().to_string()),
            Some(_) => {
                sink.push(Code::MalformedSequence, &at.key(key), format!("\"{key}\" must be a string"));
                None
            }
        }
    };
    if let Some(id) = text_field("id", sink) {
        paper.paper_id = id;
    }
    if let Some(title) = text_field("title", sink) {
        paper.title = title;
    }
    if let Some(task) = text_field("task", sink) {
        paper.task_label = TaskLabel::from_label(&task);
    }
    paper
}

fn read_unit(
    label: &str,
    body: &Value,
    at: &Pointer,
    document: &mut AnnotationDocument,
    sink: &mut Sink,
) {
    let kind = match canonicalize_unit(label) {
        Ok(kind) => kind,
        Err(_) => {
            sink.push(
                Code::UnknownUnit,
                at,
                format!("{label:?} is not an information unit or one of its aliases"),
            );
            return;
        }
    };
    let Value::Object(map) = body else {
        sink.push(Code::MalformedSequence, at, "an information unit must map to a dictionary");
        return;
    };
    let mut unit = InfoUnit::new(kind);
    read_predicates(map, at, &mut unit.body, true, sink);

    if let Some(pos) = document
        .units
        .iter()
        .position(|u| u.kind.canonical == unit.kind.canonical)
    {
        let previous = document.units.remove(pos);
        sink.push(
            Code::DuplicateUnit,
            at,
            format!(
                "{:?} and {:?} both denote {}; keeping the later one",
                previous.kind.surface_label, unit.kind.surface_label, unit.kind.canonical
            ),
        );
    }
    document.units.push(unit);
}

/// Reads a predicate dictionary into `owner`.
fn read_predicates(
    map: &Map<String, Value>,
    at: &Pointer,
    owner: &mut SequenceNode,
    unit_level: bool,
    sink: &mut Sink,
) {
    let mut inferred: Vec<(String, Pointer)> = Vec::new();
    // Index of the merged unit-level "has" edge.
    let mut root_edge: Option<usize> = None;

    for (key, value) in map {
        let key_at = at.key(key);
        match key.as_str() {
            KEY_EVIDENCE => owner.evidence.extend(read_evidence(value, &key_at, sink)),
            KEY_ROLE => {
                if unit_level {
                    sink.push(Code::MalformedSequence, &key_at, "an information unit cannot carry a role");
                    continue;
                }
                match value.as_str().and_then(ResultRole::from_name) {
                    Some(role) => owner.role = Some(role),
                    None => sink.push(
                        Code::MalformedSequence,
                        &key_at,
                        "role must be one of \"dataset\", \"task\", \"metric\", \"score\"",
                    ),
                }
            }
            KEY_TABLE => match value.as_u64().and_then(|n| u32::try_from(n).ok()) {
                Some(n) => owner.table_ref = Some(n),
                None => sink.push(
                    Code::MalformedSequence,
                    &key_at,
                    "table must be a non-negative integer",
                ),
            },
            KEY_INFERRED => read_inferred(value, &key_at, &mut inferred, sink),
            _ => {
                let predicate = key.trim();
                if predicate.is_empty() {
                    sink.push(Code::MalformedSequence, &key_at, "empty predicate");
                    continue;
                }
                if unit_level && value.is_object() && !reads_as_predicate(value, &key_at) {
                    let mut root = SequenceNode::leaf(predicate);
                    read_predicates(value.as_object().unwrap(), &key_at, &mut root, false, sink);
                    push_root(owner, &mut root_edge, vec![root]);
                    continue;
                }
                let Some((targets, subject_evidence)) = read_object(value, &key_at, sink) else {
                    continue;
                };
                owner.evidence.extend(subject_evidence);
                if unit_level && predicate == UNIT_ROOT_PREDICATE {
                    push_root(owner, &mut root_edge, targets);
                } else {
                    owner.edges.push(PredicateEdge::new(predicate, targets));
                }
            }
        }
    }

    for (name, name_at) in inferred {
        let mut found = false;
        for edge in owner.edges.iter_mut().filter(|e| e.predicate == name) {
            edge.inferred = Some(true);
            found = true;
        }
        if !found {
            sink.push(
                Code::MalformedSequence,
                &name_at,
                format!("{name:?} is marked inferred but is not a predicate of this entity"),
            );
        }
    }
}

fn push_root(owner: &mut SequenceNode, root_edge: &mut Option<usize>, targets: Vec<SequenceNode>) {
    match *root_edge {
        Some(i) => owner.edges[i].targets.extend(targets),
        None => {
            *root_edge = Some(owner.edges.len());
            owner.edges.push(PredicateEdge::new(UNIT_ROOT_PREDICATE, targets));
        }
    }
}

/// Decides how a unit-level `key: {...}` pair reads. Both interpretations
/// are tried against scratch sinks; fewer errors wins, predicate on a tie.
fn reads_as_predicate(value: &Value, at: &Pointer) -> bool {
    let map = value.as_object().expect("caller checked object");
    let mut as_predicate = Sink::default();
    read_entities(map, at, &mut as_predicate);
    let predicate_errors = as_predicate.error_count();
    if predicate_errors == 0 {
        return true;
    }
    let mut as_entity = Sink::default();
    read_predicates(map, at, &mut SequenceNode::leaf("_"), false, &mut as_entity);
    predicate_errors <= as_entity.error_count()
}

fn read_inferred(value: &Value, at: &Pointer, out: &mut Vec<(String, Pointer)>, sink: &mut Sink) {
    match value {
        Value::String(s) => out.push((s.trim().to_string(), at.clone())),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                match item {
                    Value::String(s) => out.push((s.trim().to_string(), at.index(i))),
                    _ => sink.push(Code::MalformedSequence, &at.index(i), "inferred predicate names must be strings"),
                }
            }
        }
        _ => sink.push(
            Code::MalformedSequence,
            at,
            "\"inferred\" must be a predicate name or an array of them",
        ),
    }
}

fn read_evidence(value: &Value, at: &Pointer, sink: &mut Sink) -> Vec<EvidenceSpan> {
    let mut spans = Vec::new();
    let mut one = |v: &Value, at: &Pointer, sink: &mut Sink| match v {
        Value::String(s) if !s.trim().is_empty() => spans.push(EvidenceSpan::new(s.clone())),
        Value::String(_) => sink.push(Code::BadEvidence, at, "evidence sentence is empty"),
        _ => sink.push(Code::BadEvidence, at, "evidence must be a sentence string"),
    };
    match value {
        Value::Array(items) if !items.is_empty() => {
            for (i, item) in items.iter().enumerate() {
                one(item, &at.index(i), sink);
            }
        }
        Value::Array(_) => sink.push(Code::BadEvidence, at, "evidence array is empty"),
        other => one(other, at, sink),
    }
    spans
}

/// Reads the value of a predicate: the targets plus any evidence that
/// belongs to the predicate's subject. `None` when the value is unusable.
fn read_object(
    value: &Value,
    at: &Pointer,
    sink: &mut Sink,
) -> Option<(Vec<SequenceNode>, Vec<EvidenceSpan>)> {
    match value {
        Value::String(_) | Value::Array(_) | Value::Object(_) => {
            let mut targets = Vec::new();
            let mut evidence = Vec::new();
            read_fan_out(value, at, &mut targets, &mut evidence, sink);
            Some((targets, evidence))
        }
        other => {
            sink.push(
                Code::MalformedSequence,
                at,
                format!("a predicate must map to a string, array or dictionary, not {}", kind_name(other)),
            );
            None
        }
    }
}

fn read_fan_out(
    value: &Value,
    at: &Pointer,
    targets: &mut Vec<SequenceNode>,
    evidence: &mut Vec<EvidenceSpan>,
    sink: &mut Sink,
) {
    match value {
        Value::String(s) => {
            if let Some(label) = entity_label(s, at, sink) {
                targets.push(SequenceNode::leaf(label));
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                read_fan_out(item, &at.index(i), targets, evidence, sink);
            }
        }
        Value::Object(map) => {
            let (nodes, spans) = read_entities(map, at, sink);
            targets.extend(nodes);
            evidence.extend(spans);
        }
        other => sink.push(
            Code::MalformedSequence,
            at,
            format!("unexpected {} among a predicate's objects", kind_name(other)),
        ),
    }
}

/// Reads an entity dictionary: entity label -> predicate dictionary.
fn read_entities(
    map: &Map<String, Value>,
    at: &Pointer,
    sink: &mut Sink,
) -> (Vec<SequenceNode>, Vec<EvidenceSpan>) {
    let mut nodes = Vec::new();
    let mut evidence = Vec::new();
    for (key, value) in map {
        let key_at = at.key(key);
        if key == KEY_EVIDENCE {
            evidence.extend(read_evidence(value, &key_at, sink));
            continue;
        }
        if key == KEY_ROLE || key == KEY_TABLE || key == KEY_INFERRED {
            sink.push(
                Code::MalformedSequence,
                &key_at,
                format!("{key:?} must sit inside the entity it describes"),
            );
            continue;
        }
        let Some(label) = entity_label(key, &key_at, sink) else {
            continue;
        };
        match value {
            Value::Object(body) => {
                let mut node = SequenceNode::leaf(label);
                read_predicates(body, &key_at, &mut node, false, sink);
                nodes.push(node);
            }
            other => sink.push(
                Code::MalformedSequence,
                &key_at,
                format!("entity {label:?} must map to a predicate dictionary, not {}", kind_name(other)),
            ),
        }
    }
    (nodes, evidence)
}

fn entity_label(raw: &str, at: &Pointer, sink: &mut Sink) -> Option<String> {
    let label = raw.trim();
    if label.is_empty() {
        sink.push(Code::MalformedSequence, at, "empty entity label");
        None
    } else if label == KEY_EVIDENCE {
        sink.push(Code::MalformedSequence, at, "\"from sentence\" cannot be an entity");
        None
    } else {
        Some(label.to_string())
    }
}

fn kind_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// Serializes a document back to the file format. Parsing the result
/// yields a document structurally equal to `doc` (inferred flags that are
/// `Some(false)` read back as `None`).
pub fn to_value(doc: &AnnotationDocument) -> Value {
    let mut paper = Map::new();
    paper.insert("id".into(), Value::String(doc.paper.paper_id.clone()));
    paper.insert("title".into(), Value::String(doc.paper.title.clone()));
    paper.insert("task".into(), Value::String(doc.paper.task_label.code().into()));
    let mut units = Map::new();
    for unit in &doc.units {
        units.insert(unit.kind.surface_label.clone(), Value::Object(predicate_map(&unit.body)));
    }
    let mut top = Map::new();
    top.insert("paper".into(), Value::Object(paper));
    top.insert("contribution".into(), Value::Object(units));
    Value::Object(top)
}

pub fn to_json_string(doc: &AnnotationDocument) -> String {
    serde_json::to_string_pretty(&to_value(doc)).expect("documents always serialize")
}

fn predicate_map(node: &SequenceNode) -> Map<String, Value> {
    let mut map = Map::new();
    match node.evidence.as_slice() {
        [] => {}
        [one] => {
            map.insert(KEY_EVIDENCE.into(), Value::String(one.sentence.clone()));
        }
        many => {
            let sentences = many.iter().map(|e| Value::String(e.sentence.clone())).collect();
            map.insert(KEY_EVIDENCE.into(), Value::Array(sentences));
        }
    }
    if let Some(role) = node.role {
        map.insert(KEY_ROLE.into(), Value::String(role.name().into()));
    }
    if let Some(table) = node.table_ref {
        map.insert(KEY_TABLE.into(), Value::from(table));
    }
    for edge in &node.edges {
        let value = match edge.targets.as_slice() {
            [one] => node_value(one),
            many => Value::Array(many.iter().map(node_value).collect()),
        };
        map.insert(edge.predicate.clone(), value);
    }
    let inferred: Vec<Value> = node
        .edges
        .iter()
        .filter(|e| e.inferred == Some(true))
        .map(|e| Value::String(e.predicate.clone()))
        .collect();
    if !inferred.is_empty() {
        map.insert(KEY_INFERRED.into(), Value::Array(inferred));
    }
    map
}

fn node_value(node: &SequenceNode) -> Value {
    let plain = node.edges.is_empty()
        && node.evidence.is_empty()
        && node.role.is_none()
        && node.table_ref.is_none();
    if plain {
        Value::String(node.label.clone())
    } else {
        let mut map = Map::new();
        map.insert(node.label.clone(), Value::Object(predicate_map(node)));
        Value::Object(map)
    }
}

/// Fills in `inferred` for every edge the document left unflagged: an
/// edge is inferred when its predicate is in the inferred vocabulary and
/// appears in none of the evidence sentences of its contribution sequence.
pub fn infer_predicate_flags(mut doc: AnnotationDocument) -> AnnotationDocument {
    for unit in &mut doc.units {
        let unit_evidence = unit.body.evidence.clone();
        for edge in &mut unit.body.edges {
            let mut sentences: Vec<String> = unit_evidence.iter().map(|e| e.sentence.clone()).collect();
            for target in &edge.targets {
                collect_sentences(target, &mut sentences);
            }
            let tokenized: Vec<Vec<String>> = sentences.iter().map(|s| words(s)).collect();
            flag_edge(edge, &tokenized);
        }
    }
    doc
}

fn collect_sentences(node: &SequenceNode, out: &mut Vec<String>) {
    out.extend(node.evidence.iter().map(|e| e.sentence.clone()));
    for target in node.edges.iter().flat_map(|e| &e.targets) {
        collect_sentences(target, out);
    }
}

fn flag_edge(edge: &mut PredicateEdge, sentences: &[Vec<String>]) {
    if edge.inferred.is_none() {
        let needle = words(&edge.predicate);
        let in_text = !needle.is_empty()
            && sentences
                .iter()
                .any(|s| s.windows(needle.len()).any(|w| w == needle.as_slice()));
        edge.inferred = Some(!in_text && in_inferred_vocab(&edge.predicate));
    }
    for target in &mut edge.targets {
        for child in &mut target.edges {
            flag_edge(child, sentences);
        }
    }
}

/// Lowercased alphanumeric word tokens.
fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}
