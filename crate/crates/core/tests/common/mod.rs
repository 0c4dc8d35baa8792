//! Seeded generator of valid documents plus independent oracles used by
//! the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use contribkit::model::{
    AnnotationDocument, EvidenceSpan, InfoUnit, InfoUnitKind, PaperRecord, PredicateEdge,
    ResultRole, SequenceNode, TaskLabel, Triple, UnitKind, INFERRED_VOCAB,
};
use contribkit::model::canonicalize_unit;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "BERT", "CoNLL", "F1", "attention", "encoder", "decoder", "dropout", "SQuAD", "BLEU",
    "layers", "learning rate", "Adam", "batch size", "WMT14", "accuracy", "embedding",
    "LSTM", "CRF", "TACRED", "baseline", "pre-training", "GPU", "10", "0.5", "91.57%",
    "résumé", "a/b", "x|y", "quote \"q\"",
];

const PREDICATES: &[&str] = &[
    "used", "pre-trained on", "achieves", "outperforms", "trained with", "F1-score",
    "uses", "consists of", "evaluated on", "improves",
];

const SURFACE_LABELS: &[(UnitKind, &[&str])] = &[
    (UnitKind::ResearchProblem, &["ResearchProblem", "Research Problem", "research-problem"]),
    (UnitKind::Approach, &["Approach", "Model", "Method", "Architecture", "System"]),
    (UnitKind::Objective, &["Objective"]),
    (UnitKind::ExperimentalSetup, &["Experimental Setup", "Hyperparameters", "ExperimentalSetup"]),
    (UnitKind::Results, &["Results", "Experimental results", "Main Results"]),
    (UnitKind::Tasks, &["Tasks"]),
    (UnitKind::Experiments, &["Experiments"]),
    (UnitKind::AblationAnalysis, &["Ablation Analysis", "AblationAnalysis"]),
    (UnitKind::Baselines, &["Baselines"]),
    (UnitKind::Code, &["Code"]),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    kind: UnitKind,
    counter: usize,
}

impl Gen<'_> {
    fn label(&mut self) -> String {
        self.counter += 1;
        let w = WORDS.choose(self.rng).unwrap();
        if self.rng.random_bool(0.5) {
            format!("{w} {}", self.counter)
        } else {
            w.to_string()
        }
    }

    fn leaf_label(&mut self) -> String {
        if self.kind == UnitKind::Code {
            self.counter += 1;
            format!("https://github.com/example/repo{}", self.counter)
        } else {
            self.label()
        }
    }

    fn evidence(&mut self) -> Vec<EvidenceSpan> {
        if self.rng.random_bool(0.3) {
            let n = self.rng.random_range(1..=2);
            (0..n)
                .map(|_| {
                    self.counter += 1;
                    EvidenceSpan::new(format!("We report {} in sentence {}.", WORDS.choose(self.rng).unwrap(), self.counter))
                })
                .collect()
        } else {
            Vec::new()
        }
    }

    fn edges(&mut self, depth: u32, min: usize) -> Vec<PredicateEdge> {
        let n = self.rng.random_range(min..=3);
        let mut used = HashSet::new();
        let mut edges = Vec::new();
        for _ in 0..n {
            let (predicate, inferred) = if self.rng.random_bool(0.3) {
                (INFERRED_VOCAB.choose(self.rng).unwrap().to_string(), Some(true))
            } else {
                (PREDICATES.choose(self.rng).unwrap().to_string(), None)
            };
            if !used.insert(predicate.clone()) {
                continue;
            }
            let fan = if self.rng.random_bool(0.2) { self.rng.random_range(2..=3) } else { 1 };
            let targets = (0..fan).map(|_| self.node(depth)).collect();
            edges.push(PredicateEdge { predicate, inferred, targets });
        }
        edges
    }

    fn node(&mut self, depth: u32) -> SequenceNode {
        let branch = depth < 4 && self.rng.random_bool(0.45);
        let mut node = SequenceNode::leaf(if branch { self.label() } else { self.leaf_label() });
        node.evidence = self.evidence();
        if self.rng.random_bool(0.1) {
            node.table_ref = Some(self.rng.random_range(1..=9));
        }
        if branch {
            node.edges = self.edges(depth + 1, 1);
        }
        node
    }
}

/// A random document that validates clean under the complete profile.
pub fn random_document(rng: &mut ChaCha8Rng, index: usize) -> AnnotationDocument {
    let mut kinds: Vec<UnitKind> = UnitKind::MANDATORY.to_vec();
    for kind in UnitKind::ALL {
        if !kind.is_mandatory() && rng.random_bool(0.3) {
            kinds.push(kind);
        }
    }
    // shuffle unit order a little; order is preserved by the format
    if rng.random_bool(0.5) {
        kinds.reverse();
    }
    let task = *TaskLabel::ALL.choose(rng).unwrap();
    let mut paper = PaperRecord::new(format!("paper-{index}"));
    paper.title = format!("Generated paper {index}");
    paper.task_label = task;
    let mut doc = AnnotationDocument::new(paper);
    for kind in kinds {
        let surfaces = SURFACE_LABELS.iter().find(|(k, _)| *k == kind).unwrap().1;
        let surface = surfaces.choose(rng).unwrap();
        let unit_kind = canonicalize_unit(surface).unwrap();
        assert_eq!(unit_kind.canonical, kind);
        let mut g = Gen { rng, kind, counter: 0 };
        let mut body = SequenceNode::leaf(unit_kind.surface_label.clone());
        body.evidence = g.evidence();
        body.edges = g.edges(0, 1);
        if kind == UnitKind::Results && g.rng.random_bool(0.3) {
            add_role_chain(&mut body, g.rng);
        }
        doc.units.push(InfoUnit { kind: unit_kind, body });
    }
    doc
}

/// Appends a correctly ordered dataset > task > metric > score chain.
fn add_role_chain(body: &mut SequenceNode, rng: &mut ChaCha8Rng) {
    let task_first = rng.random_bool(0.5);
    let roles = if task_first {
        [ResultRole::Task, ResultRole::Dataset, ResultRole::Metric, ResultRole::Score]
    } else {
        [ResultRole::Dataset, ResultRole::Task, ResultRole::Metric, ResultRole::Score]
    };
    let mut node = SequenceNode::leaf("97.1");
    node.role = Some(roles[3]);
    for (i, role) in roles[..3].iter().enumerate().rev() {
        let mut parent = SequenceNode::leaf(format!("{} chain", role.name()));
        parent.role = Some(*role);
        parent.edges.push(PredicateEdge::new(format!("step {i}"), vec![node]));
        node = parent;
    }
    body.edges.push(PredicateEdge::new("chain", vec![node]));
}

/// Count of triples a document should flatten to, by direct recursion.
pub fn expected_triple_count(doc: &AnnotationDocument) -> usize {
    fn bindings(node: &SequenceNode) -> usize {
        node.edges
            .iter()
            .flat_map(|e| &e.targets)
            .map(|t| 1 + bindings(t))
            .sum()
    }
    doc.units.iter().map(|u| 1 + bindings(&u.body)).sum()
}

/// Every (subject, predicate, object) the document implies, in document order.
pub fn enumerate_spo(doc: &AnnotationDocument) -> Vec<(String, String, String)> {
    fn walk(node: &SequenceNode, out: &mut Vec<(String, String, String)>) {
        for e in &node.edges {
            for t in &e.targets {
                out.push((node.label.clone(), e.predicate.clone(), t.label.clone()));
                walk(t, out);
            }
        }
    }
    let mut out = Vec::new();
    for u in &doc.units {
        out.push((
            "Contribution".to_string(),
            u.kind.canonical.root_predicate().to_string(),
            u.kind.surface_label.clone(),
        ));
        walk(&u.body, &mut out);
    }
    out
}

pub fn all_evidence(doc: &AnnotationDocument) -> Vec<String> {
    fn walk(node: &SequenceNode, out: &mut Vec<String>) {
        out.extend(node.evidence.iter().map(|s| s.sentence.clone()));
        for t in node.edges.iter().flat_map(|e| &e.targets) {
            walk(t, out);
        }
    }
    let mut out = Vec::new();
    for u in &doc.units {
        walk(&u.body, &mut out);
    }
    out
}

/// True when every subject is reachable from the root through the
/// emitted triples.
pub fn connected(triples: &[Triple]) -> bool {
    let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
    for t in triples {
        adjacency.entry(&t.subject).or_default().push(&t.object);
    }
    let mut seen = HashSet::from(["Contribution"]);
    let mut queue = VecDeque::from(["Contribution"]);
    while let Some(n) = queue.pop_front() {
        for &m in adjacency.get(n).into_iter().flatten() {
            if seen.insert(m) {
                queue.push_back(m);
            }
        }
    }
    triples.iter().all(|t| seen.contains(t.subject.as_str()))
}

pub fn unit_kind(kind: UnitKind) -> InfoUnitKind {
    InfoUnitKind::canonical(kind)
}
