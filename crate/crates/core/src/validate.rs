//! Scheme rules over parsed documents.
//!
//! | rule | code | severity |
//! |------|------|----------|
//! | V1 | `MISSING_MANDATORY_UNIT` | error |
//! | V2 | `UNKNOWN_UNIT` | error |
//! | V3 | `MALFORMED_SEQUENCE` | error |
//! | V4 | `NONCANONICAL_INFERRED_PREDICATE` | warning |
//! | V5 | `RESULTS_PRECEDENCE` | warning |
//! | V6 | `EMPTY_UNIT` | warning |
//! | V7 | `BAD_EVIDENCE` | error |
//! | V8 | `BAD_CODE_URL` | warning |
//! | V9 | `DANGLING_PREDICATE` | error |
//!
//! Diagnostics come out in document order: document-level findings first,
//! then a depth-first walk of every unit.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Code, Diagnostic, Pointer};
use crate::ingest::parse_lenient;
use crate::model::{
    canonicalize_unit, in_inferred_vocab, is_reserved_key, AnnotationDocument, EvidenceSpan,
    ResultRole, SequenceNode, UnitKind, KEY_EVIDENCE,
};

/// How much of the scheme a document must cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// A whole paper: the mandatory units are required.
    #[default]
    Complete,
    /// An excerpt of a paper (a single unit, a worked example); the
    /// mandatory-unit rule is skipped.
    Fragment,
}

pub fn validate(doc: &AnnotationDocument) -> Vec<Diagnostic> {
    validate_with(doc, Profile::Complete)
}

pub fn validate_with(doc: &AnnotationDocument, profile: Profile) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let contribution = Pointer::root().key("contribution");

    if profile == Profile::Complete {
        for kind in UnitKind::MANDATORY {
            if doc.unit(kind).is_none() {
                out.push(Diagnostic::new(
                    Code::MissingMandatoryUnit,
                    contribution.as_str(),
                    format!("mandatory information unit {kind} is missing"),
                ));
            }
        }
    }

    let mut seen = HashSet::new();
    for unit in &doc.units {
        let at = contribution.key(&unit.kind.surface_label);
        if !seen.insert(unit.kind.canonical) {
            out.push(Diagnostic::new(
                Code::DuplicateUnit,
                at.as_str(),
                format!("{} appears more than once", unit.kind.canonical),
            ));
        }
        match canonicalize_unit(&unit.kind.surface_label) {
            Ok(k) if k.canonical == unit.kind.canonical => {}
            _ => out.push(Diagnostic::new(
                Code::UnknownUnit,
                at.as_str(),
                format!(
                    "{:?} does not name the {} unit",
                    unit.kind.surface_label, unit.kind.canonical
                ),
            )),
        }
        if unit.body.label != unit.kind.surface_label {
            out.push(Diagnostic::new(
                Code::MalformedSequence,
                at.as_str(),
                "unit body label differs from the unit label",
            ));
        }
        if unit.body.role.is_some() {
            out.push(Diagnostic::new(
                Code::MalformedSequence,
                at.as_str(),
                "an information unit cannot carry a role",
            ));
        }
        if unit.body.edges.is_empty() {
            out.push(Diagnostic::new(
                Code::EmptyUnit,
                at.as_str(),
                format!("{} has no contribution sequences", unit.kind.surface_label),
            ));
        }
        let mut walker = Walker {
            kind: unit.kind.canonical,
            out: &mut out,
        };
        walker.evidence(&unit.body.evidence, &at);
        walker.edges(&unit.body, &at, Some(Vec::new()));
    }
    out
}

/// Parse and validate in one go. Parser findings come first.
pub fn check(text: &str, profile: Profile) -> (Option<AnnotationDocument>, Vec<Diagnostic>) {
    let parsed = parse_lenient(text);
    if !parsed.well_formed {
        return (None, parsed.diagnostics);
    }
    let mut diagnostics = parsed.diagnostics;
    diagnostics.extend(validate_with(&parsed.document, profile));
    (Some(parsed.document), diagnostics)
}

struct Walker<'a> {
    kind: UnitKind,
    out: &'a mut Vec<Diagnostic>,
}

impl Walker<'_> {
    fn push(&mut self, code: Code, at: &Pointer, message: impl Into<String>) {
        self.out.push(Diagnostic::new(code, at.as_str(), message));
    }

    fn evidence(&mut self, spans: &[EvidenceSpan], node_at: &Pointer) {
        for span in spans {
            if span.sentence.trim().is_empty() {
                self.push(Code::BadEvidence, &node_at.key(KEY_EVIDENCE), "evidence sentence is empty");
            }
        }
    }

    /// `roles` holds the tagged roles seen on the way down, or `None` once
    /// a precedence violation was reported on this branch.
    fn edges(&mut self, node: &SequenceNode, node_at: &Pointer, roles: Option<Vec<ResultRole>>) {
        let mut predicates = HashSet::new();
        for edge in &node.edges {
            let edge_at = node_at.key(&edge.predicate);
            let predicate = edge.predicate.trim();
            if predicate.is_empty() || is_reserved_key(predicate) || predicate != edge.predicate {
                self.push(
                    Code::MalformedSequence,
                    &edge_at,
                    format!("{:?} is not a usable predicate", edge.predicate),
                );
            } else if !predicates.insert(predicate) {
                self.push(
                    Code::MalformedSequence,
                    &edge_at,
                    format!("predicate {predicate:?} repeats on {:?}", node.label),
                );
            }
            if edge.inferred == Some(true) && !in_inferred_vocab(predicate) {
                self.push(
                    Code::NoncanonicalInferredPredicate,
                    &edge_at,
                    format!("inferred predicate {predicate:?} is outside the inferred vocabulary"),
                );
            }
            if edge.targets.is_empty() {
                self.push(
                    Code::DanglingPredicate,
                    &edge_at,
                    format!("predicate {predicate:?} has no object"),
                );
            }
            let single = edge.targets.len() == 1;
            for (i, target) in edge.targets.iter().enumerate() {
                let slot = if single { edge_at.clone() } else { edge_at.index(i) };
                let target_at = if target.is_leaf() && target.evidence.is_empty() && target.role.is_none() && target.table_ref.is_none() {
                    slot
                } else {
                    slot.key(&target.label)
                };
                self.node(target, &target_at, roles.clone());
            }
        }
    }

    fn node(&mut self, node: &SequenceNode, at: &Pointer, roles: Option<Vec<ResultRole>>) {
        let label = node.label.trim();
        if label.is_empty() || label == KEY_EVIDENCE || label != node.label {
            self.push(Code::MalformedSequence, at, format!("{:?} is not a usable entity label", node.label));
        }
        self.evidence(&node.evidence, at);
        if self.kind == UnitKind::Code && node.is_leaf() && !is_url_shaped(label) {
            self.push(Code::BadCodeUrl, at, format!("{label:?} does not look like a URL"));
        }

        let roles = match (roles, node.role) {
            (Some(mut seen), Some(role)) if self.kind == UnitKind::Results => {
                seen.push(role);
                if respects_precedence(&seen) {
                    Some(seen)
                } else {
                    self.push(
                        Code::ResultsPrecedence,
                        at,
                        format!(
                            "role order {} follows neither dataset>task>metric>score nor task>dataset>metric>score",
                            seen.iter().map(|r| r.name()).collect::<Vec<_>>().join(">")
                        ),
                    );
                    None
                }
            }
            (roles, _) => roles,
        };
        self.edges(node, at, roles);
    }
}

const DATASET_FIRST: [ResultRole; 4] =
    [ResultRole::Dataset, ResultRole::Task, ResultRole::Metric, ResultRole::Score];
const TASK_FIRST: [ResultRole; 4] =
    [ResultRole::Task, ResultRole::Dataset, ResultRole::Metric, ResultRole::Score];

/// True when the roles appear in strictly increasing rank under at least
/// one of the two accepted orders.
pub fn respects_precedence(roles: &[ResultRole]) -> bool {
    let increasing = |order: &[ResultRole; 4]| {
        let ranks: Vec<usize> = roles
            .iter()
            .map(|r| order.iter().position(|o| o == r).expect("all roles ranked"))
            .collect();
        ranks.windows(2).all(|w| w[0] < w[1])
    };
    increasing(&DATASET_FIRST) || increasing(&TASK_FIRST)
}

fn is_url_shaped(label: &str) -> bool {
    match url::Url::parse(label) {
        Ok(url) => matches!(url.scheme(), "http" | "https") && url.host_str().is_some_and(|h| !h.is_empty()),
        Err(_) => false,
    }
}
