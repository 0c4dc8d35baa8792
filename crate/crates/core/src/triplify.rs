//! Flattening documents into triples and rebuilding them.

use std::collections::{BTreeMap, HashMap};

use crate::diagnostics::has_errors;
use crate::error::{Error, Result};
use crate::model::{
    canonicalize_unit, AnnotationDocument, InfoUnit, InfoUnitKind, PaperRecord, PredicateEdge,
    SequenceNode, Triple, CONTRIBUTION_ROOT,
};
use crate::validate::{validate_with, Profile};

/// Flattens a complete document (all mandatory units present).
pub fn flatten(doc: &AnnotationDocument) -> Result<Vec<Triple>> {
    flatten_with(doc, Profile::Complete)
}

/// Flattens `doc` after checking it under `profile`. Any ERROR diagnostic
/// refuses the document.
pub fn flatten_with(doc: &AnnotationDocument, profile: Profile) -> Result<Vec<Triple>> {
    let diagnostics = validate_with(doc, profile);
    if has_errors(&diagnostics) {
        return Err(Error::InvalidDocument(
            diagnostics.into_iter().filter(|d| d.is_error()).collect(),
        ));
    }
    Ok(flatten_unchecked(doc))
}

/// Depth-first flattening without validation.
pub fn flatten_unchecked(doc: &AnnotationDocument) -> Vec<Triple> {
    let mut out = Vec::new();
    for (u, unit) in doc.units.iter().enumerate() {
        let path = vec![u as u32];
        out.push(Triple {
            subject: CONTRIBUTION_ROOT.to_string(),
            predicate: unit.kind.canonical.root_predicate().to_string(),
            object: unit.kind.surface_label.clone(),
            unit: unit.kind.clone(),
            paper_id: doc.paper.paper_id.clone(),
            path: path.clone(),
            evidence: Vec::new(),
            inferred: None,
            object_evidence: unit.body.evidence.clone(),
            object_role: unit.body.role,
            object_table: unit.body.table_ref,
        });
        emit_bindings(&unit.body, &path, &unit.kind, &doc.paper.paper_id, &mut out);
    }
    out
}

fn emit_bindings(
    subject: &SequenceNode,
    subject_path: &[u32],
    unit: &InfoUnitKind,
    paper_id: &str,
    out: &mut Vec<Triple>,
) {
    for (e, edge) in subject.edges.iter().enumerate() {
        for (t, target) in edge.targets.iter().enumerate() {
            let mut path = subject_path.to_vec();
            path.extend([e as u32, t as u32]);
            out.push(Triple {
                subject: subject.label.clone(),
                predicate: edge.predicate.clone(),
                object: target.label.clone(),
                unit: unit.clone(),
                paper_id: paper_id.to_string(),
                path: path.clone(),
                evidence: subject.evidence.clone(),
                inferred: edge.inferred,
                object_evidence: target.evidence.clone(),
                object_role: target.role,
                object_table: target.table_ref,
            });
            emit_bindings(target, &path, unit, paper_id, out);
        }
    }
}

/// Rebuilds a document from the triples of one paper. The paper record
/// only gets its id back; title and task are not carried by triples.
pub fn unflatten(triples: &[Triple]) -> Result<AnnotationDocument> {
    let Some(first) = triples.first() else {
        return Ok(AnnotationDocument::default());
    };
    let paper_id = first.paper_id.clone();
    let mut by_path: BTreeMap<&[u32], &Triple> = BTreeMap::new();
    for triple in triples {
        if triple.paper_id != paper_id {
            return Err(inconsistent(format!(
                "triples mix papers {paper_id:?} and {:?}",
                triple.paper_id
            )));
        }
        if triple.path.len() % 2 == 0 {
            return Err(inconsistent(format!("path {:?} has even length", triple.path)));
        }
        if by_path.insert(&triple.path, triple).is_some() {
            return Err(inconsistent(format!("path {:?} occurs twice", triple.path)));
        }
    }

    // parent path -> children keyed by (edge, target)
    let mut children: HashMap<&[u32], BTreeMap<(u32, u32), &Triple>> = HashMap::new();
    let mut unit_triples: BTreeMap<u32, &Triple> = BTreeMap::new();
    for (path, triple) in &by_path {
        if path.len() == 1 {
            unit_triples.insert(path[0], triple);
            continue;
        }
        let parent = &path[..path.len() - 2];
        if !by_path.contains_key(parent) {
            return Err(inconsistent(format!("path {path:?} has no parent")));
        }
        let key = (path[path.len() - 2], path[path.len() - 1]);
        children.entry(parent).or_default().insert(key, triple);
    }

    let mut doc = AnnotationDocument::new(PaperRecord::new(paper_id));
    for (expected, (&index, triple)) in unit_triples.iter().enumerate() {
        if index as usize != expected {
            return Err(inconsistent(format!("unit index {index} is out of sequence")));
        }
        let kind = check_unit_triple(triple)?;
        let body = rebuild_node(triple, &children)?;
        doc.units.push(InfoUnit { kind, body });
    }
    Ok(doc)
}

fn check_unit_triple(triple: &Triple) -> Result<InfoUnitKind> {
    let kind = &triple.unit;
    let expected = canonicalize_unit(&kind.surface_label)
        .map_err(|_| inconsistent(format!("{:?} is not a unit label", kind.surface_label)))?;
    if expected.canonical != kind.canonical
        || triple.subject != CONTRIBUTION_ROOT
        || triple.predicate != kind.canonical.root_predicate()
        || triple.object != kind.surface_label
    {
        return Err(inconsistent(format!(
            "unit attachment at {:?} does not match its unit",
            triple.path
        )));
    }
    Ok(kind.clone())
}

/// Rebuilds the node that `incoming` binds as its object.
fn rebuild_node(
    incoming: &Triple,
    children: &HashMap<&[u32], BTreeMap<(u32, u32), &Triple>>,
) -> Result<SequenceNode> {
    let mut node = SequenceNode {
        label: incoming.object.clone(),
        evidence: incoming.object_evidence.clone(),
        edges: Vec::new(),
        table_ref: incoming.object_table,
        role: incoming.object_role,
    };
    let Some(bindings) = children.get(incoming.path.as_slice()) else {
        return Ok(node);
    };
    for (&(e, t), triple) in bindings {
        if triple.subject != node.label
            || triple.evidence != node.evidence
            || triple.unit != incoming.unit
        {
            return Err(inconsistent(format!(
                "binding {:?} disagrees with its subject",
                triple.path
            )));
        }
        if e as usize == node.edges.len() {
            node.edges.push(PredicateEdge {
                predicate: triple.predicate.clone(),
                inferred: triple.inferred,
                targets: Vec::new(),
            });
        } else if e as usize + 1 != node.edges.len() {
            return Err(inconsistent(format!("edge index gap at {:?}", triple.path)));
        }
        let edge = node.edges.last_mut().expect("pushed above");
        if edge.predicate != triple.predicate || edge.inferred != triple.inferred {
            return Err(inconsistent(format!(
                "edge at {:?} changes predicate between targets",
                triple.path
            )));
        }
        if t as usize != edge.targets.len() {
            return Err(inconsistent(format!("target index gap at {:?}", triple.path)));
        }
        edge.targets.push(rebuild_node(triple, children)?);
    }
    Ok(node)
}

fn inconsistent(message: String) -> Error {
    Error::InconsistentPaths(message)
}
