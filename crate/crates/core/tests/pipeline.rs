//! Fixture documents through parse, validate, flatten, store and export.

use std::path::Path;

use contribkit::analytics::{stats, Counts, StatsOptions};
use contribkit::diagnostics::Code;
use contribkit::export::{export, Format};
use contribkit::ingest::{infer_predicate_flags, parse_document};
use contribkit::model::{AnnotationDocument, UnitKind};
use contribkit::store::{ContributionGraph, Filter};
use contribkit::triplify::{flatten_with, unflatten};
use contribkit::validate::{check, validate, validate_with, Profile};

fn read(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)).unwrap()
}

fn fixture(name: &str) -> AnnotationDocument {
    parse_document(&read(name)).unwrap()
}

fn fig2_graph() -> ContributionGraph {
    let mut graph = ContributionGraph::new();
    let report = graph.ingest_with(&fixture("fig2.json"), Profile::Fragment).unwrap();
    assert_eq!(report.triples, 4);
    graph
}

#[test]
fn fig2_validates_as_fragment_only() {
    let doc = fixture("fig2.json");
    assert!(validate_with(&doc, Profile::Fragment).is_empty());
    let codes: Vec<Code> = validate(&doc).iter().map(|d| d.code).collect();
    assert_eq!(codes, [Code::MissingMandatoryUnit, Code::MissingMandatoryUnit]);
}

#[test]
fn complete_fixtures_validate_clean() {
    for name in ["fig3.json", "fig6a.json", "fig6b.json", "fig6c.json"] {
        assert_eq!(validate(&fixture(name)), [], "{name}");
    }
}

#[test]
fn missing_results_is_reported() {
    let (_, diagnostics) = check(&read("missing-results.json"), Profile::Complete);
    assert_eq!(diagnostics.len(), 1);
    assert_eq!(diagnostics[0].code, Code::MissingMandatoryUnit);
    assert!(diagnostics[0].message.contains("Results"));
}

#[test]
fn fig2_round_trips() {
    let doc = fixture("fig2.json");
    let triples = flatten_with(&doc, Profile::Fragment).unwrap();
    assert!(unflatten(&triples).unwrap().same_structure(&doc));
}

#[test]
fn fig2_exports() {
    let triples = flatten_with(&fixture("fig2.json"), Profile::Fragment).unwrap();
    let nt = String::from_utf8(export(&triples, Format::NTriples).unwrap()).unwrap();
    assert_eq!(nt.lines().count(), 4);
    assert!(nt.lines().all(|l| l.ends_with(" .")));
    let csv = String::from_utf8(export(&triples, Format::Csv).unwrap()).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(csv.lines().nth(4).unwrap(), "fig2,Results,NER,F1-score,91.57%");
}

#[test]
fn store_filters_on_fixtures() {
    let graph = fig2_graph();
    let has = Filter { predicate: Some("has".into()), ..Default::default() };
    assert_eq!(graph.query(&has).len(), 2);

    let mut graph = ContributionGraph::new();
    graph.ingest(&fixture("fig3.json")).unwrap();
    let bert = Filter {
        paper_id: Some("lee2020biobert".into()),
        subject: Some("BERTBase model".into()),
        ..Default::default()
    };
    assert_eq!(graph.query(&bert).len(), 3);
    let setup = Filter { unit: Some(UnitKind::ExperimentalSetup), ..Default::default() };
    assert_eq!(graph.query(&setup).len(), 8);
}

#[test]
fn fig2_statistics_by_hand() {
    let graph = fig2_graph();
    let report = stats(&graph, StatsOptions::default());
    // (Results has CoNLL test set), (CoNLL test set For NER), (NER F1-score 91.57%)
    let three = Counts {
        unique_subjects: 3,
        unique_predicates: 3,
        unique_objects: 3,
        unique_triples: 3,
        total_triples: 3,
    };
    assert_eq!(report.overall, three);
    let with_root = stats(&graph, StatsOptions { exclude_root: false, ..Default::default() });
    // adds (Contribution has Results): "has" is already counted
    assert_eq!(with_root.overall.unique_predicates, 3);
    assert_eq!(with_root.overall.unique_subjects, 4);
    assert_eq!(with_root.predicate_frequencies[0].predicate, "has");
    assert_eq!(with_root.predicate_frequencies[0].count, 2);
}

#[test]
fn predicate_inference_on_fig3() {
    let doc = infer_predicate_flags(fixture("fig3.json"));
    let setup = doc.unit(UnitKind::ExperimentalSetup).unwrap();
    let bert = &setup.body.edges[0].targets[0];
    let flags: Vec<_> = bert.edges.iter().map(|e| (e.predicate.as_str(), e.inferred)).collect();
    assert_eq!(flags, [("pre-trained for", Some(false)), ("pre-trained on", Some(false))]);
    // "has" never occurs in the fig2 text and is in the inferred vocabulary
    let doc = infer_predicate_flags(fixture("fig2.json"));
    assert_eq!(doc.units[0].body.edges[0].inferred, Some(true));
}

#[test]
fn fixture_store_survives_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let mut graph = ContributionGraph::new();
    for name in ["fig3.json", "fig6a.json", "fig6b.json", "fig6c.json"] {
        graph.ingest(&fixture(name)).unwrap();
    }
    graph.save(dir.path()).unwrap();
    let loaded = ContributionGraph::load(dir.path()).unwrap();
    assert_eq!(loaded, graph);
    assert_eq!(loaded.paper("lee2020biobert").unwrap().title, graph.paper("lee2020biobert").unwrap().title);
}
