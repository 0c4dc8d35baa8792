mod common;

use contribkit::export::{read_jsonl, to_jsonl};
use contribkit::ingest::{parse_document, to_json_string};
use contribkit::store::{ContributionGraph, Filter};
use contribkit::triplify::flatten;
use contribkit::validate::validate;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialized_documents_reparse_identically(seed in any::<u64>()) {
        let doc = common::random_document(&mut common::rng(seed), 0);
        prop_assert!(validate(&doc).is_empty());
        let text = to_json_string(&doc);
        let back = parse_document(&text).expect("serializer output parses");
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(to_json_string(&back), text);
        let triples = flatten(&doc).unwrap();
        prop_assert_eq!(read_jsonl(std::str::from_utf8(&to_jsonl(&triples).unwrap()).unwrap()).unwrap(), triples);
    }

    #[test]
    fn indexed_query_matches_scan(seed in any::<u64>(), pick in any::<prop::sample::Index>(), mask in 0u8..16) {
        let mut rng = common::rng(seed);
        let mut graph = ContributionGraph::new();
        for i in 0..3 {
            graph.ingest(&common::random_document(&mut rng, i)).unwrap();
        }
        let t = pick.get(graph.triples()).clone();
        let filter = Filter {
            paper_id: (mask & 1 != 0).then(|| t.paper_id.clone()),
            unit: (mask & 2 != 0).then_some(t.unit.canonical),
            predicate: (mask & 4 != 0).then(|| t.predicate.clone()),
            subject: (mask & 8 != 0).then(|| t.subject.clone()),
        };
        let scan: Vec<_> = graph.triples().iter().filter(|x| filter.matches(x)).collect();
        let got = graph.query(&filter);
        prop_assert!(got.contains(&&t));
        prop_assert_eq!(got, scan);
    }
}
