#![no_main]

use contribkit::ingest::{parse_bytes, parse_document, to_json_string};
use contribkit::triplify::{flatten_with, unflatten};
use contribkit::validate::{validate_with, Profile};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = parse_bytes(data) else { return };
    let _ = validate_with(&doc, Profile::Complete);
    if !validate_with(&doc, Profile::Fragment).is_empty() {
        return;
    }
    let triples = flatten_with(&doc, Profile::Fragment).expect("clean document flattens");
    let back = unflatten(&triples).expect("own triples rebuild");
    if !doc.units.is_empty() {
        assert!(back.same_structure(&doc), "flatten/unflatten changed the document");
    }
    let text = to_json_string(&doc);
    let reparsed = parse_document(&text).expect("serializer output parses");
    assert_eq!(reparsed, doc, "serialize/parse changed the document");
});
