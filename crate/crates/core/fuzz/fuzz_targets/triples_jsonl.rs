#![no_main]

use contribkit::export::read_jsonl;
use contribkit::triplify::{flatten_unchecked, unflatten};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(triples) = read_jsonl(text) else { return };
    if let Ok(doc) = unflatten(&triples) {
        assert_eq!(flatten_unchecked(&doc).len(), triples.len());
    }
});
