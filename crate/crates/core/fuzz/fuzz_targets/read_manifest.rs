#![no_main]

use contribkit::store::read_manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(manifest) = read_manifest(text) {
        let again = serde_json::to_string(&manifest).expect("manifest serializes");
        assert_eq!(read_manifest(&again).expect("round trip"), manifest);
    }
});
