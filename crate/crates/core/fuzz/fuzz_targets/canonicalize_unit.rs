#![no_main]

use contribkit::model::canonicalize_unit;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|label: &str| {
    if let Ok(kind) = canonicalize_unit(label) {
        assert_eq!(canonicalize_unit(&kind.surface_label).unwrap(), kind);
        assert_eq!(canonicalize_unit(kind.canonical.name()).unwrap().canonical, kind.canonical);
    }
});
