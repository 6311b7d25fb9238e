#![no_main]

use libfuzzer_sys::fuzz_target;

// The family-document parser must never panic on arbitrary input, and
// anything it accepts must round-trip through the serializer.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(family) = coverfam::document::parse_family(text) {
        let canonical = coverfam::document::serialize_family(&family);
        let reparsed = coverfam::document::parse_family(&canonical)
            .expect("serializer output must parse");
        assert_eq!(reparsed, family);
    }
});
