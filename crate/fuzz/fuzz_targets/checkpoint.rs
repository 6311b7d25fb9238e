#![no_main]

use libfuzzer_sys::fuzz_target;

// The checkpoint parser guards search resumption: no panics on garbage, and
// accepted snapshots round-trip exactly.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ck) = coverfam::checkpoint::parse_checkpoint(text) {
        let canonical = coverfam::checkpoint::serialize_checkpoint(&ck);
        let reparsed = coverfam::checkpoint::parse_checkpoint(&canonical)
            .expect("serializer output must parse");
        assert_eq!(reparsed, ck);
    }
});
