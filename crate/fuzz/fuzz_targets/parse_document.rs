//! Any byte string through the document parser: no panics, and every
//! accepted document survives serialize → parse unchanged.
#![no_main]
use libfuzzer_sys::fuzz_target;

use hbgrowth::schema::parse_document;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let doc = match parse_document(text) {
        Ok(d) => d,
        Err(e) => {
            let _ = e.to_string();
            return;
        }
    };
    let again = parse_document(&doc.to_json_pretty()).expect("serialized document parses");
    assert_eq!(doc, again);
});
