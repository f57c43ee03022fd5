#![no_main]

use entwit_core::document::MatrixDocument;
use libfuzzer_sys::fuzz_target;

// Any document that parses must serialize canonically and reparse to the
// same canonical bytes (serialize . parse is idempotent).
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = MatrixDocument::parse(text) else {
        return;
    };
    let canonical = doc.serialize();
    let reparsed = MatrixDocument::parse(&canonical).expect("canonical form reparses");
    assert_eq!(canonical, reparsed.serialize(), "canonical form is not stable");
});
