#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing arbitrary bytes must never panic; malformed documents are
// rejected with an error.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = entwit_core::document::MatrixDocument::parse(text);
    }
});
