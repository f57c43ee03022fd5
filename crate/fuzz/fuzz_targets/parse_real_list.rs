#![no_main]

use libfuzzer_sys::fuzz_target;

// The CSV coefficient-row parser used by the prop51 CLI flags: never
// panics, and accepted lists contain only finite numbers.
fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(values) = entwit_core::document::parse_real_list(text) {
            assert!(!values.is_empty());
            assert!(values.iter().all(|x| x.is_finite()));
        }
    }
});
