#![no_main]

use libfuzzer_sys::fuzz_target;
use maxfield::geometry::parse_sites_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sites) = parse_sites_csv(text) {
            assert!(!sites.is_empty());
            let _ = sites.dedup();
        }
    }
});
