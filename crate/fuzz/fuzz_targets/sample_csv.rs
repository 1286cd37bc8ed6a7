#![no_main]

use libfuzzer_sys::fuzz_target;
use maxfield::construction::parse_sample_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sample) = parse_sample_csv(text) {
            let again = parse_sample_csv(&sample.to_csv()).expect("written sample parses");
            assert_eq!(again.n(), sample.n());
            assert_eq!(again.n_sites(), sample.n_sites());
        }
    }
});
