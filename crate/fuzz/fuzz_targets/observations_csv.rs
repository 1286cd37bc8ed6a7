#![no_main]

use libfuzzer_sys::fuzz_target;
use maxfield::inference::parse_observations_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(obs) = parse_observations_csv(text) {
            let again = parse_observations_csv(&obs.to_csv()).expect("written observations parse");
            assert_eq!(again, obs);
            let _ = obs.block_maxima(2);
        }
    }
});
