#![no_main]

use libfuzzer_sys::fuzz_target;
use maxfield::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = RunConfig::from_toml_str(text) {
            let _ = cfg.validate();
            let _ = RunConfig::from_toml_str(&cfg.to_toml_string());
        }
    }
});
