#![no_main]

use lazy_oco::harness::{RunConfig, SweepSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = RunConfig::from_json(text) {
        RunConfig::from_json(&cfg.to_json()).expect("serialized config parses");
        let _ = SweepSpec::from_config(&cfg);
    }
});
