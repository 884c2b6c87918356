#![no_main]

use cxrlabel::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(config) = RunConfig::parse(data) {
        let _ = config.digest();
    }
});
