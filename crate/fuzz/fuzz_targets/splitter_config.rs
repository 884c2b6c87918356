#![no_main]

use cxrlabel_core::sentence::{segment, SplitterConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let (config, text) = data.split_once('\0').unwrap_or((data, "Dr. Smith. 1.5 cm? No."));
    let config = SplitterConfig::parse(config);
    let visible = |t: &str| t.chars().filter(|c| !c.is_whitespace()).collect::<String>();
    let joined: String = segment(text, &config).iter().map(|s| visible(s.raw_text)).collect();
    assert_eq!(joined, visible(text));
});
