#![no_main]

use cxrlabel_core::classify::FilterRuleSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let (rules, sentence) = data.split_once('\0').unwrap_or((data, "no pneumothorax"));
    if let Ok(rules) = FilterRuleSet::parse(rules) {
        let _ = rules.apply(sentence);
    }
});
