#![no_main]

use cxrlabel_core::ingest::{corpus_stats, parse_reports};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(corpus) = parse_reports(data, false) {
        let _ = corpus_stats(&corpus);
    }
    let _ = parse_reports(data, true);
});
