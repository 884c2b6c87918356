#![no_main]

use cxrlabel_core::classify::Ontology;
use cxrlabel_core::eval::{parse_rating_records, parse_ratings};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = parse_rating_records(data);
    if let Ok(matrices) = parse_ratings(data, &Ontology::builtin()) {
        for m in &matrices {
            assert!(m.rater_columns().all(|c| c.len() == m.n_studies()));
        }
    }
});
