#![no_main]

use cxrlabel_core::classify::{FilterRuleSet, Ontology};
use cxrlabel_service::{App, EvalSets, QueueCoverage, ServiceConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let dir = tempfile::tempdir().unwrap();
    let log_path = dir.path().join("events.jsonl");
    std::fs::write(&log_path, data).unwrap();
    let config = ServiceConfig {
        ontology: Ontology::builtin(),
        rules: FilterRuleSet::builtin(),
        pool: None,
        eval_sets: EvalSets::default(),
        log_path,
        seed: 1,
        queue_coverage: QueueCoverage::Single,
        image_dir: None,
    };
    if let Ok(app) = App::open(config) {
        let _ = app.progress();
    }
});
