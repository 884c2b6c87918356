#![no_main]

use cxrlabel_core::classify::Ontology;
use cxrlabel_service::EvalSets;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = EvalSets::parse(data, &Ontology::builtin());
});
