#![no_main]

use cxrlabel_core::classify::Ontology;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(ontology) = Ontology::parse(data) {
        for (id, name) in ontology.names() {
            assert_eq!(ontology.canonical_finding(name).ok(), Some(id));
        }
    }
});
