#![no_main]

use cxrlabel_core::classify::{Ontology, TagStore};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let _ = TagStore::parse(data, &Ontology::builtin());
});
