#![no_main]

use cxrlabel_core::classify::Ontology;
use cxrlabel_core::labels::{read_labels_csv, write_labels_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let ontology = Ontology::builtin();
    if let Ok(studies) = read_labels_csv(data, &ontology) {
        let mut out = Vec::new();
        write_labels_csv(&studies, &ontology, &mut out).unwrap();
        assert_eq!(read_labels_csv(out.as_slice(), &ontology).unwrap(), studies);
    }
});
