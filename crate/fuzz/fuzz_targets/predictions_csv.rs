#![no_main]

use cxrlabel_core::classify::Ontology;
use cxrlabel_core::eval::Predictions;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let ontology = Ontology::builtin();
    if let Ok(p) = Predictions::read_csv(data, &ontology) {
        let mut out = Vec::new();
        p.write_csv(&mut out, &ontology).unwrap();
        let again = Predictions::read_csv(out.as_slice(), &ontology).unwrap();
        assert_eq!(again.len(), p.len());
    }
});
