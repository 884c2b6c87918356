#![no_main]

use cxrlabel_core::sentence::{normalize, segment, SplitterConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let sentences = segment(data, &SplitterConfig::builtin());
    let mut cursor = 0;
    for s in &sentences {
        assert!(s.start >= cursor);
        assert_eq!(&data[s.start..s.start + s.raw_text.len()], s.raw_text);
        cursor = s.start + s.raw_text.len();
        if let Some(c) = normalize(s.raw_text) {
            assert_eq!(normalize(c.as_str()).as_ref(), Some(&c));
        }
    }
});
