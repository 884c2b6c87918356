#![no_main]

use cxrlabel_core::sentence::SentencePool;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(pool) = SentencePool::read_csv(data) {
        let mut out = Vec::new();
        pool.write_csv(&mut out).unwrap();
        assert_eq!(SentencePool::read_csv(out.as_slice()).unwrap(), pool);
    }
});
