//! Sentence segmentation, canonicalization, the ranked sentence pool and
//! the tagging coverage curve.

mod coverage;
mod normalize;
mod pool;
mod segment;

pub use coverage::{coverage_curve, CoveragePoint};
pub use normalize::{normalize, CanonicalSentence};
pub use pool::{build_sentence_pool, canonical_sentences, PoolEntry, SentencePool};
pub use segment::{segment, Sentence, SplitterConfig};
