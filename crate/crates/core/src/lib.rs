//! Mining free-text chest X-ray reports into a multi-label training corpus.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`ingest`] loads line-delimited report records and applies the
//!   acceptance constraints (frontal PA view, adult patient, non-empty text).
//! * [`sentence`] splits reports into sentences, canonicalizes them, builds
//!   the frequency-ranked sentence pool and the tagging coverage curve.
//! * [`classify`] applies ordered regex filters and human sentence tags to
//!   each report, mapping positive sentences onto the 40-finding ontology.
//! * [`labels`] turns report analyses into labeled studies under the
//!   fully-covered and any-hit policies, splits them by patient, and
//!   selects validation and test subsets.
//! * [`eval`] holds the agreement-rate statistics, bootstrap intervals,
//!   threshold selection, ROC/AUC, the training loss and heat maps.

pub mod classify;
pub mod error;
pub mod eval;
pub mod events;
pub mod hash;
pub mod ingest;
pub mod labels;
pub mod sentence;

pub use error::{Error, Result};
