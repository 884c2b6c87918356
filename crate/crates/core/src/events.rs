//! Wire types of the annotation event log.
//!
//! The log is line-delimited JSON, one [`TagEvent`] per line, append-only.
//! It doubles as a tag store: [`crate::classify::TagStore`] accepts event
//! lines and picks out the sentence tags.

use serde::{Deserialize, Serialize};

use crate::classify::SentenceTag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingLabel {
    Present,
    Absent,
}

impl RatingLabel {
    pub fn is_present(self) -> bool {
        self == RatingLabel::Present
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyRating {
    pub set_id: String,
    pub study_id: String,
    pub finding: String,
    #[serde(default)]
    pub rater_id: String,
    pub label: RatingLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventPayload {
    SentenceTag(SentenceTag),
    StudyRating(StudyRating),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagEvent {
    pub event_id: u64,
    pub rater_id: String,
    /// Milliseconds since the Unix epoch.
    pub received_at: u64,
    pub payload: EventPayload,
}
