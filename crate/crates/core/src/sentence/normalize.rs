use std::fmt;

use serde::{Deserialize, Serialize};

/// A sentence in canonical form: lowercase, single spaces, no trailing
/// terminal punctuation except one retained `?`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalSentence(String);

impl CanonicalSentence {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for CanonicalSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CanonicalSentence {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Canonicalize a raw sentence. Returns `None` for degenerate input that
/// normalizes to nothing (blank, or punctuation only).
pub fn normalize(raw: &str) -> Option<CanonicalSentence> {
    let lower = raw.to_lowercase();
    let mut collapsed = String::with_capacity(lower.len());
    for word in lower.split_whitespace() {
        if !collapsed.is_empty() {
            collapsed.push(' ');
        }
        collapsed.push_str(word);
    }

    let mut question = false;
    let core = collapsed.trim_end_matches(|c: char| {
        question |= c == '?';
        matches!(c, '.' | '?' | ';' | '!' | ' ')
    });
    if core.is_empty() {
        return None;
    }
    let mut text = core.to_string();
    if question {
        text.push('?');
    }
    Some(CanonicalSentence(text))
}
