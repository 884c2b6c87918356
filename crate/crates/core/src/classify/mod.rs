//! Sentence categories, filter rules, the finding ontology, the human tag
//! store and per-report classification.

mod ontology;
mod report;
mod rules;
mod tags;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use ontology::{FindingId, FindingSet, Ontology, N_FINDINGS};
pub use report::{classify_report, Classifier, ReportAnalysis};
pub use rules::{FilterRule, FilterRuleSet};
pub use tags::{ResolvedTag, SentenceTag, TagStore};

/// Verdict of the regex pre-filter. `Candidate` means no rule matched and
/// the sentence may be positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoCategory {
    Negative,
    Neutral,
    Excluding,
    Candidate,
}

/// Category a human (or the rules) assigns to a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagCategory {
    Positive,
    Negative,
    Neutral,
    Excluding,
}

impl TagCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            TagCategory::Positive => "positive",
            TagCategory::Negative => "negative",
            TagCategory::Neutral => "neutral",
            TagCategory::Excluding => "excluding",
        }
    }
}

impl fmt::Display for TagCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TagCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(TagCategory::Positive),
            "negative" => Ok(TagCategory::Negative),
            "neutral" => Ok(TagCategory::Neutral),
            "excluding" => Ok(TagCategory::Excluding),
            other => Err(format!("unknown category {other:?}")),
        }
    }
}
