use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FindingSet, Ontology, TagCategory};
use crate::error::{Error, Result};
use crate::events::{EventPayload, TagEvent};
use crate::sentence::normalize;

/// A human verdict on one canonical sentence, as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceTag {
    pub canonical_text: String,
    pub category: TagCategory,
    /// Raw finding names; merged through the ontology on load.
    #[serde(default)]
    pub findings: Vec<String>,
    #[serde(default)]
    pub rater_id: String,
    /// Milliseconds since the Unix epoch.
    #[serde(default)]
    pub timestamp: u64,
}

/// A validated tag with findings resolved to canonical ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedTag {
    pub canonical_text: String,
    pub category: TagCategory,
    pub findings: FindingSet,
    pub rater_id: String,
}

impl SentenceTag {
    /// Check the tag invariants and resolve its findings. Positive tags need
    /// at least one known finding, other categories none.
    pub fn resolve(&self, ontology: &Ontology) -> Result<ResolvedTag> {
        let text = normalize(&self.canonical_text)
            .ok_or_else(|| Error::InvalidInput("tag sentence is empty".into()))?;
        let findings = self
            .findings
            .iter()
            .map(|f| ontology.canonical_finding(f))
            .collect::<Result<FindingSet>>()?;
        match (self.category, findings.is_empty()) {
            (TagCategory::Positive, true) => {
                return Err(Error::InvalidInput("positive tag without findings".into()))
            }
            (c, false) if c != TagCategory::Positive => {
                return Err(Error::InvalidInput(format!("{c} tag must not carry findings")))
            }
            _ => {}
        }
        Ok(ResolvedTag {
            canonical_text: text.into_string(),
            category: self.category,
            findings,
            rater_id: self.rater_id.clone(),
        })
    }
}

/// Effective human tags keyed by canonical sentence; the latest tag for a
/// sentence wins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagStore {
    tags: HashMap<String, ResolvedTag>,
}

impl TagStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse a tag store file. Each line is either a bare [`SentenceTag`]
    /// or an annotation event; rating events are skipped.
    pub fn parse(text: &str, ontology: &Ontology) -> Result<Self> {
        let mut store = TagStore::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = Some(i + 1);
            let value: serde_json::Value =
                serde_json::from_str(line).map_err(|e| Error::malformed("tag store", line_no, e))?;
            let tag = if value.get("payload").is_some() {
                let event: TagEvent = serde_json::from_value(value)
                    .map_err(|e| Error::malformed("tag store", line_no, e))?;
                match event.payload {
                    EventPayload::SentenceTag(tag) => tag,
                    EventPayload::StudyRating(_) => continue,
                }
            } else {
                serde_json::from_value::<SentenceTag>(value)
                    .map_err(|e| Error::malformed("tag store", line_no, e))?
            };
            let resolved = tag.resolve(ontology).map_err(|e| match e {
                Error::UnknownFinding(f) => {
                    Error::malformed("tag store", line_no, format!("unknown finding {f:?}"))
                }
                other => Error::malformed("tag store", line_no, other),
            })?;
            store.insert(resolved);
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>, ontology: &Ontology) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, ontology)
    }

    pub fn insert(&mut self, tag: ResolvedTag) {
        self.tags.insert(tag.canonical_text.clone(), tag);
    }

    pub fn get(&self, canonical_text: &str) -> Option<&ResolvedTag> {
        self.tags.get(canonical_text)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ResolvedTag> {
        self.tags.values()
    }
}
