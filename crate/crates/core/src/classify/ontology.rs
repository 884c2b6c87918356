use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const N_FINDINGS: usize = 40;

const BUILTIN_ONTOLOGY: &str = include_str!("../../data/ontology.json");

/// Finding identifier, 1 through 40.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct FindingId(u8);

impl FindingId {
    pub fn new(id: u8) -> Option<Self> {
        (1..=N_FINDINGS as u8).contains(&id).then_some(FindingId(id))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// 0-based position in a label vector.
    pub fn index(self) -> usize {
        usize::from(self.0) - 1
    }

    pub fn from_index(index: usize) -> Option<Self> {
        u8::try_from(index + 1).ok().and_then(Self::new)
    }

    pub fn all() -> impl Iterator<Item = FindingId> {
        (1..=N_FINDINGS as u8).map(FindingId)
    }
}

impl TryFrom<u8> for FindingId {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        FindingId::new(v).ok_or_else(|| format!("finding id {v} outside 1..={N_FINDINGS}"))
    }
}

impl From<FindingId> for u8 {
    fn from(id: FindingId) -> u8 {
        id.0
    }
}

impl fmt::Display for FindingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Set of findings as a 40-bit mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct FindingSet(u64);

impl FindingSet {
    pub fn new() -> Self {
        FindingSet(0)
    }

    pub fn insert(&mut self, id: FindingId) {
        self.0 |= 1 << id.index();
    }

    pub fn contains(self, id: FindingId) -> bool {
        self.0 & (1 << id.index()) != 0
    }

    pub fn union(self, other: FindingSet) -> FindingSet {
        FindingSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: FindingSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = FindingId> {
        FindingId::all().filter(move |&id| self.contains(id))
    }

    pub fn bits(self) -> u64 {
        self.0
    }
}

impl FromIterator<FindingId> for FindingSet {
    fn from_iter<I: IntoIterator<Item = FindingId>>(iter: I) -> Self {
        let mut s = FindingSet::new();
        for id in iter {
            s.insert(id);
        }
        s
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct OntologyFile {
    findings: Vec<FindingEntry>,
    #[serde(default)]
    merges: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct FindingEntry {
    id: u8,
    name: String,
}

fn key(name: &str) -> String {
    name.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// The 40 canonical findings plus a merge map from raw finding names onto
/// them (e.g. "osteoporosis" onto "osteopenia").
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    names: Vec<String>,
    by_name: HashMap<String, FindingId>,
    merges: BTreeMap<String, FindingId>,
}

impl Ontology {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_ONTOLOGY).expect("builtin ontology is valid")
    }

    /// Parse the ontology JSON: `{"findings":[{"id":1,"name":...}], "merges":{raw: canonical}}`.
    /// Ids must be exactly 1..=40 and every merge target a canonical name.
    pub fn parse(text: &str) -> Result<Self> {
        let file: OntologyFile =
            serde_json::from_str(text).map_err(|e| Error::malformed("ontology", None, e))?;
        if file.findings.len() != N_FINDINGS {
            return Err(Error::InvalidOntology(format!(
                "expected {N_FINDINGS} findings, found {}",
                file.findings.len()
            )));
        }
        let mut names = vec![String::new(); N_FINDINGS];
        let mut by_name = HashMap::new();
        for entry in &file.findings {
            let id = FindingId::new(entry.id)
                .ok_or_else(|| Error::InvalidOntology(format!("finding id {} out of range", entry.id)))?;
            let name = key(&entry.name);
            if name.is_empty() {
                return Err(Error::InvalidOntology(format!("finding {id} has an empty name")));
            }
            if !names[id.index()].is_empty() {
                return Err(Error::InvalidOntology(format!("duplicate finding id {id}")));
            }
            if by_name.insert(name.clone(), id).is_some() {
                return Err(Error::InvalidOntology(format!("duplicate finding name {name:?}")));
            }
            names[id.index()] = name;
        }
        let mut merges = BTreeMap::new();
        for (raw, target) in &file.merges {
            let id = by_name.get(&key(target)).copied().ok_or_else(|| {
                Error::InvalidOntology(format!("merge {raw:?} targets unknown finding {target:?}"))
            })?;
            let raw = key(raw);
            if let Some(&own) = by_name.get(&raw) {
                if own != id {
                    return Err(Error::InvalidOntology(format!(
                        "merge would redirect canonical finding {raw:?}"
                    )));
                }
            }
            merges.insert(raw, id);
        }
        Ok(Ontology {
            names,
            by_name,
            merges,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn name(&self, id: FindingId) -> &str {
        &self.names[id.index()]
    }

    pub fn names(&self) -> impl Iterator<Item = (FindingId, &str)> {
        FindingId::all().map(move |id| (id, self.name(id)))
    }

    pub fn merges(&self) -> impl Iterator<Item = (&str, FindingId)> {
        self.merges.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Resolve a raw finding name (canonical or merged) to its finding.
    /// Matching ignores case and whitespace runs.
    pub fn canonical_finding(&self, raw_name: &str) -> Result<FindingId> {
        let k = key(raw_name);
        self.by_name
            .get(&k)
            .or_else(|| self.merges.get(&k))
            .copied()
            .ok_or_else(|| Error::UnknownFinding(raw_name.to_string()))
    }

    pub fn to_json(&self) -> String {
        let file = OntologyFile {
            findings: self
                .names()
                .map(|(id, name)| FindingEntry {
                    id: id.get(),
                    name: name.to_string(),
                })
                .collect(),
            merges: self
                .merges
                .iter()
                .map(|(k, &v)| (k.clone(), self.name(v).to_string()))
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("ontology serializes")
    }
}
