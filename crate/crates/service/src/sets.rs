use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use cxrlabel_core::classify::{FindingId, Ontology};
use cxrlabel_core::eval::PoolOrigin;
use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalStudy {
    pub study_id: String,
    pub pa_image: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lateral_image: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_origin: Option<PoolOrigin>,
    /// Whether the report mentions each finding, keyed by finding name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub report_opinion: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, Deserialize)]
struct RawSet {
    set_id: String,
    findings: Vec<String>,
    studies: Vec<EvalStudy>,
}

#[derive(Debug, Deserialize)]
struct RawFile {
    sets: Vec<RawSet>,
}

/// One evaluation set: studies every rater judges for each listed finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalSet {
    pub set_id: String,
    pub findings: Vec<FindingId>,
    pub studies: Vec<EvalStudy>,
    study_index: HashMap<String, usize>,
}

impl EvalSet {
    pub fn study(&self, study_id: &str) -> Option<&EvalStudy> {
        self.study_index.get(study_id).map(|&i| &self.studies[i])
    }

    /// Report opinion for a study, resolved through the ontology.
    pub fn opinion(&self, study: &EvalStudy, finding: FindingId, ontology: &Ontology) -> Option<bool> {
        study
            .report_opinion
            .iter()
            .find(|(name, _)| ontology.canonical_finding(name).ok() == Some(finding))
            .map(|(_, &v)| v)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalSets {
    sets: Vec<EvalSet>,
}

impl EvalSets {
    /// Parse `{"sets": [{"set_id", "findings", "studies": [...]}]}`.
    pub fn parse(text: &str, ontology: &Ontology) -> Result<Self, ServiceError> {
        let bad = |d: String| ServiceError::Config(format!("eval sets: {d}"));
        let raw: RawFile = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let mut sets = Vec::new();
        let mut ids = HashMap::new();
        for s in raw.sets {
            if ids.insert(s.set_id.clone(), ()).is_some() {
                return Err(bad(format!("duplicate set {:?}", s.set_id)));
            }
            if s.findings.is_empty() {
                return Err(bad(format!("set {:?} lists no findings", s.set_id)));
            }
            let mut findings = Vec::new();
            for name in &s.findings {
                let id = ontology.canonical_finding(name).map_err(|e| bad(e.to_string()))?;
                if findings.contains(&id) {
                    return Err(bad(format!("set {:?} lists {name:?} twice", s.set_id)));
                }
                findings.push(id);
            }
            let mut study_index = HashMap::new();
            for (i, st) in s.studies.iter().enumerate() {
                if study_index.insert(st.study_id.clone(), i).is_some() {
                    return Err(bad(format!("set {:?}: duplicate study {:?}", s.set_id, st.study_id)));
                }
                for name in st.report_opinion.keys() {
                    ontology.canonical_finding(name).map_err(|e| bad(e.to_string()))?;
                }
            }
            sets.push(EvalSet {
                set_id: s.set_id,
                findings,
                studies: s.studies,
                study_index,
            });
        }
        Ok(EvalSets { sets })
    }

    pub fn load(path: impl AsRef<Path>, ontology: &Ontology) -> Result<Self, ServiceError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, ontology)
    }

    pub fn get(&self, set_id: &str) -> Option<&EvalSet> {
        self.sets.iter().find(|s| s.set_id == set_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &EvalSet> {
        self.sets.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}
