use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use crate::classify::{FindingId, Ontology};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolOrigin {
    PosPool,
    NegPool,
}

/// Binary judgments of several raters on one finding over a list of
/// studies. Complete by construction: every (study, rater) cell is set.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMatrix {
    pub set_id: String,
    pub finding: FindingId,
    pub studies: Vec<String>,
    pub raters: Vec<String>,
    /// `values[r][s]` is rater `r`'s judgment on study `s`.
    values: Vec<Vec<bool>>,
    /// What the original report says, when known.
    pub report_opinion: Option<Vec<bool>>,
    pub pool_origin: Option<Vec<PoolOrigin>>,
}

impl RatingMatrix {
    pub fn new(
        set_id: impl Into<String>,
        finding: FindingId,
        studies: Vec<String>,
        raters: Vec<String>,
        values: Vec<Vec<bool>>,
    ) -> Result<Self> {
        if values.len() != raters.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: raters.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| v.len() != studies.len()) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: studies.len(),
            });
        }
        Ok(RatingMatrix {
            set_id: set_id.into(),
            finding,
            studies,
            raters,
            values,
            report_opinion: None,
            pool_origin: None,
        })
    }

    pub fn with_report_opinion(mut self, opinion: Vec<bool>) -> Result<Self> {
        if opinion.len() != self.studies.len() {
            return Err(Error::LengthMismatch {
                left: opinion.len(),
                right: self.studies.len(),
            });
        }
        self.report_opinion = Some(opinion);
        Ok(self)
    }

    pub fn with_pool_origin(mut self, origin: Vec<PoolOrigin>) -> Result<Self> {
        if origin.len() != self.studies.len() {
            return Err(Error::LengthMismatch {
                left: origin.len(),
                right: self.studies.len(),
            });
        }
        self.pool_origin = Some(origin);
        Ok(self)
    }

    pub fn n_studies(&self) -> usize {
        self.studies.len()
    }

    pub fn n_raters(&self) -> usize {
        self.raters.len()
    }

    pub fn rater(&self, r: usize) -> &[bool] {
        &self.values[r]
    }

    pub fn rater_columns(&self) -> impl Iterator<Item = &[bool]> {
        self.values.iter().map(Vec::as_slice)
    }

    /// A matrix over the given study indices (repeats allowed), as drawn by
    /// a bootstrap resample.
    pub fn resample(&self, indices: &[usize]) -> RatingMatrix {
        let pick = |v: &Vec<bool>| indices.iter().map(|&i| v[i]).collect::<Vec<_>>();
        RatingMatrix {
            set_id: self.set_id.clone(),
            finding: self.finding,
            studies: indices.iter().map(|&i| self.studies[i].clone()).collect(),
            raters: self.raters.clone(),
            values: self.values.iter().map(pick).collect(),
            report_opinion: self.report_opinion.as_ref().map(pick),
            pool_origin: self
                .pool_origin
                .as_ref()
                .map(|p| indices.iter().map(|&i| p[i]).collect()),
        }
    }

    pub fn pool_counts(&self) -> Option<(usize, usize)> {
        self.pool_origin.as_ref().map(|p| {
            let pos = p.iter().filter(|&&o| o == PoolOrigin::PosPool).count();
            (pos, p.len() - pos)
        })
    }
}

/// A binary judgment on the wire: `0`/`1`, `true`/`false`, or
/// `"present"`/`"absent"`. Always written as `0`/`1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Binary(pub bool);

impl Serialize for Binary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(self.0))
    }
}

impl<'de> Deserialize<'de> for Binary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Bool(bool),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(0) | Raw::Bool(false) => Ok(Binary(false)),
            Raw::Int(1) | Raw::Bool(true) => Ok(Binary(true)),
            Raw::Str(s) if s == "present" || s == "1" => Ok(Binary(true)),
            Raw::Str(s) if s == "absent" || s == "0" => Ok(Binary(false)),
            _ => Err(serde::de::Error::custom("expected 0/1, true/false or present/absent")),
        }
    }
}

/// One line of a ratings file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub set_id: String,
    pub finding: String,
    pub study_id: String,
    pub rater_id: String,
    pub label: Binary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_origin: Option<PoolOrigin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_opinion: Option<Binary>,
}

/// Group rating records into one matrix per (set_id, finding), in order of
/// first appearance. A later record for the same (set, finding, study,
/// rater) replaces an earlier one. Fails if a matrix is incomplete or the
/// per-study metadata is contradictory.
pub fn matrices_from_records(records: &[RatingRecord], ontology: &Ontology) -> Result<Vec<RatingMatrix>> {
    struct Builder {
        set_id: String,
        finding: FindingId,
        studies: Vec<String>,
        study_index: HashMap<String, usize>,
        raters: Vec<String>,
        rater_index: HashMap<String, usize>,
        cells: HashMap<(usize, usize), bool>,
        opinion: HashMap<usize, bool>,
        origin: HashMap<usize, PoolOrigin>,
    }

    let mut order: Vec<(String, FindingId)> = Vec::new();
    let mut builders: HashMap<(String, FindingId), Builder> = HashMap::new();

    for (i, rec) in records.iter().enumerate() {
        let line = Some(i + 1);
        let finding = ontology
            .canonical_finding(&rec.finding)
            .map_err(|e| Error::malformed("ratings", line, e))?;
        let key = (rec.set_id.clone(), finding);
        let b = builders.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            Builder {
                set_id: rec.set_id.clone(),
                finding,
                studies: Vec::new(),
                study_index: HashMap::new(),
                raters: Vec::new(),
                rater_index: HashMap::new(),
                cells: HashMap::new(),
                opinion: HashMap::new(),
                origin: HashMap::new(),
            }
        });
        let s = *b.study_index.entry(rec.study_id.clone()).or_insert_with(|| {
            b.studies.push(rec.study_id.clone());
            b.studies.len() - 1
        });
        let r = *b.rater_index.entry(rec.rater_id.clone()).or_insert_with(|| {
            b.raters.push(rec.rater_id.clone());
            b.raters.len() - 1
        });
        b.cells.insert((r, s), rec.label.0);
        if let Some(Binary(op)) = rec.report_opinion {
            if b.opinion.insert(s, op).is_some_and(|prev| prev != op) {
                return Err(Error::malformed(
                    "ratings",
                    line,
                    format!("conflicting report_opinion for study {:?}", rec.study_id),
                ));
            }
        }
        if let Some(origin) = rec.pool_origin {
            if b.origin.insert(s, origin).is_some_and(|prev| prev != origin) {
                return Err(Error::malformed(
                    "ratings",
                    line,
                    format!("conflicting pool_origin for study {:?}", rec.study_id),
                ));
            }
        }
    }

    order
        .into_iter()
        .map(|key| {
            let b = builders.remove(&key).expect("builder exists");
            let values = (0..b.raters.len())
                .map(|r| {
                    (0..b.studies.len())
                        .map(|s| {
                            b.cells.get(&(r, s)).copied().ok_or_else(|| {
                                Error::InvalidInput(format!(
                                    "set {:?}: rater {:?} has no rating for study {:?}",
                                    b.set_id, b.raters[r], b.studies[s]
                                ))
                            })
                        })
                        .collect::<Result<Vec<bool>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let n = b.studies.len();
            let mut m = RatingMatrix::new(b.set_id.clone(), b.finding, b.studies, b.raters, values)?;
            if !b.opinion.is_empty() {
                if b.opinion.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "set {:?}: report_opinion given for only some studies",
                        b.set_id
                    )));
                }
                m = m.with_report_opinion((0..n).map(|s| b.opinion[&s]).collect())?;
            }
            if !b.origin.is_empty() {
                if b.origin.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "set {:?}: pool_origin given for only some studies",
                        b.set_id
                    )));
                }
                m = m.with_pool_origin((0..n).map(|s| b.origin[&s]).collect())?;
            }
            Ok(m)
        })
        .collect()
}

pub fn parse_rating_records(text: &str) -> Result<Vec<RatingRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::malformed("ratings", Some(i + 1), e)))
        .collect()
}

/// Parse a ratings file (line-delimited JSON [`RatingRecord`]s) into matrices.
pub fn parse_ratings(text: &str, ontology: &Ontology) -> Result<Vec<RatingMatrix>> {
    matrices_from_records(&parse_rating_records(text)?, ontology)
}

pub fn load_ratings(path: impl AsRef<Path>, ontology: &Ontology) -> Result<Vec<RatingMatrix>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ratings(&text, ontology)
}

/// Flatten matrices back into ratings-file records.
pub fn matrices_to_records(matrices: &[RatingMatrix], ontology: &Ontology) -> Vec<RatingRecord> {
    let mut out = Vec::new();
    for m in matrices {
        for (s, study) in m.studies.iter().enumerate() {
            for (r, rater) in m.raters.iter().enumerate() {
                out.push(RatingRecord {
                    set_id: m.set_id.clone(),
                    finding: ontology.name(m.finding).to_string(),
                    study_id: study.clone(),
                    rater_id: rater.clone(),
                    label: Binary(m.values[r][s]),
                    pool_origin: m.pool_origin.as_ref().map(|p| p[s]),
                    report_opinion: m.report_opinion.as_ref().map(|o| Binary(o[s])),
                });
            }
        }
    }
    out
}
