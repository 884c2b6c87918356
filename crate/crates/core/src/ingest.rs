//! Loading and validating raw report records.
//!
//! The reports file holds one JSON object per line:
//!
//! ```text
//! {"study_id":"s1","patient_id":"p1","age_years":40,"report_text":"...","has_pa":true,"has_lateral":true}
//! ```
//!
//! `has_lateral` is optional and defaults to `false`. Blank lines are ignored.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_AGE_YEARS: u32 = 18;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub study_id: String,
    pub patient_id: String,
    pub age_years: u32,
    pub report_text: String,
    pub has_pa: bool,
    #[serde(default)]
    pub has_lateral: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    MissingPa,
    UnderAge,
    EmptyReport,
    DuplicateId,
    Malformed,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::MissingPa => "missing_pa",
            RejectReason::UnderAge => "under_age",
            RejectReason::EmptyReport => "empty_report",
            RejectReason::DuplicateId => "duplicate_id",
            RejectReason::Malformed => "malformed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    /// 1-based line number in the source file.
    pub line: usize,
    pub raw: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportCorpus {
    pub studies: Vec<StudyRecord>,
    pub rejected: Vec<Rejected>,
}

impl ReportCorpus {
    pub fn from_studies(studies: Vec<StudyRecord>) -> Self {
        ReportCorpus {
            studies,
            rejected: Vec::new(),
        }
    }

    pub fn input_records(&self) -> usize {
        self.studies.len() + self.rejected.len()
    }
}

/// Check a parsed record against the acceptance constraints, excluding the
/// duplicate-id check which needs corpus context.
pub fn check_record(record: &StudyRecord) -> Option<RejectReason> {
    if !record.has_pa {
        Some(RejectReason::MissingPa)
    } else if record.age_years < MIN_AGE_YEARS {
        Some(RejectReason::UnderAge)
    } else if record.report_text.trim().is_empty() {
        Some(RejectReason::EmptyReport)
    } else {
        None
    }
}

pub fn load_reports(path: impl AsRef<Path>, strict: bool) -> Result<ReportCorpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_reports(BufReader::new(file), strict).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn parse_reports(text: &[u8], strict: bool) -> Result<ReportCorpus> {
    read_reports(text, strict)
}

pub fn read_reports<R: BufRead>(mut reader: R, strict: bool) -> Result<ReportCorpus> {
    let mut corpus = ReportCorpus::default();
    let mut seen: HashSet<String> = HashSet::new();
    let mut buf = Vec::new();
    let mut line_no = 0usize;

    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io("<reports>", e))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let raw = String::from_utf8_lossy(&buf);
        let line = raw.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            continue;
        }

        let parsed = std::str::from_utf8(&buf)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str::<StudyRecord>(s).map_err(|e| e.to_string()));
        let record = match parsed {
            Ok(r) => r,
            Err(detail) => {
                if strict {
                    return Err(Error::malformed("report record", Some(line_no), detail));
                }
                corpus.rejected.push(Rejected {
                    line: line_no,
                    raw: line.to_string(),
                    reason: RejectReason::Malformed,
                });
                continue;
            }
        };

        let reason = check_record(&record).or_else(|| {
            (!seen.insert(record.study_id.clone())).then_some(RejectReason::DuplicateId)
        });
        match reason {
            None => corpus.studies.push(record),
            Some(reason) => corpus.rejected.push(Rejected {
                line: line_no,
                raw: line.to_string(),
                reason,
            }),
        }
    }
    Ok(corpus)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub input_records: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub with_lateral: usize,
    /// Fraction of accepted studies with a lateral view; 0 for an empty corpus.
    pub lateral_fraction: f64,
    pub rejected_by_reason: BTreeMap<String, usize>,
}

pub fn corpus_stats(corpus: &ReportCorpus) -> CorpusStats {
    let accepted = corpus.studies.len();
    let with_lateral = corpus.studies.iter().filter(|s| s.has_lateral).count();
    let mut rejected_by_reason = BTreeMap::new();
    for r in &corpus.rejected {
        *rejected_by_reason.entry(r.reason.as_str().to_string()).or_insert(0) += 1;
    }
    CorpusStats {
        input_records: corpus.input_records(),
        accepted,
        rejected: corpus.rejected.len(),
        with_lateral,
        lateral_fraction: if accepted == 0 {
            0.0
        } else {
            with_lateral as f64 / accepted as f64
        },
        rejected_by_reason,
    }
}
