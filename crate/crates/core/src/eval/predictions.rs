use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::classify::{FindingId, Ontology, N_FINDINGS};
use crate::error::{Error, Result};

/// Per-study model confidences for all 40 findings.
///
/// CSV layout: `study_id` followed by one column per finding, headed by the
/// finding name. Columns may come in any order; lines starting with `#` are
/// comments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Predictions {
    study_ids: Vec<String>,
    rows: Vec<[f64; N_FINDINGS]>,
    index: HashMap<String, usize>,
}

impl Predictions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, study_id: impl Into<String>, confidences: [f64; N_FINDINGS]) -> Result<()> {
        let study_id = study_id.into();
        if let Some(bad) = confidences.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::InvalidInput(format!(
                "confidence {bad} for study {study_id:?} outside [0, 1]"
            )));
        }
        if self.index.contains_key(&study_id) {
            return Err(Error::InvalidInput(format!("duplicate study {study_id:?}")));
        }
        self.index.insert(study_id.clone(), self.rows.len());
        self.study_ids.push(study_id);
        self.rows.push(confidences);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, study_id: &str) -> Option<&[f64; N_FINDINGS]> {
        self.index.get(study_id).map(|&i| &self.rows[i])
    }

    pub fn confidence(&self, study_id: &str, finding: FindingId) -> Option<f64> {
        self.get(study_id).map(|row| row[finding.index()])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64; N_FINDINGS])> {
        self.study_ids.iter().map(String::as_str).zip(&self.rows)
    }

    pub fn read_csv<R: Read>(input: R, ontology: &Ontology) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let headers = r
            .headers()
            .map_err(|e| Error::malformed("predictions", Some(1), e))?
            .clone();
        if headers.len() != N_FINDINGS + 1 || &headers[0] != "study_id" {
            return Err(Error::malformed(
                "predictions",
                Some(1),
                format!("expected study_id and {N_FINDINGS} finding columns"),
            ));
        }
        let mut columns = Vec::with_capacity(N_FINDINGS);
        let mut seen = [false; N_FINDINGS];
        for name in headers.iter().skip(1) {
            let id = ontology
                .canonical_finding(name)
                .map_err(|e| Error::malformed("predictions", Some(1), e))?;
            if std::mem::replace(&mut seen[id.index()], true) {
                return Err(Error::malformed("predictions", Some(1), format!("duplicate column {name:?}")));
            }
            columns.push(id);
        }

        let mut out = Predictions::new();
        for record in r.records() {
            let record = record.map_err(|e| Error::malformed("predictions", None, e))?;
            let line = record.position().map(|p| p.line() as usize);
            let mut row = [0.0; N_FINDINGS];
            for (field, id) in record.iter().skip(1).zip(&columns) {
                row[id.index()] = field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::malformed("predictions", line, format!("{field:?}: {e}")))?;
            }
            out.insert(&record[0], row)
                .map_err(|e| Error::malformed("predictions", line, e))?;
        }
        Ok(out)
    }

    pub fn load_csv(path: impl AsRef<Path>, ontology: &Ontology) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, ontology)
    }

    pub fn write_csv<W: Write>(&self, out: W, ontology: &Ontology) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::malformed("predictions", None, e);
        let mut header = vec!["study_id".to_string()];
        header.extend(ontology.names().map(|(_, n)| n.to_string()));
        w.write_record(&header).map_err(err)?;
        for (id, row) in self.iter() {
            let mut rec = vec![id.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(err)?;
        }
        w.flush().map_err(|e| Error::io("<predictions>", e))
    }
}
