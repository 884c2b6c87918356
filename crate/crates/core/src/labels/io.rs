use std::io::{Read, Write};
use std::path::Path;

use super::{LabelVector, LabeledStudy};
use crate::classify::{FindingSet, Ontology, N_FINDINGS};
use crate::error::{Error, Result};

const FIXED: [&str; 4] = ["study_id", "patient_id", "partition", "coverage"];

/// Labels file: the four fixed columns, then one 0/1 column per finding in
/// id order. An unassigned partition is written as an empty field.
pub fn write_labels_csv<W: Write>(studies: &[LabeledStudy], ontology: &Ontology, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::malformed("labels", None, e);
    let mut header: Vec<&str> = FIXED.to_vec();
    header.extend(ontology.names().map(|(_, n)| n));
    w.write_record(&header).map_err(err)?;
    for s in studies {
        let mut rec = vec![
            s.study_id.clone(),
            s.patient_id.clone(),
            s.partition.map(|p| p.as_str().to_string()).unwrap_or_default(),
            s.coverage.as_str().to_string(),
        ];
        rec.extend(s.labels.to_bits().iter().map(|b| b.to_string()));
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("<labels>", e))
}

pub fn read_labels_csv<R: Read>(input: R, ontology: &Ontology) -> Result<Vec<LabeledStudy>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = r.headers().map_err(|e| Error::malformed("labels", Some(1), e))?.clone();
    if headers.len() != FIXED.len() + N_FINDINGS || headers.iter().zip(FIXED).any(|(h, f)| h != f) {
        return Err(Error::malformed(
            "labels",
            Some(1),
            format!("expected {} and {N_FINDINGS} finding columns", FIXED.join(",")),
        ));
    }
    let mut columns = Vec::with_capacity(N_FINDINGS);
    let mut seen = FindingSet::new();
    for name in headers.iter().skip(FIXED.len()) {
        let id = ontology
            .canonical_finding(name)
            .map_err(|e| Error::malformed("labels", Some(1), e))?;
        if seen.contains(id) {
            return Err(Error::malformed("labels", Some(1), format!("duplicate column {name:?}")));
        }
        seen.insert(id);
        columns.push(id);
    }

    let mut out = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| Error::malformed("labels", None, e))?;
        let line = record.position().map(|p| p.line() as usize);
        let bad = |detail: String| Error::malformed("labels", line, detail);
        let partition = match &record[2] {
            "" => None,
            p => Some(p.parse().map_err(bad)?),
        };
        let coverage = record[3].parse().map_err(bad)?;
        let mut labels = FindingSet::new();
        for (field, &id) in record.iter().skip(FIXED.len()).zip(&columns) {
            match field {
                "0" => {}
                "1" => labels.insert(id),
                other => return Err(bad(format!("label {other:?} for {} is not 0 or 1", ontology.name(id)))),
            }
        }
        out.push(LabeledStudy {
            study_id: record[0].to_string(),
            patient_id: record[1].to_string(),
            labels: LabelVector::from_findings(labels),
            coverage,
            partition,
        });
    }
    Ok(out)
}

pub fn load_labels_csv(path: impl AsRef<Path>, ontology: &Ontology) -> Result<Vec<LabeledStudy>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_labels_csv(file, ontology)
}
