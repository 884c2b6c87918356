use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use serde::Serialize;

use super::LabeledStudy;
use crate::classify::{FindingId, Ontology};
use crate::error::{Error, Result};
use crate::eval::RatingMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PolicyNoise {
    /// Share of report-positive studies present in the training set.
    pub pct_included: Option<f64>,
    /// Share of the included ones whose training label is positive.
    pub pct_correct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRow {
    pub finding: FindingId,
    /// Distinct report-positive evaluation studies.
    pub n_report_positive: usize,
    pub fully_covered: PolicyNoise,
    pub any_hit: PolicyNoise,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct NoiseReport {
    /// One row per finding that has a rating matrix with report opinions.
    pub rows: Vec<NoiseRow>,
}

fn pct(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

fn policy_noise(finding: FindingId, positives: &BTreeSet<&str>, set: &[LabeledStudy]) -> PolicyNoise {
    let by_id: HashMap<&str, &LabeledStudy> = set.iter().map(|s| (s.study_id.as_str(), s)).collect();
    let included: Vec<&LabeledStudy> = positives.iter().filter_map(|id| by_id.get(id).copied()).collect();
    let correct = included.iter().filter(|s| s.labels.get(finding)).count();
    PolicyNoise {
        pct_included: pct(included.len(), positives.len()),
        pct_correct: pct(correct, included.len()),
    }
}

/// How many studies whose report mentions a finding made it into each
/// training set, and how many of those carry the positive label.
///
/// The reference is the report opinion recorded with each rating matrix;
/// matrices without one are skipped. Studies are matched by id.
pub fn estimate_label_noise(
    matrices: &[RatingMatrix],
    fully_covered: &[LabeledStudy],
    any_hit: &[LabeledStudy],
) -> NoiseReport {
    let mut positives: HashMap<FindingId, BTreeSet<&str>> = HashMap::new();
    for m in matrices {
        let Some(opinion) = &m.report_opinion else { continue };
        let entry = positives.entry(m.finding).or_default();
        for (study, &pos) in m.studies.iter().zip(opinion) {
            if pos {
                entry.insert(study);
            }
        }
    }
    let mut findings: Vec<FindingId> = positives.keys().copied().collect();
    findings.sort();
    let rows = findings
        .into_iter()
        .map(|finding| {
            let set = &positives[&finding];
            NoiseRow {
                finding,
                n_report_positive: set.len(),
                fully_covered: policy_noise(finding, set, fully_covered),
                any_hit: policy_noise(finding, set, any_hit),
            }
        })
        .collect();
    NoiseReport { rows }
}

/// CSV with one row per finding; undefined percentages are written `NA`.
pub fn write_noise_csv<W: Write>(report: &NoiseReport, ontology: &Ontology, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::malformed("noise report", None, e);
    w.write_record([
        "finding",
        "n_report_positive",
        "fully_covered_pct_included",
        "fully_covered_pct_correct",
        "any_hit_pct_included",
        "any_hit_pct_correct",
    ])
    .map_err(err)?;
    let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| format!("{v:.1}"));
    for r in &report.rows {
        w.write_record([
            ontology.name(r.finding).to_string(),
            r.n_report_positive.to_string(),
            fmt(r.fully_covered.pct_included),
            fmt(r.fully_covered.pct_correct),
            fmt(r.any_hit.pct_included),
            fmt(r.any_hit.pct_correct),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("<noise report>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{Coverage, LabelVector};

    fn labeled(id: &str, findings: &[u8]) -> LabeledStudy {
        LabeledStudy {
            study_id: id.into(),
            patient_id: id.into(),
            labels: LabelVector::from_findings(findings.iter().map(|&f| FindingId::new(f).unwrap()).collect()),
            coverage: Coverage::FullyCovered,
            partition: None,
        }
    }

    fn matrix(finding: u8, opinion: &[bool]) -> RatingMatrix {
        let studies: Vec<String> = (0..opinion.len()).map(|i| format!("s{i}")).collect();
        let values = vec![vec![false; opinion.len()]; 3];
        RatingMatrix::new(
            "set",
            FindingId::new(finding).unwrap(),
            studies,
            vec!["a".into(), "b".into(), "c".into()],
            values,
        )
        .unwrap()
        .with_report_opinion(opinion.to_vec())
        .unwrap()
    }

    #[test]
    fn six_study_fixture() {
        // Report-positive: s0..s3. Fully covered holds s0, s1; any-hit adds s2.
        // s1 is mislabeled negative in both.
        let m = matrix(5, &[true, true, true, true, false, false]);
        let fc = vec![labeled("s0", &[5]), labeled("s1", &[]), labeled("s4", &[])];
        let mut ah = fc.clone();
        ah.push(labeled("s2", &[5]));
        let r = estimate_label_noise(&[m], &fc, &ah);
        let row = &r.rows[0];
        assert_eq!(row.n_report_positive, 4);
        assert_eq!(row.fully_covered.pct_included, Some(50.0));
        assert_eq!(row.fully_covered.pct_correct, Some(50.0));
        assert_eq!(row.any_hit.pct_included, Some(75.0));
        assert_eq!(row.any_hit.pct_correct, Some(100.0 * 2.0 / 3.0));
    }

    #[test]
    fn empty_denominators() {
        let m = matrix(5, &[false, true]);
        let r = estimate_label_noise(&[m], &[], &[]);
        assert_eq!(r.rows[0].fully_covered.pct_included, Some(0.0));
        assert_eq!(r.rows[0].fully_covered.pct_correct, None);
        let m = matrix(5, &[false, false]);
        let r = estimate_label_noise(&[m], &[], &[]);
        assert_eq!(r.rows[0].any_hit.pct_included, None);

        let mut buf = Vec::new();
        write_noise_csv(&r, &Ontology::builtin(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",0,NA,NA,NA,NA"), "{text}");
    }
}
