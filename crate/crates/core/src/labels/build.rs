use super::{Coverage, LabelVector, LabeledStudy, Policy};
use crate::classify::ReportAnalysis;

/// Turn report analyses into labeled studies.
///
/// Excluded reports are dropped under both policies. `FullyCovered` keeps
/// reports with no untagged candidate sentence, normal reports included.
/// `AnyHit` also keeps reports with untagged candidates provided at least
/// one positive finding was recognized; their unrecognized findings end up
/// as negatives.
pub fn build_label_sets(analyses: &[ReportAnalysis], policy: Policy) -> Vec<LabeledStudy> {
    analyses
        .iter()
        .filter(|a| !a.excluded)
        .filter_map(|a| {
            let coverage = if !a.has_unknown_candidate {
                Coverage::FullyCovered
            } else if policy == Policy::AnyHit && !a.positive_findings.is_empty() {
                Coverage::AnyHitOnly
            } else {
                return None;
            };
            Some(LabeledStudy {
                study_id: a.study_id.clone(),
                patient_id: a.patient_id.clone(),
                labels: LabelVector::from_findings(a.positive_findings),
                coverage,
                partition: None,
            })
        })
        .collect()
}
