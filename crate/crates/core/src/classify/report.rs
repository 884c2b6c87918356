use super::{AutoCategory, FilterRuleSet, FindingSet, TagCategory, TagStore};
use crate::ingest::StudyRecord;
use crate::sentence::{canonical_sentences, SplitterConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportAnalysis {
    pub study_id: String,
    pub patient_id: String,
    pub positive_findings: FindingSet,
    /// Some positive-candidate sentence has no human tag.
    pub has_unknown_candidate: bool,
    /// Some sentence is excluding, by rule or by tag.
    pub excluded: bool,
}

/// Classify every sentence of a report and aggregate the verdicts.
///
/// A human tag takes precedence over the filter rules for the same
/// canonical sentence; untagged sentences fall back to the rules.
pub fn classify_report(
    study: &StudyRecord,
    tags: &TagStore,
    rules: &FilterRuleSet,
    splitter: &SplitterConfig,
) -> ReportAnalysis {
    let mut analysis = ReportAnalysis {
        study_id: study.study_id.clone(),
        patient_id: study.patient_id.clone(),
        positive_findings: FindingSet::new(),
        has_unknown_candidate: false,
        excluded: false,
    };
    for sentence in canonical_sentences(&study.report_text, splitter) {
        if let Some(tag) = tags.get(sentence.as_str()) {
            match tag.category {
                TagCategory::Positive => {
                    analysis.positive_findings = analysis.positive_findings.union(tag.findings)
                }
                TagCategory::Excluding => analysis.excluded = true,
                TagCategory::Negative | TagCategory::Neutral => {}
            }
            continue;
        }
        match rules.apply(sentence.as_str()) {
            AutoCategory::Candidate => analysis.has_unknown_candidate = true,
            AutoCategory::Excluding => analysis.excluded = true,
            AutoCategory::Negative | AutoCategory::Neutral => {}
        }
    }
    analysis
}

/// The splitter, rules and tag snapshot needed to classify reports.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub splitter: SplitterConfig,
    pub rules: FilterRuleSet,
    pub tags: TagStore,
}

impl Classifier {
    pub fn classify(&self, study: &StudyRecord) -> ReportAnalysis {
        classify_report(study, &self.tags, &self.rules, &self.splitter)
    }

    /// Classify a batch in parallel; output order follows input order.
    pub fn classify_all(&self, studies: &[StudyRecord]) -> Vec<ReportAnalysis> {
        use rayon::prelude::*;
        studies.par_iter().map(|s| self.classify(s)).collect()
    }
}
