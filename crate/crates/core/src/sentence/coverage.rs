use std::collections::HashMap;

use serde::Serialize;

use super::{canonical_sentences, SentencePool, SplitterConfig};
use crate::classify::{AutoCategory, FilterRuleSet};
use crate::ingest::ReportCorpus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoveragePoint {
    /// Number of top-ranked positive-candidate sentences assumed tagged.
    pub k: usize,
    pub covered_report_count: usize,
}

/// Number of reports fully covered when the `k` most frequent
/// positive-candidate sentences are tagged, for every `k` from 0 to the
/// number of candidates in the pool.
///
/// A sentence is a positive candidate when no filter rule claims it. Reports
/// with a candidate that is missing from the pool are never covered.
pub fn coverage_curve(
    pool: &SentencePool,
    corpus: &ReportCorpus,
    splitter: &SplitterConfig,
    rules: &FilterRuleSet,
) -> Vec<CoveragePoint> {
    let candidate_rank: HashMap<&str, usize> = pool
        .entries()
        .iter()
        .filter(|e| rules.apply(e.text.as_str()) == AutoCategory::Candidate)
        .enumerate()
        .map(|(i, e)| (e.text.as_str(), i + 1))
        .collect();
    let n = candidate_rank.len();

    // needed[k] = reports whose deepest candidate sits at candidate rank k.
    let mut needed = vec![0usize; n + 1];
    'reports: for study in &corpus.studies {
        let mut deepest = 0;
        for s in canonical_sentences(&study.report_text, splitter) {
            if rules.apply(s.as_str()) != AutoCategory::Candidate {
                continue;
            }
            match candidate_rank.get(s.as_str()) {
                Some(&r) => deepest = deepest.max(r),
                None => continue 'reports,
            }
        }
        needed[deepest] += 1;
    }

    let mut covered = 0;
    needed
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            covered += c;
            CoveragePoint {
                k,
                covered_report_count: covered,
            }
        })
        .collect()
}
