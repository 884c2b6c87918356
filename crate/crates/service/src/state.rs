use std::collections::{BTreeMap, BTreeSet, HashMap};

use cxrlabel_core::classify::{AutoCategory, FilterRuleSet, SentenceTag};
use cxrlabel_core::eval::{Binary, RatingRecord};
use cxrlabel_core::events::{EventPayload, RatingLabel, TagEvent};
use cxrlabel_core::hash::stable_hash;
use cxrlabel_core::sentence::{PoolEntry, SentencePool};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::sets::{EvalSet, EvalSets};
use crate::QueueCoverage;

/// (set_id, study_id, finding name, rater_id)
type RatingKey = (String, String, String, String);

/// Effective state reconstructed from the event log.
#[derive(Debug, Default)]
pub struct State {
    last_event_id: u64,
    tag_events: usize,
    rating_events: usize,
    tags: BTreeMap<String, SentenceTag>,
    taggers: HashMap<String, BTreeSet<String>>,
    ratings: BTreeMap<RatingKey, RatingLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceProgress {
    /// Positive-candidate sentences in the queue.
    pub candidates: usize,
    pub tagged_candidates: usize,
    pub untagged_candidates: usize,
    /// Distinct sentences with an effective tag, in or out of the queue.
    pub tagged: usize,
    pub tag_events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaterProgress {
    pub rated: usize,
    pub unrated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetProgress {
    pub set_id: String,
    pub studies: usize,
    pub raters: BTreeMap<String, RaterProgress>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Progress {
    pub last_event_id: u64,
    pub sentences: Option<SentenceProgress>,
    pub rating_events: usize,
    pub eval: Vec<SetProgress>,
}

impl State {
    pub fn next_event_id(&self) -> u64 {
        self.last_event_id + 1
    }

    pub fn apply(&mut self, event: &TagEvent) {
        self.last_event_id = event.event_id;
        match &event.payload {
            EventPayload::SentenceTag(tag) => {
                self.tag_events += 1;
                self.taggers
                    .entry(tag.canonical_text.clone())
                    .or_default()
                    .insert(tag.rater_id.clone());
                self.tags.insert(tag.canonical_text.clone(), tag.clone());
            }
            EventPayload::StudyRating(r) => {
                self.rating_events += 1;
                let key = (r.set_id.clone(), r.study_id.clone(), r.finding.clone(), r.rater_id.clone());
                self.ratings.insert(key, r.label);
            }
        }
    }

    fn tagged_for(&self, text: &str, rater: &str, coverage: QueueCoverage) -> bool {
        match coverage {
            QueueCoverage::Single => self.tags.contains_key(text),
            QueueCoverage::PerRater => self.taggers.get(text).is_some_and(|r| r.contains(rater)),
        }
    }

    /// Highest-ranked candidate the rater still has to tag, with its rank
    /// in the full pool and the number of such sentences left.
    pub fn next_sentence<'q>(
        &self,
        queue: &'q [(usize, PoolEntry)],
        rater: &str,
        coverage: QueueCoverage,
    ) -> Option<(usize, &'q PoolEntry, usize)> {
        let mut open = queue
            .iter()
            .filter(|(_, e)| !self.tagged_for(e.text.as_str(), rater, coverage));
        let (rank, entry) = open.next()?;
        Some((*rank, entry, open.count() + 1))
    }

    fn rated_all(&self, set: &EvalSet, study: &str, rater: &str, names: &[String]) -> bool {
        names.iter().all(|f| {
            self.ratings
                .contains_key(&(set.set_id.clone(), study.to_string(), f.clone(), rater.to_string()))
        })
    }

    /// Studies of the set in the rater's serving order, each with whether the
    /// rater has rated it for every finding of the set.
    pub fn eval_queue(&self, set: &EvalSet, rater: &str, seed: u64, names: &[String]) -> Vec<(usize, bool)> {
        serving_order(set, rater, seed)
            .into_iter()
            .map(|i| (i, self.rated_all(set, &set.studies[i].study_id, rater, names)))
            .collect()
    }

    pub fn rating(&self, set_id: &str, study_id: &str, finding: &str, rater: &str) -> Option<RatingLabel> {
        self.ratings
            .get(&(set_id.into(), study_id.into(), finding.into(), rater.into()))
            .copied()
    }

    pub fn progress(
        &self,
        queue: Option<&[(usize, PoolEntry)]>,
        sets: &EvalSets,
        finding_names: impl Fn(&EvalSet) -> Vec<String>,
    ) -> Progress {
        let sentences = queue.map(|q| {
            let tagged_candidates = q.iter().filter(|(_, e)| self.tags.contains_key(e.text.as_str())).count();
            SentenceProgress {
                candidates: q.len(),
                tagged_candidates,
                untagged_candidates: q.len() - tagged_candidates,
                tagged: self.tags.len(),
                tag_events: self.tag_events,
            }
        });
        let eval = sets
            .iter()
            .map(|set| {
                let names = finding_names(set);
                let raters: BTreeSet<&str> = self
                    .ratings
                    .keys()
                    .filter(|k| k.0 == set.set_id)
                    .map(|k| k.3.as_str())
                    .collect();
                let raters = raters
                    .into_iter()
                    .map(|r| {
                        let rated = set
                            .studies
                            .iter()
                            .filter(|s| self.rated_all(set, &s.study_id, r, &names))
                            .count();
                        (
                            r.to_string(),
                            RaterProgress {
                                rated,
                                unrated: set.studies.len() - rated,
                            },
                        )
                    })
                    .collect();
                SetProgress {
                    set_id: set.set_id.clone(),
                    studies: set.studies.len(),
                    raters,
                }
            })
            .collect();
        Progress {
            last_event_id: self.last_event_id,
            sentences,
            rating_events: self.rating_events,
            eval,
        }
    }

    /// Effective tags, one per sentence, ordered by text.
    pub fn tags(&self) -> impl Iterator<Item = &SentenceTag> {
        self.tags.values()
    }

    /// Effective ratings as ratings-file records, by set, finding, study and
    /// rater. Only cells that have been rated are listed.
    pub fn rating_records(
        &self,
        sets: &EvalSets,
        finding_names: impl Fn(&EvalSet) -> Vec<String>,
        opinion: impl Fn(&EvalSet, usize, usize) -> Option<bool>,
    ) -> Vec<RatingRecord> {
        let mut out = Vec::new();
        for set in sets.iter() {
            let names = finding_names(set);
            let raters: BTreeSet<&str> = self
                .ratings
                .keys()
                .filter(|k| k.0 == set.set_id)
                .map(|k| k.3.as_str())
                .collect();
            for (fi, name) in names.iter().enumerate() {
                for (si, study) in set.studies.iter().enumerate() {
                    for &rater in &raters {
                        let Some(label) = self.rating(&set.set_id, &study.study_id, name, rater) else {
                            continue;
                        };
                        out.push(RatingRecord {
                            set_id: set.set_id.clone(),
                            finding: name.clone(),
                            study_id: study.study_id.clone(),
                            rater_id: rater.to_string(),
                            label: Binary(label.is_present()),
                            pool_origin: study.pool_origin,
                            report_opinion: opinion(set, si, fi).map(Binary),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Candidate sentences of the pool in rank order, with 1-based pool ranks.
pub fn candidate_queue(pool: &SentencePool, rules: &FilterRuleSet) -> Vec<(usize, PoolEntry)> {
    pool.entries()
        .iter()
        .enumerate()
        .filter(|(_, e)| rules.apply(e.text.as_str()) == AutoCategory::Candidate)
        .map(|(i, e)| (i + 1, e.clone()))
        .collect()
}

/// Study indices shuffled by a generator seeded from (seed, set, rater).
pub fn serving_order(set: &EvalSet, rater: &str, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..set.studies.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(stable_hash(seed, &[&set.set_id, rater]));
    order.shuffle(&mut rng);
    order
}
