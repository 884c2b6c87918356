use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::LabeledStudy;
use crate::classify::{FindingId, N_FINDINGS};

/// A finding that could not reach its quota, with the count achieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Shortfall {
    pub finding: FindingId,
    pub achieved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Selection {
    /// Indices into the input slice, ascending.
    pub indices: Vec<usize>,
    pub shortfall: Vec<Shortfall>,
}

struct Picker<'a> {
    studies: &'a [LabeledStudy],
    chosen: Vec<bool>,
    counts: [usize; N_FINDINGS],
}

impl<'a> Picker<'a> {
    fn new(studies: &'a [LabeledStudy]) -> Self {
        Picker {
            studies,
            chosen: vec![false; studies.len()],
            counts: [0; N_FINDINGS],
        }
    }

    fn take(&mut self, i: usize) {
        if !std::mem::replace(&mut self.chosen[i], true) {
            for f in self.studies[i].labels.positives().iter() {
                self.counts[f.index()] += 1;
            }
        }
    }

    fn has(&self, i: usize, f: FindingId) -> bool {
        !self.chosen[i] && self.studies[i].labels.get(f)
    }

    fn finish(self, order: impl Iterator<Item = FindingId>, min_pos: usize) -> Selection {
        let shortfall = order
            .filter(|f| self.counts[f.index()] < min_pos)
            .map(|finding| Shortfall {
                finding,
                achieved: self.counts[finding.index()],
            })
            .collect();
        Selection {
            indices: (0..self.studies.len()).filter(|&i| self.chosen[i]).collect(),
            shortfall,
        }
    }
}

/// Greedy validation subset. Findings are visited from fewest to most
/// available positives (ties by id); for each, studies positive for it are
/// taken in input order until the selection holds `min_pos` of them.
pub fn select_validation_subset(studies: &[LabeledStudy], min_pos: usize) -> Selection {
    let mut available = [0usize; N_FINDINGS];
    for s in studies {
        for f in s.labels.positives().iter() {
            available[f.index()] += 1;
        }
    }
    let mut order: Vec<FindingId> = FindingId::all().collect();
    order.sort_by_key(|f| (available[f.index()], f.get()));

    let mut p = Picker::new(studies);
    for &f in &order {
        for i in 0..studies.len() {
            if p.counts[f.index()] >= min_pos {
                break;
            }
            if p.has(i, f) {
                p.take(i);
            }
        }
    }
    p.finish(FindingId::all(), min_pos)
}

/// Seeded uniform sample of `base` studies, topped up finding by finding (in
/// id order) with randomly chosen unselected positives until each finding has
/// `min_pos` positives or runs out.
pub fn build_broad_test_set(studies: &[LabeledStudy], base: usize, min_pos: usize, seed: u64) -> Selection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..studies.len()).collect();
    order.shuffle(&mut rng);

    let mut p = Picker::new(studies);
    for &i in order.iter().take(base) {
        p.take(i);
    }
    for f in FindingId::all() {
        if p.counts[f.index()] >= min_pos {
            continue;
        }
        let mut pool: Vec<usize> = (0..studies.len()).filter(|&i| p.has(i, f)).collect();
        pool.shuffle(&mut rng);
        for i in pool {
            if p.counts[f.index()] >= min_pos {
                break;
            }
            p.take(i);
        }
    }
    p.finish(FindingId::all(), min_pos)
}
