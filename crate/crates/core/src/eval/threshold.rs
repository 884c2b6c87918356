use serde::Serialize;

use super::RatingMatrix;
use crate::error::{Error, Result};

/// What thresholded predictions are scored against.
#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    /// A single binary reference, e.g. text-derived labels.
    Labels(&'a [bool]),
    /// Every rater of a matrix; the score is the model AAR.
    Raters(&'a RatingMatrix),
}

impl Reference<'_> {
    fn len(&self) -> usize {
        match self {
            Reference::Labels(l) => l.len(),
            Reference::Raters(m) => m.n_studies(),
        }
    }

    /// (positive votes, total votes) for study `s`.
    fn votes(&self, s: usize) -> (usize, usize) {
        match self {
            Reference::Labels(l) => (usize::from(l[s]), 1),
            Reference::Raters(m) => (m.rater_columns().filter(|c| c[s]).count(), m.n_raters()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdChoice {
    /// Predict positive when confidence >= threshold. May be infinite.
    pub threshold: f64,
    pub aar: f64,
}

/// Candidate thresholds: −∞, the midpoints between consecutive distinct
/// confidences, and +∞, in ascending order.
pub fn threshold_candidates(confidences: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = confidences.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut out = Vec::with_capacity(sorted.len() + 1);
    out.push(f64::NEG_INFINITY);
    out.extend(sorted.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    out.push(f64::INFINITY);
    out
}

/// Pick the threshold that maximizes the agreement of the thresholded
/// predictions with the reference, scanning every candidate. Ties go to the
/// smallest threshold.
pub fn select_threshold(confidences: &[f64], reference: Reference<'_>) -> Result<ThresholdChoice> {
    let n = confidences.len();
    if n == 0 {
        return Err(Error::InvalidInput("threshold selection needs at least one study".into()));
    }
    if reference.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: reference.len(),
        });
    }
    if let Some(bad) = confidences.iter().find(|c| c.is_nan()) {
        return Err(Error::InvalidInput(format!("confidence {bad} is not a number")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| confidences[a].total_cmp(&confidences[b]));
    let votes_per_study = reference.votes(0).1;
    let denom = (n * votes_per_study) as f64;

    // Start with every study predicted positive (threshold −∞), then raise
    // the threshold past one group of equal confidences at a time.
    let mut agree: usize = (0..n).map(|s| reference.votes(s).0).sum();
    let mut best = ThresholdChoice {
        threshold: f64::NEG_INFINITY,
        aar: agree as f64 / denom,
    };
    let mut i = 0;
    while i < n {
        let value = confidences[order[i]];
        let mut j = i;
        while j < n && confidences[order[j]] == value {
            let (pos, total) = reference.votes(order[j]);
            agree = agree - pos + (total - pos);
            j += 1;
        }
        let threshold = match order.get(j) {
            Some(&next) => (value + confidences[next]) / 2.0,
            None => f64::INFINITY,
        };
        let aar = agree as f64 / denom;
        if aar > best.aar {
            best = ThresholdChoice { threshold, aar };
        }
        i = j;
    }
    Ok(best)
}

pub fn binarize(confidences: &[f64], threshold: f64) -> Vec<bool> {
    confidences.iter().map(|&c| c >= threshold).collect()
}
