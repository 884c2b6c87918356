use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    /// Predictions are positive when confidence >= threshold.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
    /// Fraction of studies classified correctly at this threshold.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    /// From (0, 0) at threshold +∞ down to (1, 1) at the lowest confidence.
    pub points: Vec<RocPoint>,
    /// `None` when the labels hold a single class.
    pub auc: Option<f64>,
    /// Accuracy at the operating point where sensitivity and specificity
    /// are closest; `None` for single-class labels.
    pub accuracy_at_equal_error: Option<f64>,
}

/// ROC sweep over distinct confidence values.
///
/// The area is accumulated with integer pair counts, one tie group at a
/// time, so it equals the Mann-Whitney statistic (ties count one half)
/// exactly up to the final division.
pub fn roc_auc(confidences: &[f64], labels: &[bool]) -> Result<RocCurve> {
    if confidences.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: confidences.len(),
            right: labels.len(),
        });
    }
    if let Some(bad) = confidences.iter().find(|c| c.is_nan()) {
        return Err(Error::InvalidInput(format!("confidence {bad} is not a number")));
    }
    let n = labels.len();
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = n - pos;
    if pos == 0 || neg == 0 {
        return Ok(RocCurve {
            points: Vec::new(),
            auc: None,
            accuracy_at_equal_error: None,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| confidences[b].total_cmp(&confidences[a]));

    let point = |threshold: f64, tp: usize, fp: usize| RocPoint {
        threshold,
        fpr: fp as f64 / neg as f64,
        tpr: tp as f64 / pos as f64,
        accuracy: (tp + neg - fp) as f64 / n as f64,
    };

    let mut points = vec![point(f64::INFINITY, 0, 0)];
    // Twice the number of (positive, negative) pairs ranked correctly.
    let mut twice_pairs: u128 = 0;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < n {
        let value = confidences[order[i]];
        let (mut gp, mut gn) = (0usize, 0usize);
        while i < n && confidences[order[i]] == value {
            if labels[order[i]] {
                gp += 1;
            } else {
                gn += 1;
            }
            i += 1;
        }
        // Negatives in this group lose to every earlier positive and tie
        // with the positives of the group.
        twice_pairs += gn as u128 * (2 * tp as u128 + gp as u128);
        tp += gp;
        fp += gn;
        points.push(point(value, tp, fp));
    }
    let auc = twice_pairs as f64 / (2.0 * pos as f64 * neg as f64);

    let gap = |p: &RocPoint| (p.tpr - (1.0 - p.fpr)).abs();
    let eq = points
        .iter()
        .min_by(|a, b| gap(a).total_cmp(&gap(b)))
        .map(|p| p.accuracy);

    Ok(RocCurve {
        points,
        auc: Some(auc),
        accuracy_at_equal_error: eq,
    })
}
