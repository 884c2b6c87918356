use crate::error::{Error, Result};

/// Clipping applied to confidences before taking logarithms.
pub const EPSILON: f64 = 1e-7;

/// Mean binary cross-entropy over the findings of one study:
/// `-(1/K) Σ [y log p + (1 - y) log(1 - p)]` with `p` clipped to
/// `[EPSILON, 1 - EPSILON]`.
///
/// The sign makes the loss non-negative; a version written without the
/// leading minus is the log-likelihood, not the loss.
pub fn bce_mean_loss(p: &[f64], y: &[bool]) -> Result<f64> {
    if p.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: y.len(),
        });
    }
    if p.is_empty() {
        return Err(Error::InvalidInput("loss over zero findings".into()));
    }
    let sum: f64 = p
        .iter()
        .zip(y)
        .map(|(&p, &y)| {
            let p = p.clamp(EPSILON, 1.0 - EPSILON);
            if y {
                p.ln()
            } else {
                (-p).ln_1p()
            }
        })
        .sum();
    Ok(-sum / p.len() as f64)
}
