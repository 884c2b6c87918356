use super::RatingMatrix;
use crate::error::{Error, Result};

/// Fraction of positions where two binary judgments agree (accuracy of one
/// tagger against the other).
pub fn agreement_rate(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidInput("agreement rate of empty vectors".into()));
    }
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.len() as f64)
}

/// Average agreement rate of `target` against each of `others`.
pub fn aar<T: AsRef<[bool]>>(target: &[bool], others: &[T]) -> Result<f64> {
    if others.is_empty() {
        return Err(Error::InvalidInput("AAR needs at least one other rater".into()));
    }
    let mut sum = 0.0;
    for o in others {
        sum += agreement_rate(target, o.as_ref())?;
    }
    Ok(sum / others.len() as f64)
}

/// Each rater's AAR against the remaining raters.
pub fn rater_aars(matrix: &RatingMatrix) -> Result<Vec<f64>> {
    if matrix.n_raters() < 2 {
        return Err(Error::InvalidInput(format!(
            "set {:?} needs at least 2 raters, has {}",
            matrix.set_id,
            matrix.n_raters()
        )));
    }
    (0..matrix.n_raters())
        .map(|r| {
            let others: Vec<&[bool]> = (0..matrix.n_raters())
                .filter(|&o| o != r)
                .map(|o| matrix.rater(o))
                .collect();
            aar(matrix.rater(r), &others)
        })
        .collect()
}

/// Mean of the raters' AARs.
pub fn avg_radiologist_rate(matrix: &RatingMatrix) -> Result<f64> {
    let aars = rater_aars(matrix)?;
    Ok(aars.iter().sum::<f64>() / aars.len() as f64)
}

/// AAR of a model's binary predictions against every rater in the matrix.
pub fn model_aar(model: &[bool], matrix: &RatingMatrix) -> Result<f64> {
    let raters: Vec<&[bool]> = matrix.rater_columns().collect();
    aar(model, &raters)
}

/// Mean agreement between the report's opinion and each rater, if the
/// matrix carries report opinions.
pub fn report_agreement(matrix: &RatingMatrix) -> Result<Option<f64>> {
    match &matrix.report_opinion {
        Some(op) => model_aar(op, matrix).map(Some),
        None => Ok(None),
    }
}
