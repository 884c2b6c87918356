use std::io::Write;

use serde::Serialize;

use super::{
    avg_radiologist_rate, binarize, bootstrap_delta_ci, model_aar, report_agreement, RatingMatrix,
    Resampling,
};
use crate::classify::Ontology;
use crate::error::{Error, Result};

/// One evaluation-set row: pool composition, agreement of the report, the
/// radiologists and the model, and the bootstrap interval on the model's
/// advantage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub set_id: String,
    pub finding: String,
    pub n_studies: usize,
    pub pos: Option<usize>,
    pub neg: Option<usize>,
    pub report_agreement: Option<f64>,
    pub avg_rad: f64,
    pub model_aar: f64,
    pub delta: f64,
    pub lo: f64,
    pub hi: f64,
    pub threshold: f64,
}

pub fn evaluate_matrix(
    matrix: &RatingMatrix,
    confidences: &[f64],
    threshold: f64,
    resampling: Resampling,
    level: f64,
    ontology: &Ontology,
) -> Result<EvalRow> {
    let model = binarize(confidences, threshold);
    let ci = bootstrap_delta_ci(&model, matrix, resampling, level)?;
    let (pos, neg) = matrix.pool_counts().unzip();
    Ok(EvalRow {
        set_id: matrix.set_id.clone(),
        finding: ontology.name(matrix.finding).to_string(),
        n_studies: matrix.n_studies(),
        pos,
        neg,
        report_agreement: report_agreement(matrix)?,
        avg_rad: avg_radiologist_rate(matrix)?,
        model_aar: model_aar(&model, matrix)?,
        delta: ci.delta,
        lo: ci.lo,
        hi: ci.hi,
        threshold,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

pub fn write_eval_report<W: Write>(rows: &[EvalRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::malformed("eval report", None, e);
    w.write_record([
        "set_id", "finding", "n_studies", "pos", "neg", "report", "avg_rad", "model", "delta", "lo",
        "hi", "threshold",
    ])
    .map_err(err)?;
    for r in rows {
        w.write_record([
            r.set_id.clone(),
            r.finding.clone(),
            r.n_studies.to_string(),
            opt(r.pos),
            opt(r.neg),
            opt(r.report_agreement.map(fixed)),
            fixed(r.avg_rad),
            fixed(r.model_aar),
            fixed(r.delta),
            fixed(r.lo),
            fixed(r.hi),
            r.threshold.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("<eval report>", e))
}
