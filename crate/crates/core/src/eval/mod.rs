//! Agreement statistics, bootstrap intervals, threshold selection, ROC/AUC,
//! the training loss and heat maps.

mod agreement;
mod bootstrap;
mod heatmap;
mod loss;
mod matrix;
mod predictions;
mod report;
mod roc;
mod threshold;

pub use agreement::{aar, agreement_rate, avg_radiologist_rate, model_aar, rater_aars, report_agreement};
pub use bootstrap::{bootstrap_delta_ci, percentile, DeltaCI, Resampling, MAX_EXHAUSTIVE_STUDIES};
pub use heatmap::heatmap;
pub use loss::{bce_mean_loss, EPSILON};
pub use matrix::{
    load_ratings, matrices_from_records, matrices_to_records, parse_rating_records, parse_ratings,
    Binary, PoolOrigin, RatingMatrix, RatingRecord,
};
pub use predictions::Predictions;
pub use report::{evaluate_matrix, write_eval_report, EvalRow};
pub use roc::{roc_auc, RocCurve, RocPoint};
pub use threshold::{binarize, select_threshold, threshold_candidates, Reference, ThresholdChoice};
