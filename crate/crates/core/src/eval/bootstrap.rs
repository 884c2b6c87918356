//! Percentile bootstrap for the difference between a model's AAR and the
//! average radiologist rate.
//!
//! Both quantities are means over studies of per-study agreement
//! indicators, so their difference on a resample is the resample mean of a
//! per-study contribution. Resamples only need to draw study indices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::agreement::{avg_radiologist_rate, model_aar};
use super::RatingMatrix;
use crate::error::{Error, Result};

/// Largest study count for which [`Resampling::Exhaustive`] is allowed
/// (7^7 = 823,543 resamples).
pub const MAX_EXHAUSTIVE_STUDIES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resampling {
    /// `n` seeded resamples. Resample `i` draws from a ChaCha8 stream
    /// keyed by (`seed`, `i`), so the result does not depend on how the
    /// work is split across threads.
    Random { n: usize, seed: u64 },
    /// Every one of the S^S ordered resamples of S studies, each once.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaCI {
    pub delta: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_resamples: usize,
    pub level: f64,
}

/// Linearly interpolated percentile of sorted data, `q` in [0, 1]
/// (position `q * (n - 1)`).
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let h = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-study contribution to delta: mean model-vs-rater agreement minus
/// mean pairwise rater agreement on that study.
fn study_contributions(model: &[bool], matrix: &RatingMatrix) -> Vec<f64> {
    let r = matrix.n_raters();
    let pairs = (r * (r - 1)) as f64;
    (0..matrix.n_studies())
        .map(|s| {
            let model_agree = matrix.rater_columns().filter(|col| col[s] == model[s]).count() as f64;
            let mut rater_agree = 0usize;
            for i in 0..r {
                for j in 0..r {
                    if i != j && matrix.rater(i)[s] == matrix.rater(j)[s] {
                        rater_agree += 1;
                    }
                }
            }
            model_agree / r as f64 - rater_agree as f64 / pairs
        })
        .collect()
}

pub fn bootstrap_delta_ci(
    model: &[bool],
    matrix: &RatingMatrix,
    resampling: Resampling,
    level: f64,
) -> Result<DeltaCI> {
    if model.len() != matrix.n_studies() {
        return Err(Error::LengthMismatch {
            left: model.len(),
            right: matrix.n_studies(),
        });
    }
    if !(0.0..1.0).contains(&level) || level == 0.0 {
        return Err(Error::InvalidInput(format!("confidence level {level} not in (0, 1)")));
    }
    let delta = model_aar(model, matrix)? - avg_radiologist_rate(matrix)?;
    let contrib = study_contributions(model, matrix);
    let s = contrib.len();

    let mut deltas: Vec<f64> = match resampling {
        Resampling::Random { n, seed } => {
            if n == 0 {
                return Err(Error::InvalidInput("bootstrap needs at least one resample".into()));
            }
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i as u64);
                    let sum: f64 = (0..s).map(|_| contrib[rng.random_range(0..s)]).sum();
                    sum / s as f64
                })
                .collect()
        }
        Resampling::Exhaustive => {
            if s > MAX_EXHAUSTIVE_STUDIES {
                return Err(Error::InvalidInput(format!(
                    "exhaustive bootstrap limited to {MAX_EXHAUSTIVE_STUDIES} studies, got {s}"
                )));
            }
            let total = s.pow(s as u32);
            (0..total)
                .map(|mut code| {
                    let mut sum = 0.0;
                    for _ in 0..s {
                        sum += contrib[code % s];
                        code /= s;
                    }
                    sum / s as f64
                })
                .collect()
        }
    };
    deltas.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok(DeltaCI {
        delta,
        lo: percentile(&deltas, tail),
        hi: percentile(&deltas, 1.0 - tail),
        n_resamples: deltas.len(),
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::FindingId;

    fn matrix(cols: Vec<Vec<bool>>) -> RatingMatrix {
        let n = cols[0].len();
        RatingMatrix::new(
            "t",
            FindingId::new(1).unwrap(),
            (0..n).map(|i| format!("s{i}")).collect(),
            (0..cols.len()).map(|i| format!("r{i}")).collect(),
            cols,
        )
        .unwrap()
    }

    #[test]
    fn percentile_interpolates() {
        let d = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&d, 0.0), 1.0);
        assert_eq!(percentile(&d, 1.0), 4.0);
        assert_eq!(percentile(&d, 0.5), 2.5);
        assert!((percentile(&d, 0.025) - 1.075).abs() < 1e-12);
    }

    #[test]
    fn identical_everything_zero_ci() {
        let col = vec![true, false, true, true, false];
        let m = matrix(vec![col.clone(); 3]);
        let ci = bootstrap_delta_ci(&col, &m, Resampling::Random { n: 1000, seed: 7 }, 0.95).unwrap();
        assert_eq!((ci.delta, ci.lo, ci.hi), (0.0, 0.0, 0.0));
    }

    #[test]
    fn single_study_collapses() {
        let m = matrix(vec![vec![true], vec![false], vec![true]]);
        let ci = bootstrap_delta_ci(&[true], &m, Resampling::Random { n: 50, seed: 1 }, 0.95).unwrap();
        assert_eq!(ci.lo, ci.delta);
        assert_eq!(ci.hi, ci.delta);
    }

    #[test]
    fn contributions_average_to_delta() {
        let m = matrix(vec![
            vec![true, true, false, false],
            vec![true, false, false, true],
            vec![true, true, true, false],
        ]);
        let model = [true, true, false, true];
        let c = study_contributions(&model, &m);
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        let delta = model_aar(&model, &m).unwrap() - avg_radiologist_rate(&m).unwrap();
        assert!((mean - delta).abs() < 1e-15);
    }

    #[test]
    fn deterministic_under_seed() {
        let m = matrix(vec![
            vec![true, true, false, false, true, false],
            vec![true, false, false, true, true, true],
            vec![true, true, true, false, false, false],
        ]);
        let model = [true, true, false, true, true, false];
        let run = |seed| bootstrap_delta_ci(&model, &m, Resampling::Random { n: 2000, seed }, 0.95).unwrap();
        assert_eq!(run(3), run(3));
        let ci = run(3);
        assert!(ci.lo <= ci.hi);
        assert_eq!(ci.n_resamples, 2000);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = matrix(vec![vec![true, false]; 3]);
        assert!(bootstrap_delta_ci(&[true], &m, Resampling::Exhaustive, 0.95).is_err());
        assert!(bootstrap_delta_ci(&[true, false], &m, Resampling::Exhaustive, 1.0).is_err());
        assert!(bootstrap_delta_ci(&[true, false], &m, Resampling::Random { n: 0, seed: 0 }, 0.9).is_err());
        let big = matrix(vec![vec![true; 8]; 3]);
        assert!(bootstrap_delta_ci(&[true; 8], &big, Resampling::Exhaustive, 0.95).is_err());
    }
}
