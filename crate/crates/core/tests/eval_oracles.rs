use cxrlabel_core::classify::FindingId;
use cxrlabel_core::eval::{
    bce_mean_loss, binarize, bootstrap_delta_ci, heatmap, percentile, roc_auc, select_threshold,
    threshold_candidates, RatingMatrix, Reference, Resampling,
};
use ndarray::{Array2, Array3};
use proptest::prelude::*;

/// Mann-Whitney AUC by direct pair counting.
fn auc_oracle(conf: &[f64], labels: &[bool]) -> Option<f64> {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for i in 0..conf.len() {
        for j in 0..conf.len() {
            if labels[i] && !labels[j] {
                pairs += 1.0;
                if conf[i] > conf[j] {
                    wins += 1.0;
                } else if conf[i] == conf[j] {
                    wins += 0.5;
                }
            }
        }
    }
    (pairs > 0.0).then(|| wins / pairs)
}

fn agreement(a: &[bool], b: &[bool]) -> f64 {
    a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / a.len() as f64
}

/// Model AAR minus the mean of each rater's AAR against the others,
/// computed from scratch on rater columns.
fn delta_oracle(model: &[bool], raters: &[Vec<bool>]) -> f64 {
    let r = raters.len();
    let model_aar = raters.iter().map(|c| agreement(model, c)).sum::<f64>() / r as f64;
    let mut rad = 0.0;
    for i in 0..r {
        let others: f64 = (0..r).filter(|&j| j != i).map(|j| agreement(&raters[i], &raters[j])).sum();
        rad += others / (r - 1) as f64;
    }
    model_aar - rad / r as f64
}

fn matrix(raters: &[Vec<bool>]) -> RatingMatrix {
    let n = raters[0].len();
    RatingMatrix::new(
        "set",
        FindingId::new(1).unwrap(),
        (0..n).map(|i| format!("s{i}")).collect(),
        (0..raters.len()).map(|i| format!("r{i}")).collect(),
        raters.to_vec(),
    )
    .unwrap()
}

/// Percentile interval of delta over every ordered resample of the studies.
fn enumerated_ci(model: &[bool], raters: &[Vec<bool>], level: f64) -> (f64, f64) {
    let s = model.len();
    let mut deltas = Vec::new();
    for code in 0..s.pow(s as u32) {
        let idx: Vec<usize> = (0..s).map(|k| (code / s.pow(k as u32)) % s).collect();
        let m: Vec<bool> = idx.iter().map(|&i| model[i]).collect();
        let rs: Vec<Vec<bool>> = raters.iter().map(|c| idx.iter().map(|&i| c[i]).collect()).collect();
        deltas.push(delta_oracle(&m, &rs));
    }
    deltas.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    (percentile(&deltas, tail), percentile(&deltas, 1.0 - tail))
}

#[test]
fn auc_anchor_fixtures() {
    let labels = [true, false, true, false, true];
    assert_eq!(roc_auc(&[0.9, 0.1, 0.8, 0.2, 0.7], &labels).unwrap().auc, Some(1.0));
    assert_eq!(roc_auc(&[0.1, 0.9, 0.2, 0.8, 0.3], &labels).unwrap().auc, Some(0.0));
    assert_eq!(roc_auc(&[0.4; 5], &labels).unwrap().auc, Some(0.5));
}

#[test]
fn bootstrap_every_three_study_fixture() {
    // Each study carries 4 bits: model plus three raters.
    for code in 0u32..(1 << 12) {
        let bit = |s: u32, k: u32| code >> (4 * s + k) & 1 == 1;
        let model: Vec<bool> = (0..3).map(|s| bit(s, 0)).collect();
        let raters: Vec<Vec<bool>> = (1..4).map(|k| (0..3).map(|s| bit(s, k)).collect()).collect();
        let m = matrix(&raters);
        let ci = bootstrap_delta_ci(&model, &m, Resampling::Exhaustive, 0.95).unwrap();
        let (lo, hi) = enumerated_ci(&model, &raters, 0.95);
        assert_eq!(ci.n_resamples, 27);
        assert!((ci.lo - lo).abs() < 1e-12 && (ci.hi - hi).abs() < 1e-12, "fixture {code}");
        assert!((ci.delta - delta_oracle(&model, &raters)).abs() < 1e-12);
    }
}

#[test]
fn bootstrap_zero_variance() {
    let raters = vec![vec![true, false, true]; 3];
    let m = matrix(&raters);
    let model = [true, false, true];
    for r in [Resampling::Exhaustive, Resampling::Random { n: 500, seed: 9 }] {
        let ci = bootstrap_delta_ci(&model, &m, r, 0.95).unwrap();
        assert_eq!((ci.delta, ci.lo, ci.hi), (0.0, 0.0, 0.0));
    }
}

#[test]
fn bootstrap_seeded_runs_repeat() {
    let raters = vec![
        vec![true, false, true, true, false, false],
        vec![true, true, true, false, false, false],
        vec![false, false, true, true, false, true],
    ];
    let m = matrix(&raters);
    let model = [true, false, false, true, false, true];
    let r = Resampling::Random { n: 2000, seed: 11 };
    let a = bootstrap_delta_ci(&model, &m, r, 0.95).unwrap();
    let b = bootstrap_delta_ci(&model, &m, r, 0.95).unwrap();
    assert_eq!(a, b);
    // Seeded bounds stay inside the range of all 6^6 resample deltas.
    let (min, max) = enumerated_ci(&model, &raters, 1.0);
    assert!(min <= a.lo && a.lo <= a.hi && a.hi <= max);
}

#[test]
fn loss_anchors() {
    let y = [true, false, true, false];
    assert!((bce_mean_loss(&[0.5; 4], &y).unwrap() - std::f64::consts::LN_2).abs() < 1e-9);
    assert!(bce_mean_loss(&[1.0, 0.0, 1.0, 0.0], &y).unwrap() <= 1.1e-7);
    assert!((bce_mean_loss(&[0.9], &[true]).unwrap() + 0.9f64.ln()).abs() < 1e-9);
}

#[test]
fn heatmap_zero_and_identity() {
    let f = Array3::from_shape_fn((3, 4, 5), |(c, h, w)| (c * 20 + h * 5 + w) as f64);
    assert_eq!(heatmap(f.view(), &[0.0; 3]).unwrap(), Array2::<f64>::zeros((4, 5)));
    let id = heatmap(f.view(), &[0.0, 1.0, 0.0]).unwrap();
    assert_eq!(id, f.index_axis(ndarray::Axis(0), 1).to_owned());
    assert!(heatmap(f.view(), &[1.0; 2]).is_err());
}

fn confidences_with_ties(n: usize) -> impl Strategy<Value = Vec<f64>> {
    // Few distinct levels force ties.
    prop::collection::vec((0u8..12).prop_map(|v| f64::from(v) / 11.0), n)
}

fn auc_fixture() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (1usize..=200).prop_flat_map(|n| (confidences_with_ties(n), prop::collection::vec(any::<bool>(), n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn auc_matches_pair_counting((conf, labels) in auc_fixture()) {
        let got = roc_auc(&conf, &labels).unwrap().auc;
        match (got, auc_oracle(&conf, &labels)) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b),
            (None, None) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn threshold_is_maximizer(
        (conf, raters) in (1usize..40).prop_flat_map(|n| (
            confidences_with_ties(n),
            prop::collection::vec(prop::collection::vec(any::<bool>(), n), 3),
        ))
    ) {
        let m = matrix(&raters);
        let got = select_threshold(&conf, Reference::Raters(&m)).unwrap();
        let score = |t: f64| {
            let pred = binarize(&conf, t);
            raters.iter().map(|c| agreement(&pred, c)).sum::<f64>() / 3.0
        };
        let best = threshold_candidates(&conf).into_iter().map(score).fold(f64::MIN, f64::max);
        prop_assert!((got.aar - best).abs() < 1e-12);
        prop_assert!((score(got.threshold) - got.aar).abs() < 1e-12);
    }

    #[test]
    fn threshold_against_labels(
        (conf, labels) in (1usize..40).prop_flat_map(|n| (confidences_with_ties(n), prop::collection::vec(any::<bool>(), n)))
    ) {
        let got = select_threshold(&conf, Reference::Labels(&labels)).unwrap();
        let best = threshold_candidates(&conf)
            .into_iter()
            .map(|t| agreement(&binarize(&conf, t), &labels))
            .fold(f64::MIN, f64::max);
        prop_assert!((got.aar - best).abs() < 1e-12);
    }

    #[test]
    fn heatmap_is_linear(
        (c, h, w) in (1usize..=8, 1usize..=16, 1usize..=16),
        seed in any::<u64>(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let mut x = seed | 1;
        let mut next = move || {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x % 2000) as f64 / 1000.0 - 1.0
        };
        let f = Array3::from_shape_fn((c, h, w), |_| next());
        let w1: Vec<f64> = (0..c).map(|_| next()).collect();
        let w2: Vec<f64> = (0..c).map(|_| next()).collect();
        let combo: Vec<f64> = w1.iter().zip(&w2).map(|(p, q)| a * p + b * q).collect();
        let lhs = heatmap(f.view(), &combo).unwrap();
        let rhs = heatmap(f.view(), &w1).unwrap() * a + heatmap(f.view(), &w2).unwrap() * b;
        for (l, r) in lhs.iter().zip(rhs.iter()) {
            prop_assert!((l - r).abs() < 1e-9);
        }
    }
}
