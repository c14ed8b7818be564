//! Classification metrics and the randomized train/test protocol.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::classify::ClassifyError;
use crate::scoring::ScoringError;

mod protocol;

pub use protocol::{
    cross_validate, make_folds, permute_labels, run_fold, EvalReport, FoldConfig, FoldResult, FoldSpec, ProtocolConfig,
    Ranker, SelectionScope, SequentialRanker, SplitMode,
};

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    LengthMismatch { labels: usize, scores: usize },
    Empty,
    /// `y_true` holds only the named class.
    SingleClass(&'static str),
    NonFiniteScore(usize),
    /// Folds do not fit the calendar or cannot be made two-class.
    Protocol(&'static str),
    Scoring(ScoringError),
    Classify(ClassifyError),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::LengthMismatch { labels, scores } => {
                write!(f, "{labels} labels but {scores} scores")
            }
            EvalError::Empty => f.write_str("no days to evaluate"),
            EvalError::SingleClass(c) => write!(f, "labels contain only the {c} class"),
            EvalError::NonFiniteScore(i) => write!(f, "score at position {i} is not finite"),
            EvalError::Protocol(m) => write!(f, "evaluation protocol: {m}"),
            EvalError::Scoring(e) => write!(f, "feature selection: {e}"),
            EvalError::Classify(e) => write!(f, "classifier: {e}"),
        }
    }
}

impl core::error::Error for EvalError {}

impl From<ScoringError> for EvalError {
    fn from(e: ScoringError) -> Self {
        EvalError::Scoring(e)
    }
}

impl From<ClassifyError> for EvalError {
    fn from(e: ClassifyError) -> Self {
        EvalError::Classify(e)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn check(y_true: &[bool], y_score: &[f64]) -> Result<(), EvalError> {
    if y_true.len() != y_score.len() {
        return Err(EvalError::LengthMismatch { labels: y_true.len(), scores: y_score.len() });
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    if let Some(i) = y_score.iter().position(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore(i));
    }
    Ok(())
}

fn check_two_class(y_true: &[bool]) -> Result<(usize, usize), EvalError> {
    let pos = y_true.iter().filter(|&&b| b).count();
    let neg = y_true.len() - pos;
    match (pos, neg) {
        (0, _) => Err(EvalError::SingleClass("non-event")),
        (_, 0) => Err(EvalError::SingleClass("event")),
        _ => Ok((pos, neg)),
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Confusion-matrix metrics with `score >= threshold` predicted positive.
/// Undefined precision, recall and F1 are 0.
pub fn threshold_metrics(y_true: &[bool], y_score: &[f64], threshold: f64) -> Result<ThresholdMetrics, EvalError> {
    check(y_true, y_score)?;
    let (mut tp, mut fp, mut fneg, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for (&t, &s) in y_true.iter().zip(y_score) {
        match (t, s >= threshold) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fneg += 1,
            (false, false) => tn += 1,
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fneg);
    let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    Ok(ThresholdMetrics { accuracy: ratio(tp + tn, y_true.len()), precision, recall, f1 })
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half.
pub fn auc_roc(y_true: &[bool], y_score: &[f64]) -> Result<f64, EvalError> {
    check(y_true, y_score)?;
    let (pos, neg) = check_two_class(y_true)?;
    let ranks = crate::stats::average_ranks(y_score);
    let rank_sum: f64 = ranks.iter().zip(y_true).filter(|(_, &t)| t).map(|(r, _)| r).sum();
    let (p, n) = (pos as f64, neg as f64);
    Ok(((rank_sum - p * (p + 1.0) / 2.0) / (p * n)).clamp(0.0, 1.0))
}

/// Cumulative (tp, fp) after each group of tied scores, highest score first.
fn sweep(y_true: &[bool], y_score: &[f64]) -> Vec<(f64, usize, usize)> {
    let mut order: Vec<usize> = (0..y_score.len()).collect();
    order.sort_by(|&a, &b| y_score[b].partial_cmp(&y_score[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let mut out = Vec::new();
    let (mut tp, mut fp) = (0, 0);
    for (k, &i) in order.iter().enumerate() {
        if y_true[i] {
            tp += 1;
        } else {
            fp += 1;
        }
        let last_of_group = order.get(k + 1).is_none_or(|&j| y_score[j] != y_score[i]);
        if last_of_group {
            out.push((y_score[i], tp, fp));
        }
    }
    out
}

/// ROC points `(fpr, tpr)` from (0, 0) to (1, 1), one per distinct score.
pub fn roc_curve(y_true: &[bool], y_score: &[f64]) -> Result<Vec<(f64, f64)>, EvalError> {
    check(y_true, y_score)?;
    let (pos, neg) = check_two_class(y_true)?;
    let mut pts = alloc::vec![(0.0, 0.0)];
    pts.extend(sweep(y_true, y_score).into_iter().map(|(_, tp, fp)| (ratio(fp, neg), ratio(tp, pos))));
    Ok(pts)
}

/// Precision-recall points `(recall, precision)`, one per distinct score in
/// descending score order.
pub fn pr_curve(y_true: &[bool], y_score: &[f64]) -> Result<Vec<(f64, f64)>, EvalError> {
    check(y_true, y_score)?;
    let (pos, _) = check_two_class(y_true)?;
    Ok(sweep(y_true, y_score)
        .into_iter()
        .map(|(_, tp, fp)| (ratio(tp, pos), ratio(tp, tp + fp)))
        .collect())
}

/// Average precision: `Σ (R_k − R_{k−1}) · P_k` over distinct thresholds.
pub fn auc_pr(y_true: &[bool], y_score: &[f64]) -> Result<f64, EvalError> {
    let curve = pr_curve(y_true, y_score)?;
    let mut prev = 0.0;
    let mut area = 0.0;
    for (r, p) in curve {
        area += (r - prev) * p;
        prev = r;
    }
    Ok(area.clamp(0.0, 1.0))
}

/// Threshold metrics at `threshold` plus both areas.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricSet {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc_roc: f64,
    pub auc_pr: f64,
}

impl MetricSet {
    pub fn compute(y_true: &[bool], y_score: &[f64], threshold: f64) -> Result<Self, EvalError> {
        let t = threshold_metrics(y_true, y_score, threshold)?;
        Ok(MetricSet {
            accuracy: t.accuracy,
            precision: t.precision,
            recall: t.recall,
            f1: t.f1,
            auc_roc: auc_roc(y_true, y_score)?,
            auc_pr: auc_pr(y_true, y_score)?,
        })
    }

    pub fn mean(sets: &[MetricSet]) -> MetricSet {
        let n = sets.len().max(1) as f64;
        let sum = |f: fn(&MetricSet) -> f64| sets.iter().map(f).sum::<f64>() / n;
        MetricSet {
            accuracy: sum(|m| m.accuracy),
            precision: sum(|m| m.precision),
            recall: sum(|m| m.recall),
            f1: sum(|m| m.f1),
            auc_roc: sum(|m| m.auc_roc),
            auc_pr: sum(|m| m.auc_pr),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn brute_auc(y: &[bool], s: &[f64]) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (i, &yi) in y.iter().enumerate() {
            for (j, &yj) in y.iter().enumerate() {
                if yi && !yj {
                    den += 1.0;
                    num += match s[i].partial_cmp(&s[j]).unwrap() {
                        Ordering::Greater => 1.0,
                        Ordering::Equal => 0.5,
                        Ordering::Less => 0.0,
                    };
                }
            }
        }
        num / den
    }

    #[test]
    fn hand_confusion_matrix() {
        let m = threshold_metrics(&[true, false, true, false], &[0.9, 0.6, 0.4, 0.1], 0.5).unwrap();
        assert_eq!(m, ThresholdMetrics { accuracy: 0.5, precision: 0.5, recall: 0.5, f1: 0.5 });
    }

    #[test]
    fn perfect_and_degenerate_predictors() {
        let y = [true, false, true, false];
        let s = [1.0, 0.0, 1.0, 0.0];
        let m = threshold_metrics(&y, &s, 0.5).unwrap();
        assert_eq!(m, ThresholdMetrics { accuracy: 1.0, precision: 1.0, recall: 1.0, f1: 1.0 });
        let none = threshold_metrics(&y, &[0.0; 4], 0.5).unwrap();
        assert_eq!((none.precision, none.recall, none.f1), (0.0, 0.0, 0.0));
        assert_eq!(auc_roc(&y, &s).unwrap(), 1.0);
        assert_eq!(auc_roc(&y, &[0.3; 4]).unwrap(), 0.5);
        assert_eq!(auc_pr(&y, &s).unwrap(), 1.0);
    }

    #[test]
    fn single_class_is_an_error() {
        assert_eq!(auc_roc(&[true, true], &[0.1, 0.2]), Err(EvalError::SingleClass("event")));
        assert_eq!(auc_pr(&[false, false], &[0.1, 0.2]), Err(EvalError::SingleClass("non-event")));
        assert!(matches!(auc_roc(&[true], &[0.1, 0.2]), Err(EvalError::LengthMismatch { .. })));
        assert_eq!(auc_roc(&[true, false], &[f64::NAN, 0.2]), Err(EvalError::NonFiniteScore(0)));
    }

    #[test]
    fn average_precision_by_hand() {
        // ranked: +, -, +  → AP = 1·½ + (2/3)·½
        let ap = auc_pr(&[true, false, true], &[0.9, 0.5, 0.1]).unwrap();
        assert!((ap - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn curves_are_monotone_and_anchored() {
        let y = [true, false, true, true, false, false];
        let s = [0.8, 0.7, 0.7, 0.2, 0.1, 0.1];
        let roc = roc_curve(&y, &s).unwrap();
        assert_eq!(roc.first(), Some(&(0.0, 0.0)));
        assert_eq!(roc.last(), Some(&(1.0, 1.0)));
        assert!(roc.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
        let pr = pr_curve(&y, &s).unwrap();
        assert!(pr.windows(2).all(|w| w[0].0 <= w[1].0));
        assert_eq!(pr.last().unwrap().0, 1.0);
    }

    #[test]
    fn trapezoid_roc_matches_rank_statistic() {
        let y = [true, false, true, true, false, false, true];
        let s = [0.8, 0.7, 0.7, 0.2, 0.1, 0.1, 0.1];
        let roc = roc_curve(&y, &s).unwrap();
        let trap: f64 = roc.windows(2).map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0).sum();
        assert!((trap - auc_roc(&y, &s).unwrap()).abs() < 1e-12);
    }

    fn labelled(max: usize) -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
        (2..=max).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n)
                    .prop_filter("two classes", |y| y.iter().any(|&b| b) && y.iter().any(|&b| !b)),
                proptest::collection::vec((0u8..6).prop_map(|v| f64::from(v) / 5.0), n),
            )
        })
    }

    proptest! {
        #[test]
        fn auc_matches_pair_counting((y, s) in labelled(12)) {
            prop_assert!((auc_roc(&y, &s).unwrap() - brute_auc(&y, &s)).abs() < 1e-12);
        }

        #[test]
        fn auc_invariant_under_increasing_transform((y, s) in labelled(40)) {
            let t: Vec<f64> = s.iter().map(|v| libm::exp(3.0 * v) - 7.0).collect();
            prop_assert_eq!(auc_roc(&y, &s).unwrap(), auc_roc(&y, &t).unwrap());
            prop_assert_eq!(auc_pr(&y, &s).unwrap(), auc_pr(&y, &t).unwrap());
        }

        #[test]
        fn auc_negation_complements((y, s) in labelled(40)) {
            let neg: Vec<f64> = s.iter().map(|v| -v).collect();
            let sum = auc_roc(&y, &s).unwrap() + auc_roc(&y, &neg).unwrap();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn metrics_in_unit_interval((y, s) in labelled(40), t in 0.0f64..1.0) {
            let m = MetricSet::compute(&y, &s, t).unwrap();
            for v in [m.accuracy, m.precision, m.recall, m.f1, m.auc_roc, m.auc_pr] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn mean_of_sets() {
        let a = MetricSet { accuracy: 1.0, auc_roc: 0.5, ..MetricSet::default() };
        let b = MetricSet { accuracy: 0.0, auc_roc: 1.0, ..MetricSet::default() };
        let m = MetricSet::mean(&[a, b]);
        assert_eq!((m.accuracy, m.auc_roc), (0.5, 0.75));
        assert_eq!(vec![m.f1], vec![0.0]);
    }
}
