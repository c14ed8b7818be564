use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{pr_curve, roc_curve, EvalError, MetricSet};
use crate::classify::{ClassifierConfig, FeatureMatrix, TrainedModel};
use crate::countstore::CountMatrix;
use crate::ingest::WordPair;
use crate::scoring::{rank_top_n_on_days, FeatureScore, ScoringError, SelectionConfig};
use crate::signal::EventCalendar;

const MAX_FOLD_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SplitMode {
    /// Train and test days drawn at random from the whole calendar.
    #[default]
    Random,
    /// A block of training days immediately followed by a block of test days.
    Contiguous,
}

/// Whether feature selection sees only each fold's training days or the
/// whole calendar (leaks test labels into selection).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SelectionScope {
    #[default]
    PerFold,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldConfig {
    pub folds: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub seed: u64,
    pub split: SplitMode,
}

impl Default for FoldConfig {
    fn default() -> Self {
        FoldConfig { folds: 10, train_size: 500, test_size: 140, seed: 0, split: SplitMode::Random }
    }
}

/// Disjoint, ascending train and test day sets of one fold.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldSpec {
    pub index: usize,
    pub seed: u64,
    pub train_days: Vec<u32>,
    pub test_days: Vec<u32>,
}

fn has_both(days: &[u32], gt: &EventCalendar) -> bool {
    let pos = days.iter().filter(|&&d| gt.bits[d as usize]).count();
    pos > 0 && pos < days.len()
}

/// Draws `config.folds` folds. Random folds whose train or test split lacks a
/// class are redrawn, up to 100 times per fold.
pub fn make_folds(gt: &EventCalendar, config: &FoldConfig) -> Result<Vec<FoldSpec>, EvalError> {
    let n = gt.len();
    if config.folds == 0 || config.train_size < 2 || config.test_size < 2 {
        return Err(EvalError::Protocol("need at least one fold and two days per split"));
    }
    if config.train_size + config.test_size > n {
        return Err(EvalError::Protocol("train + test size exceeds the number of days"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut days: Vec<u32> = (0..n as u32).collect();
    let mut out = Vec::with_capacity(config.folds);
    for index in 0..config.folds {
        let (mut train, mut test) = match config.split {
            SplitMode::Random => {
                let mut attempt = 0;
                loop {
                    attempt += 1;
                    for i in (1..n).rev() {
                        let j = rng.random_range(0..=i as u64) as usize;
                        days.swap(i, j);
                    }
                    let train = days[..config.train_size].to_vec();
                    let test = days[config.train_size..config.train_size + config.test_size].to_vec();
                    if has_both(&train, gt) && has_both(&test, gt) {
                        break (train, test);
                    }
                    if attempt == MAX_FOLD_ATTEMPTS {
                        return Err(EvalError::Protocol("no two-class fold after 100 attempts"));
                    }
                }
            }
            SplitMode::Contiguous => {
                let slack = n - config.train_size - config.test_size;
                let start = if config.folds > 1 { slack * index / (config.folds - 1) } else { 0 };
                let mid = start + config.train_size;
                let train: Vec<u32> = (start as u32..mid as u32).collect();
                let test: Vec<u32> = (mid as u32..(mid + config.test_size) as u32).collect();
                if !(has_both(&train, gt) && has_both(&test, gt)) {
                    return Err(EvalError::Protocol("contiguous fold lacks a class"));
                }
                (train, test)
            }
        };
        train.sort_unstable();
        test.sort_unstable();
        out.push(FoldSpec { index, seed: config.seed, train_days: train, test_days: test });
    }
    Ok(out)
}

/// Calendar with its day labels shuffled (permutation null).
pub fn permute_labels(gt: &EventCalendar, seed: u64) -> EventCalendar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = gt.bits.clone();
    for i in (1..bits.len()).rev() {
        let j = rng.random_range(0..=i as u64) as usize;
        bits.swap(i, j);
    }
    EventCalendar::from_bits(bits)
}

/// Top-n feature selection strategy, so callers can substitute a parallel
/// implementation with identical output.
pub trait Ranker {
    fn rank(
        &self,
        matrix: &CountMatrix,
        gt: &EventCalendar,
        days: Option<&[u32]>,
        config: &SelectionConfig,
    ) -> Result<Vec<FeatureScore>, ScoringError>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialRanker;

impl Ranker for SequentialRanker {
    fn rank(
        &self,
        matrix: &CountMatrix,
        gt: &EventCalendar,
        days: Option<&[u32]>,
        config: &SelectionConfig,
    ) -> Result<Vec<FeatureScore>, ScoringError> {
        rank_top_n_on_days(matrix, gt, days, config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolConfig {
    pub selection: SelectionConfig,
    pub classifier: ClassifierConfig,
    pub folds: FoldConfig,
    pub scope: SelectionScope,
    /// Scores at or above this are predicted event days.
    pub decision_threshold: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            selection: SelectionConfig::default(),
            classifier: ClassifierConfig::default(),
            folds: FoldConfig::default(),
            scope: SelectionScope::PerFold,
            decision_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldResult {
    pub index: usize,
    pub train_days: usize,
    pub test_days: usize,
    pub selected: Vec<WordPair>,
    pub metrics: MetricSet,
    /// `(fpr, tpr)`.
    pub roc: Vec<(f64, f64)>,
    /// `(recall, precision)`.
    pub pr: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub config: ProtocolConfig,
    pub folds: Vec<FoldResult>,
    pub mean: MetricSet,
}

impl EvalReport {
    pub fn from_folds(config: ProtocolConfig, folds: Vec<FoldResult>) -> Self {
        let sets: Vec<MetricSet> = folds.iter().map(|f| f.metrics).collect();
        EvalReport { config, mean: MetricSet::mean(&sets), folds }
    }
}

/// Selects features (training days only unless the scope is global), fits the
/// classifier on training days and scores the test days.
pub fn run_fold(
    matrix: &CountMatrix,
    gt: &EventCalendar,
    fold: &FoldSpec,
    config: &ProtocolConfig,
    ranker: &dyn Ranker,
) -> Result<FoldResult, EvalError> {
    let days = match config.scope {
        SelectionScope::PerFold => Some(fold.train_days.as_slice()),
        SelectionScope::Global => None,
    };
    let ranked = ranker.rank(matrix, gt, days, &config.selection)?;
    let selected: Vec<WordPair> = ranked.into_iter().map(|f| f.pair).collect();
    let train = FeatureMatrix::from_counts(matrix, &selected, &fold.train_days);
    let y_train: Vec<bool> = fold.train_days.iter().map(|&d| gt.bits[d as usize]).collect();
    let model = TrainedModel::fit(&train, &y_train, &config.classifier)?;
    let test = FeatureMatrix::from_counts(matrix, &selected, &fold.test_days);
    let y_test: Vec<bool> = fold.test_days.iter().map(|&d| gt.bits[d as usize]).collect();
    let scores = model.predict_all(&test)?;
    Ok(FoldResult {
        index: fold.index,
        train_days: fold.train_days.len(),
        test_days: fold.test_days.len(),
        selected,
        metrics: MetricSet::compute(&y_test, &scores, config.decision_threshold)?,
        roc: roc_curve(&y_test, &scores)?,
        pr: pr_curve(&y_test, &scores)?,
    })
}

/// Runs every fold in order.
pub fn cross_validate(
    matrix: &CountMatrix,
    gt: &EventCalendar,
    config: &ProtocolConfig,
    ranker: &dyn Ranker,
) -> Result<EvalReport, EvalError> {
    if matrix.num_days() as usize != gt.len() {
        return Err(EvalError::Protocol("count matrix and calendar differ in length"));
    }
    let folds = make_folds(gt, &config.folds)?;
    let results = folds
        .iter()
        .map(|f| run_fold(matrix, gt, f, config, ranker))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvalReport::from_folds(*config, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::countstore::CountBuilder;
    use crate::scoring::Method;
    use alloc::collections::BTreeSet;
    use alloc::format;
    use alloc::vec;

    fn calendar(n: usize, seed: u64) -> EventCalendar {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        EventCalendar::from_bits((0..n).map(|_| rng.random_bool(0.2)).collect())
    }

    #[test]
    fn folds_are_disjoint_sized_and_two_class() {
        let gt = calendar(640, 1);
        let folds = make_folds(&gt, &FoldConfig { seed: 7, ..FoldConfig::default() }).unwrap();
        assert_eq!(folds.len(), 10);
        for f in &folds {
            assert_eq!((f.train_days.len(), f.test_days.len()), (500, 140));
            let train: BTreeSet<_> = f.train_days.iter().collect();
            assert!(f.test_days.iter().all(|d| !train.contains(d)));
            assert!(f.train_days.windows(2).all(|w| w[0] < w[1]));
            assert!(has_both(&f.train_days, &gt) && has_both(&f.test_days, &gt));
        }
        assert_ne!(folds[0], folds[1]);
    }

    #[test]
    fn folds_are_reproducible() {
        let gt = calendar(300, 2);
        let cfg = FoldConfig { train_size: 200, test_size: 60, seed: 11, ..FoldConfig::default() };
        assert_eq!(make_folds(&gt, &cfg).unwrap(), make_folds(&gt, &cfg).unwrap());
        let other = FoldConfig { seed: 12, ..cfg };
        assert_ne!(make_folds(&gt, &cfg).unwrap(), make_folds(&gt, &other).unwrap());
    }

    #[test]
    fn oversize_and_single_class_folds_rejected() {
        let gt = calendar(100, 3);
        assert!(make_folds(&gt, &FoldConfig::default()).is_err());
        let mut one = vec![false; 100];
        one[0] = true;
        let cfg = FoldConfig { train_size: 50, test_size: 50, ..FoldConfig::default() };
        assert_eq!(
            make_folds(&EventCalendar::from_bits(one), &cfg),
            Err(EvalError::Protocol("no two-class fold after 100 attempts"))
        );
    }

    #[test]
    fn contiguous_train_precedes_test() {
        let gt = calendar(640, 4);
        let cfg = FoldConfig { split: SplitMode::Contiguous, train_size: 400, test_size: 140, ..FoldConfig::default() };
        let folds = make_folds(&gt, &cfg).unwrap();
        for f in &folds {
            assert!(f.train_days.last() < f.test_days.first());
        }
        assert_eq!(folds[9].test_days.last(), Some(&639));
    }

    #[test]
    fn permutation_keeps_event_count() {
        let gt = calendar(200, 5);
        let p = permute_labels(&gt, 9);
        assert_eq!(p.event_days(), gt.event_days());
        assert_ne!(p.bits, gt.bits);
    }

    /// Planted pairs spike on event days; noise pairs are flat with jitter.
    fn toy_matrix(gt: &EventCalendar) -> CountMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut m = CountBuilder::new(gt.len() as u32, 0).unwrap();
        for p in 0..5 {
            for (d, &e) in gt.bits.iter().enumerate() {
                let c = rng.random_range(0..3) + if e && rng.random_bool(0.8) { 8 } else { 0 };
                m.add_count(&format!("pa{p}"), &format!("pb{p}"), d as u32, c).unwrap();
            }
        }
        for p in 0..40 {
            for d in 0..gt.len() {
                m.add_count(&format!("n{p}"), &format!("m{p}"), d as u32, rng.random_range(0..4)).unwrap();
            }
        }
        m.finish().unwrap()
    }

    #[test]
    fn protocol_detects_planted_signal() {
        let gt = calendar(200, 6);
        let m = toy_matrix(&gt);
        let cfg = ProtocolConfig {
            selection: SelectionConfig { method: Method::SpikeMatch, top_n: 5, ..SelectionConfig::default() },
            folds: FoldConfig { folds: 3, train_size: 150, test_size: 50, seed: 1, ..FoldConfig::default() },
            ..ProtocolConfig::default()
        };
        let report = cross_validate(&m, &gt, &cfg, &SequentialRanker).unwrap();
        assert_eq!(report.folds.len(), 3);
        assert!(report.mean.auc_roc > 0.9, "{:?}", report.mean);
        for f in &report.folds {
            assert!(f.selected.iter().all(|p| p.first().starts_with("pa")));
        }
        assert_eq!(report, cross_validate(&m, &gt, &cfg, &SequentialRanker).unwrap());
    }

    #[test]
    fn selection_never_sees_test_days() {
        let gt = calendar(120, 8);
        let m = toy_matrix(&gt);
        let fold = &make_folds(&gt, &FoldConfig { folds: 1, train_size: 80, test_size: 40, seed: 3, ..FoldConfig::default() })
            .unwrap()[0];
        let cfg = ProtocolConfig {
            selection: SelectionConfig { top_n: 10, ..SelectionConfig::default() },
            ..ProtocolConfig::default()
        };
        let base = run_fold(&m, &gt, fold, &cfg, &SequentialRanker).unwrap();
        // overwrite every test day with large counts on a noise pair
        let mut extra = CountBuilder::new(m.num_days(), 0).unwrap();
        for &d in &fold.test_days {
            extra.add_count("n0", "m0", d, 1000).unwrap();
        }
        let mut tampered = m.clone();
        tampered.merge(&extra.finish().unwrap()).unwrap();
        let mut gt2 = gt.clone();
        for &d in &fold.test_days {
            gt2.bits[d as usize] = !gt2.bits[d as usize];
        }
        let again = run_fold(&tampered, &gt2, fold, &cfg, &SequentialRanker).unwrap();
        assert_eq!(base.selected, again.selected);
    }
}
