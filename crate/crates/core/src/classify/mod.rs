//! Day classifiers over selected word-pair counts: the histogram Naive Bayes
//! model and three small reference baselines.

use alloc::vec::Vec;
use core::fmt;

use crate::countstore::CountMatrix;
use crate::ingest::WordPair;

mod baseline;
mod nb;

pub use baseline::{
    logistic_loss_and_gradient, BaselineHyper, BaselineKind, BaselineModel, BaselineParams, DecisionTree, Knn,
    LogisticRegression, Standardizer, TreeNode,
};
pub use nb::{NbModel, DEFAULT_ALPHA, DEFAULT_COUNT_CAP};

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifyError {
    /// Training labels contain only one class; names the class present.
    SingleClass(&'static str),
    DimensionMismatch { expected: usize, got: usize },
    NoFeatures,
    InvalidHyper(&'static str),
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyError::SingleClass(c) => write!(f, "training labels contain only {c} days"),
            ClassifyError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            ClassifyError::NoFeatures => f.write_str("feature matrix has no features"),
            ClassifyError::InvalidHyper(what) => write!(f, "invalid hyperparameter: {what}"),
        }
    }
}

impl core::error::Error for ClassifyError {}

/// Raw per-day counts of the selected features, row-major (day × feature).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureMatrix {
    pub features: Vec<WordPair>,
    pub days: Vec<u32>,
    values: Vec<u32>,
}

impl FeatureMatrix {
    pub fn from_rows(features: Vec<WordPair>, days: Vec<u32>, values: Vec<u32>) -> Result<Self, ClassifyError> {
        let expected = features.len() * days.len();
        if values.len() != expected {
            return Err(ClassifyError::DimensionMismatch { expected, got: values.len() });
        }
        Ok(FeatureMatrix { features, days, values })
    }

    /// Extracts `features` on `days` from a count matrix. Absent pairs give
    /// all-zero columns.
    pub fn from_counts(matrix: &CountMatrix, features: &[WordPair], days: &[u32]) -> Self {
        let nf = features.len();
        let mut values = alloc::vec![0u32; nf * days.len()];
        let mut dense = alloc::vec![0u32; matrix.num_days() as usize];
        for (f, pair) in features.iter().enumerate() {
            let Some(series) = matrix.series(pair) else { continue };
            series.fill_dense(&mut dense);
            for (row, &d) in days.iter().enumerate() {
                values[row * nf + f] = dense[d as usize];
            }
        }
        FeatureMatrix { features: features.to_vec(), days: days.to_vec(), values }
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn num_days(&self) -> usize {
        self.days.len()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let nf = self.features.len();
        &self.values[i * nf..(i + 1) * nf]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.days.len()).map(move |i| self.row(i))
    }
}

pub(crate) fn check_labels(x: &FeatureMatrix, y: &[bool]) -> Result<(), ClassifyError> {
    if x.num_days() != y.len() {
        return Err(ClassifyError::DimensionMismatch { expected: x.num_days(), got: y.len() });
    }
    if x.num_features() == 0 {
        return Err(ClassifyError::NoFeatures);
    }
    if !y.iter().any(|&b| b) {
        return Err(ClassifyError::SingleClass("non-event"));
    }
    if y.iter().all(|&b| b) {
        return Err(ClassifyError::SingleClass("event"));
    }
    Ok(())
}

/// Which classifier to fit on the selected features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ClassifierKind {
    #[default]
    NaiveBayes,
    LogisticRegression,
    Knn,
    DecisionTree,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 4] = [
        ClassifierKind::NaiveBayes,
        ClassifierKind::LogisticRegression,
        ClassifierKind::Knn,
        ClassifierKind::DecisionTree,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "naive_bayes",
            ClassifierKind::LogisticRegression => "logistic_regression",
            ClassifierKind::Knn => "knn",
            ClassifierKind::DecisionTree => "decision_tree",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ClassifierKind::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    pub count_cap: u32,
    pub alpha: f64,
    pub hyper: BaselineHyper,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            kind: ClassifierKind::NaiveBayes,
            count_cap: DEFAULT_COUNT_CAP,
            alpha: DEFAULT_ALPHA,
            hyper: BaselineHyper::default(),
        }
    }
}

/// Any fitted day classifier.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "classifier", rename_all = "snake_case"))]
pub enum TrainedModel {
    NaiveBayes(NbModel),
    Baseline(BaselineModel),
}

impl TrainedModel {
    pub fn fit(x: &FeatureMatrix, y: &[bool], config: &ClassifierConfig) -> Result<Self, ClassifyError> {
        Ok(match config.kind {
            ClassifierKind::NaiveBayes => TrainedModel::NaiveBayes(NbModel::train(x, y, config.count_cap, config.alpha)?),
            ClassifierKind::LogisticRegression => {
                TrainedModel::Baseline(BaselineModel::train(BaselineKind::LogisticRegression, x, y, &config.hyper)?)
            }
            ClassifierKind::Knn => TrainedModel::Baseline(BaselineModel::train(BaselineKind::Knn, x, y, &config.hyper)?),
            ClassifierKind::DecisionTree => {
                TrainedModel::Baseline(BaselineModel::train(BaselineKind::DecisionTree, x, y, &config.hyper)?)
            }
        })
    }

    pub fn features(&self) -> &[WordPair] {
        match self {
            TrainedModel::NaiveBayes(m) => &m.features,
            TrainedModel::Baseline(m) => m.features(),
        }
    }

    /// Event score in [0, 1] for one day's feature counts.
    pub fn predict(&self, x: &[u32]) -> Result<f64, ClassifyError> {
        match self {
            TrainedModel::NaiveBayes(m) => m.predict(x),
            TrainedModel::Baseline(m) => m.predict(x),
        }
    }

    pub fn predict_all(&self, x: &FeatureMatrix) -> Result<Vec<f64>, ClassifyError> {
        x.rows().map(|r| self.predict(r)).collect()
    }
}
