//! Association scores between a word pair's daily counts and the event
//! calendar, and top-n feature selection.
//!
//! Every score is finite; degenerate inputs (constant series, empty
//! supports) score 0 so that rankings are total.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::countstore::{CountMatrix, PairRef, SparseSeries};
use crate::ingest::WordPair;
use crate::signal::{spikes_into, EventCalendar, SpikeConfig};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScoringError {
    LengthMismatch { left: usize, right: usize },
    TooShort(usize),
    TopNTooLarge { top_n: usize, available: usize },
    ZeroTopN,
    UnknownMethod(String),
}

impl fmt::Display for ScoringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoringError::LengthMismatch { left, right } => {
                write!(f, "vectors differ in length ({left} vs {right})")
            }
            ScoringError::TooShort(n) => write!(f, "need at least 2 days to score, got {n}"),
            ScoringError::TopNTooLarge { top_n, available } => {
                write!(f, "top_n = {top_n} exceeds the {available} available pairs")
            }
            ScoringError::ZeroTopN => f.write_str("top_n must be positive"),
            ScoringError::UnknownMethod(m) => write!(f, "unknown selection method {m:?}"),
        }
    }
}

impl core::error::Error for ScoringError {}

/// Feature selection method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    /// Jaccard index of the spike vector against the calendar.
    SpikeMatch,
    /// Jaccard index of the presence vector (count > 0) against the calendar.
    JaccardRaw,
    Pearson,
    Spearman,
    DistanceCorrelation,
    /// Plug-in MI (nats) between presence and the calendar.
    MutualInformation,
    Cosine,
    /// Event-day term frequency times inverse day frequency, max-normalized
    /// over the candidate set.
    Tfidf,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::SpikeMatch,
        Method::JaccardRaw,
        Method::Pearson,
        Method::Spearman,
        Method::DistanceCorrelation,
        Method::MutualInformation,
        Method::Cosine,
        Method::Tfidf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SpikeMatch => "spike_match",
            Method::JaccardRaw => "jaccard_raw",
            Method::Pearson => "pearson",
            Method::Spearman => "spearman",
            Method::DistanceCorrelation => "distance_correlation",
            Method::MutualInformation => "mutual_information",
            Method::Cosine => "cosine",
            Method::Tfidf => "tfidf",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ScoringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| ScoringError::UnknownMethod(String::from(s)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SelectionConfig {
    pub method: Method,
    pub top_n: usize,
    pub spike: SpikeConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { method: Method::SpikeMatch, top_n: 100, spike: SpikeConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureScore {
    pub pair: WordPair,
    pub method: Method,
    pub score: f64,
}

fn check_len(a: usize, b: usize) -> Result<(), ScoringError> {
    if a == b {
        Ok(())
    } else {
        Err(ScoringError::LengthMismatch { left: a, right: b })
    }
}

/// `Σ min(a_i, b_i) / Σ max(a_i, b_i)`; 0 when both vectors are empty of ones.
pub fn jaccard_binary(a: &[bool], b: &[bool]) -> Result<f64, ScoringError> {
    check_len(a.len(), b.len())?;
    Ok(jaccard_unchecked(a, b))
}

fn jaccard_unchecked(a: &[bool], b: &[bool]) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        inter += usize::from(x & y);
        union += usize::from(x | y);
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Jaccard index between the spike vector of `series` and the calendar.
pub fn spike_match_score(series: &[u32], gt: &EventCalendar, config: SpikeConfig) -> Result<f64, ScoringError> {
    check_len(series.len(), gt.len())?;
    let mut bits = vec![false; series.len()];
    spikes_into(series, config, &mut bits);
    Ok(jaccard_unchecked(&bits, &gt.bits))
}

/// Distance correlation of two samples (Euclidean distances, double
/// centering). O(n²) time, O(n) memory.
pub fn distance_correlation(x: &[f64], y: &[f64]) -> Result<f64, ScoringError> {
    check_len(x.len(), y.len())?;
    let n = x.len();
    let (ra, rb) = (stats::abs_diff_row_sums(x), stats::abs_diff_row_sums(y));
    let mut sum_ab = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum_ab += libm::fabs(x[i] - x[j]) * libm::fabs(y[i] - y[j]);
        }
    }
    Ok(stats::dcor_from_parts(sum_ab, &ra, &rb, stats::sum_sq_diffs(x), stats::sum_sq_diffs(y)))
}

/// Distance correlation against a binary variable in O(n log n).
pub fn distance_correlation_binary(x: &[f64], y: &[bool]) -> Result<f64, ScoringError> {
    check_len(x.len(), y.len())?;
    let n = x.len();
    let pos: Vec<f64> = x.iter().zip(y).filter(|(_, &b)| b).map(|(&v, _)| v).collect();
    let neg: Vec<f64> = x.iter().zip(y).filter(|(_, &b)| !b).map(|(&v, _)| v).collect();
    let (np, nn) = (pos.len() as f64, neg.len() as f64);
    let sum_ab = 2.0 * stats::cross_abs_diff_sum(&pos, &neg);
    let ra = stats::abs_diff_row_sums(x);
    let rb: Vec<f64> = y.iter().map(|&b| if b { nn } else { np }).collect();
    let _ = n;
    Ok(stats::dcor_from_parts(sum_ab, &ra, &rb, stats::sum_sq_diffs(x), 2.0 * np * nn))
}

fn cosine(x: &[f64], g: &[bool]) -> f64 {
    let (mut dot, mut xx, mut gg) = (0.0, 0.0, 0.0);
    for (&v, &b) in x.iter().zip(g) {
        xx += v * v;
        if b {
            dot += v;
            gg += 1.0;
        }
    }
    if xx <= 0.0 || gg <= 0.0 {
        0.0
    } else {
        dot / libm::sqrt(xx * gg)
    }
}

/// Un-normalized TF-IDF adaptation for day series:
/// `mean count on event days / (1 + mean count) · ln(days / support)`.
fn tfidf_raw(x: &[f64], g: &[bool]) -> f64 {
    let n = x.len();
    let support = x.iter().filter(|&&v| v > 0.0).count();
    let events = g.iter().filter(|&&b| b).count();
    if support == 0 || events == 0 || n == 0 {
        return 0.0;
    }
    let event_mean = x.iter().zip(g).filter(|(_, &b)| b).map(|(v, _)| v).sum::<f64>() / events as f64;
    let overall = stats::mean(x);
    event_mean / (1.0 + overall) * libm::log(n as f64 / support as f64)
}

/// Scores a dense count series against calendar bits.
///
/// For [`Method::Tfidf`] this is the raw value; ranking divides by the
/// maximum over all candidates.
pub fn associate(method: Method, series: &[u32], gt: &[bool], spike: SpikeConfig) -> Result<f64, ScoringError> {
    check_len(series.len(), gt.len())?;
    if series.len() < 2 {
        return Err(ScoringError::TooShort(series.len()));
    }
    let mut scratch = Scratch::default();
    Ok(scratch.score(method, series, gt, spike))
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    bits: Vec<bool>,
    values: Vec<f64>,
    gt_f: Vec<f64>,
}

impl Scratch {
    fn score(&mut self, method: Method, series: &[u32], gt: &[bool], spike: SpikeConfig) -> f64 {
        let n = series.len();
        match method {
            Method::SpikeMatch => {
                self.bits.resize(n, false);
                spikes_into(series, spike, &mut self.bits);
                jaccard_unchecked(&self.bits, gt)
            }
            Method::JaccardRaw => {
                self.bits.clear();
                self.bits.extend(series.iter().map(|&c| c > 0));
                jaccard_unchecked(&self.bits, gt)
            }
            Method::MutualInformation => {
                self.bits.clear();
                self.bits.extend(series.iter().map(|&c| c > 0));
                stats::binary_mutual_information(&self.bits, gt)
            }
            _ => {
                self.values.clear();
                self.values.extend(series.iter().map(|&c| f64::from(c)));
                let x = &self.values;
                match method {
                    Method::Pearson => {
                        self.gt_f.clear();
                        self.gt_f.extend(gt.iter().map(|&b| f64::from(u8::from(b))));
                        stats::pearson(x, &self.gt_f)
                    }
                    Method::Spearman => {
                        self.gt_f.clear();
                        self.gt_f.extend(gt.iter().map(|&b| f64::from(u8::from(b))));
                        stats::pearson(&stats::average_ranks(x), &stats::average_ranks(&self.gt_f))
                    }
                    Method::DistanceCorrelation => distance_correlation_binary(x, gt).unwrap_or(0.0),
                    Method::Cosine => cosine(x, gt),
                    Method::Tfidf => tfidf_raw(x, gt),
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// Reusable per-worker scorer. Holds the calendar (optionally restricted to
/// a subset of days) and scratch buffers.
#[derive(Debug, Clone)]
pub struct PairScorer {
    method: Method,
    spike: SpikeConfig,
    num_days: u32,
    days: Option<Vec<u32>>,
    gt: Vec<bool>,
    dense: Vec<u32>,
    restricted: Vec<u32>,
    scratch: Scratch,
}

impl PairScorer {
    /// `days`, when given, lists the calendar days (ascending) the score is
    /// computed on; the series is compacted to those days in order.
    pub fn new(
        matrix: &CountMatrix,
        gt: &EventCalendar,
        days: Option<&[u32]>,
        config: &SelectionConfig,
    ) -> Result<Self, ScoringError> {
        check_len(matrix.num_days() as usize, gt.len())?;
        let gt_bits = match days {
            Some(d) => d.iter().map(|&i| gt.bits[i as usize]).collect::<Vec<_>>(),
            None => gt.bits.clone(),
        };
        if gt_bits.len() < 2 {
            return Err(ScoringError::TooShort(gt_bits.len()));
        }
        Ok(PairScorer {
            method: config.method,
            spike: config.spike,
            num_days: matrix.num_days(),
            days: days.map(<[u32]>::to_vec),
            gt: gt_bits,
            dense: vec![0; matrix.num_days() as usize],
            restricted: Vec::new(),
            scratch: Scratch::default(),
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn score(&mut self, series: SparseSeries<'_>) -> f64 {
        debug_assert_eq!(self.dense.len(), self.num_days as usize);
        series.fill_dense(&mut self.dense);
        let values: &[u32] = match &self.days {
            Some(days) => {
                self.restricted.clear();
                self.restricted.extend(days.iter().map(|&d| self.dense[d as usize]));
                &self.restricted
            }
            None => &self.dense,
        };
        self.scratch.score(self.method, values, &self.gt, self.spike)
    }
}

fn rank_order(a: &(PairRef<'_>, f64), b: &(PairRef<'_>, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

/// Sorts scored pairs (descending score, then lexicographic pair) and keeps
/// the first `top_n`. TF-IDF scores are divided by their maximum first.
pub fn finalize_ranking(
    mut scored: Vec<(PairRef<'_>, f64)>,
    method: Method,
    top_n: usize,
) -> Result<Vec<FeatureScore>, ScoringError> {
    if top_n == 0 {
        return Err(ScoringError::ZeroTopN);
    }
    if top_n > scored.len() {
        return Err(ScoringError::TopNTooLarge { top_n, available: scored.len() });
    }
    for s in &mut scored {
        if !s.1.is_finite() {
            s.1 = 0.0;
        }
    }
    if method == Method::Tfidf {
        let max = scored.iter().map(|s| s.1).fold(0.0, f64::max);
        if max > 0.0 {
            for s in &mut scored {
                s.1 /= max;
            }
        }
    }
    if top_n < scored.len() {
        scored.select_nth_unstable_by(top_n - 1, rank_order);
        scored.truncate(top_n);
    }
    scored.sort_unstable_by(rank_order);
    Ok(scored
        .into_iter()
        .map(|(p, score)| FeatureScore { pair: p.to_pair(), method, score })
        .collect())
}

/// Scores every pair of `matrix` and returns the best `top_n`.
pub fn rank_top_n(
    matrix: &CountMatrix,
    gt: &EventCalendar,
    config: &SelectionConfig,
) -> Result<Vec<FeatureScore>, ScoringError> {
    rank_top_n_on_days(matrix, gt, None, config)
}

/// As [`rank_top_n`], using only the listed days.
pub fn rank_top_n_on_days(
    matrix: &CountMatrix,
    gt: &EventCalendar,
    days: Option<&[u32]>,
    config: &SelectionConfig,
) -> Result<Vec<FeatureScore>, ScoringError> {
    let mut scorer = PairScorer::new(matrix, gt, days, config)?;
    let scored: Vec<_> = matrix.iter().map(|(p, s)| (p, scorer.score(s))).collect();
    finalize_ranking(scored, config.method, config.top_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::binarize_events;
    use alloc::collections::BTreeSet;
    use alloc::vec;
    use proptest::prelude::*;

    const SERIES: [u32; 20] = [2, 3, 3, 4, 5, 3, 2, 3, 8, 3, 3, 1, 3, 9, 3, 1, 2, 4, 5, 1];
    const GT: [u32; 20] = [0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 1, 0];

    fn bits(v: &[u32]) -> Vec<bool> {
        v.iter().map(|&x| x > 0).collect()
    }

    #[test]
    fn example_jaccard_is_three_fifths() {
        let bow = bits(&[0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0]);
        assert_eq!(jaccard_binary(&bow, &bits(&GT)).unwrap(), 3.0 / 5.0);
        let gt = binarize_events(&GT);
        assert_eq!(spike_match_score(&SERIES, &gt, SpikeConfig::default()).unwrap(), 0.6);
    }

    #[test]
    fn jaccard_edge_cases() {
        let a = bits(&[1, 0, 1]);
        assert_eq!(jaccard_binary(&a, &a).unwrap(), 1.0);
        assert_eq!(jaccard_binary(&a, &bits(&[0, 1, 0])).unwrap(), 0.0);
        assert_eq!(jaccard_binary(&bits(&[0, 0]), &bits(&[0, 0])).unwrap(), 0.0);
        assert_eq!(
            jaccard_binary(&a, &bits(&[1])),
            Err(ScoringError::LengthMismatch { left: 3, right: 1 })
        );
    }

    #[test]
    fn zero_series_scores_zero() {
        let gt = binarize_events(&GT);
        for m in Method::ALL {
            assert_eq!(associate(m, &[0; 20], &gt.bits, SpikeConfig::default()).unwrap(), 0.0, "{m}");
        }
    }

    #[test]
    fn series_spiking_on_event_days_scores_one() {
        // flat baseline 3, height θ + 2 on each event day (no adjacent events)
        let theta = 2;
        let series: Vec<u32> = GT.iter().map(|&g| if g > 0 { 3 + theta + 2 } else { 3 }).collect();
        let gt = binarize_events(&GT);
        let cfg = SpikeConfig::new(theta).unwrap();
        let spikes = crate::signal::binarize_series(&series, cfg);
        assert_eq!(spikes.bits, gt.bits);
        assert_eq!(spike_match_score(&series, &gt, cfg).unwrap(), 1.0);
    }

    #[test]
    fn perfect_pearson_and_cosine() {
        let gt = bits(&GT);
        let s = SpikeConfig::default();
        assert!((associate(Method::Pearson, &GT, &gt, s).unwrap() - 1.0).abs() < 1e-12);
        assert!((associate(Method::Cosine, &GT, &gt, s).unwrap() - 1.0).abs() < 1e-12);
        let orth: Vec<u32> = GT.iter().map(|&g| 1 - g).collect();
        assert_eq!(associate(Method::Cosine, &orth, &gt, s).unwrap(), 0.0);
    }

    #[test]
    fn dcor_of_scaled_copy_is_one() {
        let x: Vec<f64> = SERIES.iter().map(|&v| f64::from(v)).collect();
        for c in [2.0, -0.5, 7.0] {
            let y: Vec<f64> = x.iter().map(|v| v * c).collect();
            assert!((distance_correlation(&x, &y).unwrap() - 1.0).abs() < 1e-9);
        }
        assert_eq!(distance_correlation(&x, &[1.0; 20]).unwrap(), 0.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("chi2".parse::<Method>().is_err());
    }

    #[test]
    fn too_short_rejected() {
        assert_eq!(
            associate(Method::Pearson, &[1], &[true], SpikeConfig::default()),
            Err(ScoringError::TooShort(1))
        );
    }

    fn matrix_of(rows: &[(&str, &str, &[u32])]) -> CountMatrix {
        let n = rows[0].2.len() as u32;
        let mut m = crate::countstore::CountBuilder::new(n, 0).unwrap();
        for (a, b, s) in rows {
            for (d, &c) in s.iter().enumerate() {
                m.add_count(a, b, d as u32, c).unwrap();
            }
            // keep empty rows present
            if s.iter().all(|&c| c == 0) {
                m.add_count(a, b, 0, 0).unwrap();
            }
        }
        m.finish().unwrap()
    }

    #[test]
    fn ties_break_lexicographically() {
        let s: &[u32] = &[0, 3, 0, 0, 3, 0];
        let m = matrix_of(&[("zz", "aa", s), ("bb", "cc", s), ("bb", "aa", s)]);
        let gt = EventCalendar::from_bits(bits(&[0, 1, 0, 0, 1, 0]));
        let cfg = SelectionConfig { top_n: 3, ..SelectionConfig::default() };
        let ranked = rank_top_n(&m, &gt, &cfg).unwrap();
        let names: Vec<_> = ranked.iter().map(|f| (f.pair.first(), f.pair.second())).collect();
        assert_eq!(names, vec![("bb", "aa"), ("bb", "cc"), ("zz", "aa")]);
        assert!(ranked.iter().all(|f| f.score == 1.0));
    }

    #[test]
    fn top_n_bounds() {
        let s: &[u32] = &[0, 3, 0, 1];
        let m = matrix_of(&[("a", "b", s)]);
        let gt = EventCalendar::from_bits(bits(&[0, 1, 0, 0]));
        let too_many = SelectionConfig { top_n: 2, ..SelectionConfig::default() };
        assert_eq!(rank_top_n(&m, &gt, &too_many), Err(ScoringError::TopNTooLarge { top_n: 2, available: 1 }));
        let zero = SelectionConfig { top_n: 0, ..SelectionConfig::default() };
        assert_eq!(rank_top_n(&m, &gt, &zero), Err(ScoringError::ZeroTopN));
    }

    #[test]
    fn tfidf_is_normalized() {
        let m = matrix_of(&[("a", "b", &[0, 4, 0, 0]), ("c", "d", &[1, 2, 0, 0]), ("e", "f", &[1, 1, 1, 1])]);
        let gt = EventCalendar::from_bits(bits(&[0, 1, 0, 0]));
        let cfg = SelectionConfig { method: Method::Tfidf, top_n: 3, ..SelectionConfig::default() };
        let ranked = rank_top_n(&m, &gt, &cfg).unwrap();
        assert_eq!(ranked[0].score, 1.0);
        assert_eq!(ranked[0].pair, WordPair::new("a", "b").unwrap());
        assert_eq!(ranked[2].score, 0.0);
        assert!(ranked.iter().all(|f| (0.0..=1.0).contains(&f.score)));
    }

    fn bool_vec(len: usize) -> impl Strategy<Value = Vec<bool>> {
        proptest::collection::vec(any::<bool>(), len)
    }

    proptest! {
        #[test]
        fn jaccard_matches_set_oracle((a, b) in (1usize..64).prop_flat_map(|n| (bool_vec(n), bool_vec(n)))) {
            let sa: BTreeSet<usize> = a.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i).collect();
            let sb: BTreeSet<usize> = b.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i).collect();
            let union = sa.union(&sb).count();
            let expect = if union == 0 { 0.0 } else { sa.intersection(&sb).count() as f64 / union as f64 };
            let got = jaccard_binary(&a, &b).unwrap();
            prop_assert_eq!(got, expect);
            prop_assert_eq!(got, jaccard_binary(&b, &a).unwrap());
            prop_assert!((0.0..=1.0).contains(&got));
            prop_assert_eq!(got == 1.0, a == b && a.iter().any(|&v| v));
        }

        #[test]
        fn scores_are_finite_and_bounded(
            (series, gt) in (2usize..80).prop_flat_map(|n| (proptest::collection::vec(0u32..30, n), bool_vec(n)))
        ) {
            for m in Method::ALL {
                let v = associate(m, &series, &gt, SpikeConfig::default()).unwrap();
                prop_assert!(v.is_finite());
                match m {
                    Method::Pearson | Method::Spearman => prop_assert!((-1.0..=1.0).contains(&v)),
                    Method::MutualInformation | Method::Tfidf => prop_assert!(v >= 0.0),
                    _ => prop_assert!((0.0..=1.0 + 1e-12).contains(&v), "{} {}", m, v),
                }
            }
        }

        #[test]
        fn scale_and_monotone_invariance(
            (series, gt) in (3usize..60).prop_flat_map(|n| (proptest::collection::vec(0u32..30, n), bool_vec(n))),
            k in 1u32..5, c in 0u32..50,
        ) {
            let s = SpikeConfig::default();
            let scaled: Vec<u32> = series.iter().map(|v| v * k).collect();
            let shifted: Vec<u32> = series.iter().map(|v| v + c).collect();
            let squared: Vec<u32> = series.iter().map(|v| v * v + 1).collect();
            let p = associate(Method::Pearson, &series, &gt, s).unwrap();
            prop_assert!((p - associate(Method::Pearson, &scaled, &gt, s).unwrap()).abs() < 1e-9);
            let cs = associate(Method::Cosine, &series, &gt, s).unwrap();
            prop_assert!((cs - associate(Method::Cosine, &scaled, &gt, s).unwrap()).abs() < 1e-9);
            let sp = associate(Method::Spearman, &series, &gt, s).unwrap();
            prop_assert!((sp - associate(Method::Spearman, &squared, &gt, s).unwrap()).abs() < 1e-9);
            let sm = associate(Method::SpikeMatch, &series, &gt, s).unwrap();
            prop_assert_eq!(sm, associate(Method::SpikeMatch, &shifted, &gt, s).unwrap());
        }

        #[test]
        fn binary_dcor_agrees_with_general(
            (x, g) in (2usize..50).prop_flat_map(|n| (proptest::collection::vec(0u32..20, n), bool_vec(n)))
        ) {
            let xf: Vec<f64> = x.iter().map(|&v| f64::from(v)).collect();
            let gf: Vec<f64> = g.iter().map(|&b| f64::from(u8::from(b))).collect();
            let fast = distance_correlation_binary(&xf, &g).unwrap();
            let slow = distance_correlation(&xf, &gf).unwrap();
            prop_assert!((fast - slow).abs() < 1e-9, "{} vs {}", fast, slow);
        }
    }
}
