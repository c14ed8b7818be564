//! Spike filter for count series and binarization of the event calendar.

use alloc::vec::Vec;
use core::fmt;

/// Minimum height a day must rise above both of its neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpikeConfig {
    threshold: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidThreshold;

impl fmt::Display for InvalidThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("spike threshold must be at least 1")
    }
}

impl core::error::Error for InvalidThreshold {}

impl SpikeConfig {
    pub fn new(threshold: u32) -> Result<Self, InvalidThreshold> {
        if threshold == 0 {
            Err(InvalidThreshold)
        } else {
            Ok(SpikeConfig { threshold })
        }
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }
}

impl Default for SpikeConfig {
    fn default() -> Self {
        SpikeConfig { threshold: 1 }
    }
}

/// Per-day spike indicator of one series. The first and last day are never
/// spikes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeVector {
    pub bits: Vec<bool>,
}

impl SpikeVector {
    pub fn positions(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Writes spike bits of `series` into `out` (same length).
pub fn spikes_into(series: &[u32], config: SpikeConfig, out: &mut [bool]) {
    debug_assert_eq!(series.len(), out.len());
    out.fill(false);
    let theta = i64::from(config.threshold);
    for t in 1..series.len().saturating_sub(1) {
        let x = i64::from(series[t]);
        out[t] = x - i64::from(series[t - 1]) >= theta && x - i64::from(series[t + 1]) >= theta;
    }
}

/// Day `t` is a spike when `x(t) − x(t−1) ≥ θ` and `x(t) − x(t+1) ≥ θ`.
pub fn binarize_series(series: &[u32], config: SpikeConfig) -> SpikeVector {
    let mut bits = alloc::vec![false; series.len()];
    spikes_into(series, config, &mut bits);
    SpikeVector { bits }
}

/// Binary event/non-event day calendar.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EventCalendar {
    pub bits: Vec<bool>,
    pub source_counts: Option<Vec<u32>>,
}

impl EventCalendar {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        EventCalendar { bits, source_counts: None }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn event_days(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Calendar restricted to `days`, in the given order.
    pub fn select(&self, days: &[u32]) -> EventCalendar {
        EventCalendar::from_bits(days.iter().map(|&d| self.bits[d as usize]).collect())
    }
}

/// A day is an event day when at least one event was recorded on it.
pub fn binarize_events(event_counts: &[u32]) -> EventCalendar {
    EventCalendar {
        bits: event_counts.iter().map(|&c| c > 0).collect(),
        source_counts: Some(event_counts.to_vec()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    const SERIES: [u32; 20] = [2, 3, 3, 4, 5, 3, 2, 3, 8, 3, 3, 1, 3, 9, 3, 1, 2, 4, 5, 1];
    const GT: [u32; 20] = [0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 1, 0];

    #[test]
    fn twenty_day_example() {
        let v = binarize_series(&SERIES, SpikeConfig::default());
        assert_eq!(v.positions(), vec![4, 8, 13, 18]);
    }

    #[test]
    fn flat_series_has_no_spikes() {
        assert_eq!(binarize_series(&[5, 5, 5, 5], SpikeConfig::default()).count(), 0);
    }

    #[test]
    fn threshold_boundary() {
        let nine = SpikeConfig::new(9).unwrap();
        let ten = SpikeConfig::new(10).unwrap();
        assert_eq!(binarize_series(&[0, 9, 0], nine).bits, vec![false, true, false]);
        assert_eq!(binarize_series(&[0, 9, 0], ten).bits, vec![false, false, false]);
    }

    #[test]
    fn short_series() {
        assert!(binarize_series(&[], SpikeConfig::default()).bits.is_empty());
        assert_eq!(binarize_series(&[3, 9], SpikeConfig::default()).count(), 0);
    }

    #[test]
    fn zero_threshold_rejected() {
        assert_eq!(SpikeConfig::new(0), Err(InvalidThreshold));
    }

    #[test]
    fn event_binarization() {
        let cal = binarize_events(&[0, 2, 0, 1]);
        assert_eq!(cal.bits, vec![false, true, false, true]);
        assert!(binarize_events(&[0, 0, 0]).bits.iter().all(|b| !b));
        let fixed = binarize_events(&GT);
        let again: Vec<u32> = fixed.bits.iter().map(|&b| u32::from(b)).collect();
        assert_eq!(again, GT.to_vec());
    }

    proptest! {
        #[test]
        fn shift_invariant(series in proptest::collection::vec(0u32..50, 0..60), c in 0u32..1000, theta in 1u32..6) {
            let cfg = SpikeConfig::new(theta).unwrap();
            let shifted: Vec<u32> = series.iter().map(|x| x + c).collect();
            prop_assert_eq!(binarize_series(&series, cfg), binarize_series(&shifted, cfg));
        }

        #[test]
        fn threshold_monotone(series in proptest::collection::vec(0u32..50, 0..60), lo in 1u32..10, extra in 0u32..10) {
            let low = binarize_series(&series, SpikeConfig::new(lo).unwrap());
            let high = binarize_series(&series, SpikeConfig::new(lo + extra).unwrap());
            for (h, l) in high.bits.iter().zip(&low.bits) {
                prop_assert!(!h | l);
            }
        }

        #[test]
        fn endpoints_never_spike(series in proptest::collection::vec(0u32..50, 1..60)) {
            let v = binarize_series(&series, SpikeConfig::default());
            prop_assert!(!v.bits[0]);
            prop_assert!(!v.bits[series.len() - 1]);
        }

        #[test]
        fn event_binarization_idempotent(bits in proptest::collection::vec(0u32..2, 0..40)) {
            let once = binarize_events(&bits);
            let as_counts: Vec<u32> = once.bits.iter().map(|&b| u32::from(b)).collect();
            prop_assert_eq!(binarize_events(&as_counts).bits, once.bits);
        }
    }
}
