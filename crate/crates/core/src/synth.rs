//! Seeded synthetic corpora with planted event-associated word pairs.
//!
//! Every pair owns a daily count series. Planted pairs add `spike_height`
//! on the days they fire: event days with probability `plant_fire_prob`,
//! other days with `plant_false_prob`. The series are rendered as short
//! documents holding the pair's two tokens among stopword filler, so the
//! text pipeline recovers exactly these counts.
//!
//! The background is Poisson(`baseline_rate`) by default. Two
//! label-independent departures are available: per-pair background rates
//! drawn from a Gamma distribution around `baseline_rate` (`rate_shape > 0`),
//! and Pareto-sized viral bursts on random pair-days (`burst_prob > 0`).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Pareto, Poisson};

use crate::countstore::{CountBuilder, CountError, CountMatrix};
use crate::ingest::{PairMode, WordPair};
use crate::signal::EventCalendar;

/// Stopwords interleaved with the pair tokens; removed by cleaning.
const FILLER: [&str; 8] = ["the", "and", "of", "to", "is", "in", "it", "for"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EmptyCalendarPolicy {
    /// Redraw the calendar until it has an event day.
    #[default]
    Regenerate,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthConfig {
    pub num_days: u32,
    pub event_day_rate: f64,
    pub planted_pairs: usize,
    /// Noise tokens, paired off into `noise_vocab / 2` disjoint noise pairs.
    pub noise_vocab: usize,
    /// Filler-only documents per day; they clean to no tokens.
    pub docs_per_day: usize,
    pub plant_fire_prob: f64,
    pub plant_false_prob: f64,
    pub spike_height: u32,
    /// Mean background occurrences of a pair per day.
    pub baseline_rate: f64,
    /// Gamma shape of per-pair background rates (mean `baseline_rate`);
    /// 0 gives every pair exactly `baseline_rate`.
    pub rate_shape: f64,
    /// Probability that a pair-day carries a viral burst.
    pub burst_prob: f64,
    /// Pareto scale (minimum size) of a burst.
    pub burst_scale: f64,
    /// Pareto tail index of a burst; must exceed 1 so bursts have a mean.
    pub burst_shape: f64,
    pub on_empty: EmptyCalendarPolicy,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_days: 640,
            event_day_rate: 0.15,
            planted_pairs: 50,
            noise_vocab: 2000,
            docs_per_day: 500,
            plant_fire_prob: 0.8,
            plant_false_prob: 0.02,
            spike_height: 8,
            baseline_rate: 2.0,
            rate_shape: 0.0,
            burst_prob: 0.0,
            burst_scale: 20.0,
            burst_shape: 1.5,
            on_empty: EmptyCalendarPolicy::Regenerate,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    InvalidConfig(&'static str),
    NoEventDays,
    Count(CountError),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::InvalidConfig(m) => write!(f, "invalid synthetic config: {m}"),
            SynthError::NoEventDays => f.write_str("sampled calendar has no event days"),
            SynthError::Count(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SynthError {}

impl From<CountError> for SynthError {
    fn from(e: CountError) -> Self {
        SynthError::Count(e)
    }
}

fn prob(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m| Err(SynthError::InvalidConfig(m));
        if self.num_days < 3 {
            return bad("num_days must be at least 3");
        }
        if !(prob(self.event_day_rate) && prob(self.plant_fire_prob) && prob(self.plant_false_prob) && prob(self.burst_prob)) {
            return bad("probabilities must lie in [0, 1]");
        }
        if !(self.baseline_rate >= 0.0 && self.baseline_rate.is_finite()) {
            return bad("baseline_rate must be finite and non-negative");
        }
        if !(self.rate_shape >= 0.0 && self.rate_shape.is_finite()) {
            return bad("rate_shape must be finite and non-negative");
        }
        if self.burst_prob > 0.0 && !(self.burst_scale > 0.0 && self.burst_shape > 1.0) {
            return bad("bursts need burst_scale > 0 and burst_shape > 1");
        }
        if self.planted_pairs > 1000 || self.noise_vocab > 20_000 {
            return bad("at most 1000 planted pairs and 20000 noise tokens");
        }
        Ok(())
    }

    /// Mean burst contribution per pair-day.
    fn burst_mean(&self) -> f64 {
        if self.burst_prob == 0.0 {
            0.0
        } else {
            self.burst_prob * self.burst_shape * self.burst_scale / (self.burst_shape - 1.0)
        }
    }

    /// Expected count of one noise pair on one day.
    pub fn expected_noise_count(&self) -> f64 {
        self.baseline_rate + self.burst_mean()
    }

    /// Expected count of one planted pair on one day, averaged over the
    /// calendar draw.
    pub fn expected_planted_count(&self) -> f64 {
        let fire = self.event_day_rate * self.plant_fire_prob + (1.0 - self.event_day_rate) * self.plant_false_prob;
        self.expected_noise_count() + fire * f64::from(self.spike_height)
    }
}

pub fn planted_tokens(i: usize) -> (String, String) {
    (format!("pa{i:03}"), format!("pb{i:03}"))
}

pub fn noise_token(i: usize) -> String {
    format!("n{i:04}")
}

/// One generated pair and its daily counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthSeries {
    pub pair: WordPair,
    pub planted: bool,
    /// Realized background rate of this pair.
    pub rate: f64,
    pub counts: Vec<u32>,
}

/// A generated corpus: the event calendar, the planted manifest and every
/// pair's count series.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthCorpus {
    pub config: SynthConfig,
    pub calendar: EventCalendar,
    pub planted: Vec<WordPair>,
    pub series: Vec<SynthSeries>,
}

/// Generates a corpus. Each pair draws from its own ChaCha8 stream so the
/// result does not depend on generation order.
pub fn generate(config: &SynthConfig) -> Result<SynthCorpus, SynthError> {
    config.validate()?;
    let n = config.num_days as usize;
    let mut cal_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let calendar = loop {
        let bits: Vec<bool> = (0..n).map(|_| cal_rng.random_bool(config.event_day_rate)).collect();
        if bits.iter().any(|&b| b) {
            break EventCalendar::from_bits(bits);
        }
        if config.on_empty == EmptyCalendarPolicy::Error || config.event_day_rate == 0.0 {
            return Err(SynthError::NoEventDays);
        }
    };

    let mut series = Vec::with_capacity(config.planted_pairs + config.noise_vocab / 2);
    let mut planted = Vec::with_capacity(config.planted_pairs);
    for i in 0..config.planted_pairs {
        let (a, b) = planted_tokens(i);
        let pair = WordPair::new(a, b).expect("distinct planted tokens");
        planted.push(pair.clone());
        series.push(draw_series(config, &calendar, pair, true, series.len() as u64 + 1));
    }
    for j in 0..config.noise_vocab / 2 {
        let pair = WordPair::new(noise_token(2 * j), noise_token(2 * j + 1)).expect("distinct noise tokens");
        series.push(draw_series(config, &calendar, pair, false, series.len() as u64 + 1));
    }
    Ok(SynthCorpus { config: *config, calendar, planted, series })
}

fn draw_series(config: &SynthConfig, calendar: &EventCalendar, pair: WordPair, planted: bool, stream: u64) -> SynthSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    let rate = if config.rate_shape > 0.0 && config.baseline_rate > 0.0 {
        Gamma::new(config.rate_shape, config.baseline_rate / config.rate_shape)
            .expect("validated gamma parameters")
            .sample(&mut rng)
    } else {
        config.baseline_rate
    };
    let poisson = (rate > 0.0).then(|| Poisson::new(rate).expect("positive rate"));
    let burst = (config.burst_prob > 0.0)
        .then(|| Pareto::new(config.burst_scale, config.burst_shape).expect("validated pareto parameters"));
    let counts = calendar
        .bits
        .iter()
        .map(|&event| {
            let mut c = poisson.as_ref().map_or(0.0, |p| p.sample(&mut rng));
            if planted {
                let p = if event { config.plant_fire_prob } else { config.plant_false_prob };
                if rng.random_bool(p) {
                    c += f64::from(config.spike_height);
                }
            }
            if let Some(b) = &burst {
                if rng.random_bool(config.burst_prob) {
                    c += libm::floor(b.sample(&mut rng));
                }
            }
            c.min(f64::from(u32::MAX / 4)) as u32
        })
        .collect();
    SynthSeries { pair, planted, rate, counts }
}

impl SynthCorpus {
    pub fn num_days(&self) -> u32 {
        self.config.num_days
    }

    /// Direct count matrix: each pair-day count `c` of pair `(a, b)` adds `c`
    /// to both orientations (ordered mode) or to the sorted pair.
    pub fn count_matrix(&self, mode: PairMode) -> Result<CountMatrix, SynthError> {
        let mut m = CountBuilder::new(self.config.num_days, 0)?.with_mode(mode);
        for s in &self.series {
            let (a, b) = (s.pair.first(), s.pair.second());
            for (d, &c) in s.counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                match mode {
                    PairMode::Ordered => {
                        m.add_count(a, b, d as u32, c)?;
                        m.add_count(b, a, d as u32, c)?;
                    }
                    PairMode::Canonical => m.add_count(a, b, d as u32, c)?,
                }
            }
        }
        Ok(m.finish()?)
    }

    pub fn num_documents(&self) -> u64 {
        let pair_docs: u64 = self.series.iter().flat_map(|s| &s.counts).map(|&c| u64::from(c)).sum();
        pair_docs + self.config.docs_per_day as u64 * u64::from(self.config.num_days)
    }

    /// Calls `emit(day, seq, text)` for every document, day by day; `seq`
    /// numbers documents within their day.
    pub fn for_each_document(&self, mut emit: impl FnMut(u32, u32, &str)) {
        let mut text = String::new();
        for day in 0..self.config.num_days {
            let mut seq = 0u32;
            for s in &self.series {
                let c = s.counts[day as usize];
                for k in 0..c {
                    text.clear();
                    let f = FILLER[(seq as usize + k as usize) % FILLER.len()];
                    text.push_str(s.pair.first());
                    text.push(' ');
                    text.push_str(f);
                    text.push(' ');
                    text.push_str(s.pair.second());
                    emit(day, seq, &text);
                    seq += 1;
                }
            }
            for k in 0..self.config.docs_per_day {
                text.clear();
                text.push_str(FILLER[k % FILLER.len()]);
                text.push(' ');
                text.push_str(FILLER[(k + 3) % FILLER.len()]);
                emit(day, seq, &text);
                seq += 1;
            }
        }
    }
}
