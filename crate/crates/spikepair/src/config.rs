//! Flat `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored.
//! Unknown or repeated keys are errors. Relative paths in a file resolve
//! against the file's directory; overrides resolve against the working
//! directory. See [`KEYS`] for every key with its default.

use std::path::{Path, PathBuf};

use spikepair_core::classify::{ClassifierConfig, ClassifierKind};
use spikepair_core::eval::{ProtocolConfig, SelectionScope, SplitMode};
use spikepair_core::ingest::{HashtagMode, PairMode};
use spikepair_core::synth::{EmptyCalendarPolicy, SynthConfig};
use spikepair_core::{CleanConfig, Method, SpikeConfig};

use crate::corpus::{parse_date, DayClock};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{origin}: {message}")]
    Invalid { origin: String, message: String },
}

fn invalid(origin: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { origin: origin.to_string(), message: message.into() }
}

/// Every key with its default value and a one-line description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("out_dir", "run", "directory owning every artifact of the run"),
    ("corpus", "", "input JSONL corpus; empty means a synthetic corpus in out_dir"),
    ("ground_truth", "", "`date,event_count` CSV; empty means out_dir/ground_truth.csv"),
    ("stoplist", "", "stopword file, one per line; empty uses the bundled English list"),
    ("lexicon", "", "irregular-form table `<form> <lemma>`; empty uses the bundled table"),
    ("region", "", "keep only documents with this region label; empty keeps all"),
    ("utc_offset", "+00:00", "fixed offset that defines civil days"),
    ("reject_urls", "true", "drop whole documents that contain a URL"),
    ("hashtags", "token", "token (drop #tag) | glyph (keep tag) | keep"),
    ("strip_non_latin", "true", "remove non-Latin characters"),
    ("strip_punctuation", "true", "remove punctuation"),
    ("strip_markup", "true", "remove <markup> tags and HTML entities"),
    ("normalize", "true", "lexicon lookup and stemming"),
    ("pair_mode", "ordered", "ordered | canonical"),
    ("prune_min_total", "2", "minimum total count of a retained pair"),
    ("prune_min_days", "0", "minimum number of days a retained pair occurs on"),
    ("export_csv", "false", "also write counts.csv triplets"),
    ("method", "spike_match", "feature selection method"),
    ("top_n", "100", "number of selected features"),
    ("spike_threshold", "1", "minimum spike height above both neighbours"),
    ("classifier", "naive_bayes", "naive_bayes | logistic_regression | knn | decision_tree"),
    ("count_cap", "100", "counts are clipped to 0..=count_cap for Naive Bayes"),
    ("alpha", "1", "Laplace smoothing of Naive Bayes histograms"),
    ("learning_rate", "0.1", "logistic regression step size"),
    ("steps", "500", "logistic regression gradient steps"),
    ("l2", "0.001", "logistic regression L2 strength"),
    ("k", "5", "neighbours for knn (odd)"),
    ("max_depth", "4", "decision tree depth limit"),
    ("min_leaf", "2", "decision tree minimum leaf size"),
    ("folds", "10", "cross-validation folds"),
    ("train_size", "500", "training days per fold"),
    ("test_size", "140", "test days per fold"),
    ("seed", "0", "fold and permutation seed"),
    ("split", "random", "random | contiguous"),
    ("selection_scope", "per_fold", "per_fold | global"),
    ("decision_threshold", "0.5", "event score at or above which a day is predicted positive"),
    ("permute_labels", "false", "evaluate against a label-permuted calendar (null control)"),
    ("synth_num_days", "640", "synthetic calendar length"),
    ("synth_event_day_rate", "0.15", "probability a synthetic day is an event day"),
    ("synth_planted_pairs", "50", "pairs planted to fire on event days"),
    ("synth_noise_vocab", "2000", "noise tokens (paired into noise_vocab/2 pairs)"),
    ("synth_docs_per_day", "500", "filler-only documents per day"),
    ("synth_fire_prob", "0.8", "probability a planted pair fires on an event day"),
    ("synth_false_prob", "0.02", "probability a planted pair fires on a non-event day"),
    ("synth_spike_height", "8", "extra occurrences when a planted pair fires"),
    ("synth_baseline_rate", "2", "Poisson mean of background occurrences per pair-day"),
    ("synth_rate_shape", "0", "Gamma shape of per-pair background rates; 0 disables"),
    ("synth_burst_prob", "0", "probability of a Pareto burst on a pair-day"),
    ("synth_burst_scale", "20", "Pareto burst scale"),
    ("synth_burst_shape", "1.5", "Pareto burst tail index (> 1)"),
    ("synth_on_empty", "regenerate", "regenerate | error when no event day is drawn"),
    ("synth_seed", "0", "synthetic corpus seed"),
    ("synth_start_date", "2017-01-01", "date of synthetic day 0"),
    ("workers", "1", "worker threads; results do not depend on it"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    pub corpus: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub stoplist: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub region: Option<String>,
    pub utc_offset: String,
    pub clean: CleanConfig,
    pub pair_mode: PairMode,
    pub prune_min_total: u64,
    pub prune_min_days: usize,
    pub export_csv: bool,
    pub protocol: ProtocolConfig,
    pub permute_labels: bool,
    pub synth: SynthConfig,
    pub synth_start_date: String,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let mut c = RunConfig {
            out_dir: PathBuf::new(),
            corpus: None,
            ground_truth: None,
            stoplist: None,
            lexicon: None,
            region: None,
            utc_offset: String::new(),
            clean: CleanConfig::default(),
            pair_mode: PairMode::Ordered,
            prune_min_total: 0,
            prune_min_days: 0,
            export_csv: false,
            protocol: ProtocolConfig::default(),
            permute_labels: false,
            synth: SynthConfig::default(),
            synth_start_date: String::new(),
            workers: 1,
        };
        for (k, v, _) in KEYS {
            c.set(k, v, Path::new("")).expect("defaults parse");
        }
        c
    }
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

fn parse_num<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("expected a number, got {v:?}"))
}

fn parse_choice<T: Copy>(v: &str, choices: &[(&str, T)]) -> Result<T, String> {
    choices.iter().find(|(n, _)| *n == v).map(|&(_, t)| t).ok_or_else(|| {
        let names: Vec<&str> = choices.iter().map(|(n, _)| *n).collect();
        format!("expected one of {}, got {v:?}", names.join(" | "))
    })
}

fn opt_path(v: &str, base: &Path) -> Option<PathBuf> {
    (!v.is_empty()).then(|| base.join(v))
}

const HASHTAGS: &[(&str, HashtagMode)] =
    &[("token", HashtagMode::Token), ("glyph", HashtagMode::Glyph), ("keep", HashtagMode::Keep)];
const PAIR_MODES: &[(&str, PairMode)] = &[("ordered", PairMode::Ordered), ("canonical", PairMode::Canonical)];
const SPLITS: &[(&str, SplitMode)] = &[("random", SplitMode::Random), ("contiguous", SplitMode::Contiguous)];
const SCOPES: &[(&str, SelectionScope)] = &[("per_fold", SelectionScope::PerFold), ("global", SelectionScope::Global)];
const ON_EMPTY: &[(&str, EmptyCalendarPolicy)] =
    &[("regenerate", EmptyCalendarPolicy::Regenerate), ("error", EmptyCalendarPolicy::Error)];

fn choice_name<T: PartialEq>(choices: &[(&'static str, T)], t: &T) -> &'static str {
    choices.iter().find(|(_, c)| c == t).map(|(n, _)| *n).expect("every variant is listed")
}

fn path_str(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

impl RunConfig {
    /// Sets one key; `base` resolves relative paths.
    pub fn set(&mut self, key: &str, v: &str, base: &Path) -> Result<(), String> {
        let p = &mut self.protocol;
        let h = &mut p.classifier.hyper;
        let s = &mut self.synth;
        match key {
            "out_dir" => self.out_dir = base.join(v),
            "corpus" => self.corpus = opt_path(v, base),
            "ground_truth" => self.ground_truth = opt_path(v, base),
            "stoplist" => self.stoplist = opt_path(v, base),
            "lexicon" => self.lexicon = opt_path(v, base),
            "region" => self.region = (!v.is_empty()).then(|| v.to_string()),
            "utc_offset" => {
                DayClock::parse(v).map_err(|e| e.to_string())?;
                self.utc_offset = v.to_string();
            }
            "reject_urls" => self.clean.reject_urls = parse_bool(v)?,
            "hashtags" => self.clean.hashtags = parse_choice(v, HASHTAGS)?,
            "strip_non_latin" => self.clean.strip_non_latin = parse_bool(v)?,
            "strip_punctuation" => self.clean.strip_punctuation = parse_bool(v)?,
            "strip_markup" => self.clean.strip_markup = parse_bool(v)?,
            "normalize" => self.clean.normalize = parse_bool(v)?,
            "pair_mode" => self.pair_mode = parse_choice(v, PAIR_MODES)?,
            "prune_min_total" => self.prune_min_total = parse_num(v)?,
            "prune_min_days" => self.prune_min_days = parse_num(v)?,
            "export_csv" => self.export_csv = parse_bool(v)?,
            "method" => p.selection.method = v.parse::<Method>().map_err(|e| e.to_string())?,
            "top_n" => p.selection.top_n = parse_num(v)?,
            "spike_threshold" => {
                p.selection.spike = SpikeConfig::new(parse_num(v)?).map_err(|e| e.to_string())?;
            }
            "classifier" => {
                p.classifier.kind =
                    ClassifierKind::parse(v).ok_or_else(|| format!("unknown classifier {v:?}"))?;
            }
            "count_cap" => p.classifier.count_cap = parse_num(v)?,
            "alpha" => p.classifier.alpha = parse_num(v)?,
            "learning_rate" => h.learning_rate = parse_num(v)?,
            "steps" => h.steps = parse_num(v)?,
            "l2" => h.l2 = parse_num(v)?,
            "k" => h.k = parse_num(v)?,
            "max_depth" => h.max_depth = parse_num(v)?,
            "min_leaf" => h.min_leaf = parse_num(v)?,
            "folds" => p.folds.folds = parse_num(v)?,
            "train_size" => p.folds.train_size = parse_num(v)?,
            "test_size" => p.folds.test_size = parse_num(v)?,
            "seed" => p.folds.seed = parse_num(v)?,
            "split" => p.folds.split = parse_choice(v, SPLITS)?,
            "selection_scope" => p.scope = parse_choice(v, SCOPES)?,
            "decision_threshold" => p.decision_threshold = parse_num(v)?,
            "permute_labels" => self.permute_labels = parse_bool(v)?,
            "synth_num_days" => s.num_days = parse_num(v)?,
            "synth_event_day_rate" => s.event_day_rate = parse_num(v)?,
            "synth_planted_pairs" => s.planted_pairs = parse_num(v)?,
            "synth_noise_vocab" => s.noise_vocab = parse_num(v)?,
            "synth_docs_per_day" => s.docs_per_day = parse_num(v)?,
            "synth_fire_prob" => s.plant_fire_prob = parse_num(v)?,
            "synth_false_prob" => s.plant_false_prob = parse_num(v)?,
            "synth_spike_height" => s.spike_height = parse_num(v)?,
            "synth_baseline_rate" => s.baseline_rate = parse_num(v)?,
            "synth_rate_shape" => s.rate_shape = parse_num(v)?,
            "synth_burst_prob" => s.burst_prob = parse_num(v)?,
            "synth_burst_scale" => s.burst_scale = parse_num(v)?,
            "synth_burst_shape" => s.burst_shape = parse_num(v)?,
            "synth_on_empty" => s.on_empty = parse_choice(v, ON_EMPTY)?,
            "synth_seed" => s.seed = parse_num(v)?,
            "synth_start_date" => {
                parse_date(v).ok_or_else(|| format!("expected YYYY-MM-DD, got {v:?}"))?;
                self.synth_start_date = v.to_string();
            }
            "workers" => self.workers = parse_num(v)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Current value of `key` in its canonical text form.
    pub fn get(&self, key: &str) -> Option<String> {
        let p = &self.protocol;
        let h = &p.classifier.hyper;
        let s = &self.synth;
        Some(match key {
            "out_dir" => self.out_dir.display().to_string(),
            "corpus" => path_str(&self.corpus),
            "ground_truth" => path_str(&self.ground_truth),
            "stoplist" => path_str(&self.stoplist),
            "lexicon" => path_str(&self.lexicon),
            "region" => self.region.clone().unwrap_or_default(),
            "utc_offset" => self.utc_offset.clone(),
            "reject_urls" => self.clean.reject_urls.to_string(),
            "hashtags" => choice_name(HASHTAGS, &self.clean.hashtags).into(),
            "strip_non_latin" => self.clean.strip_non_latin.to_string(),
            "strip_punctuation" => self.clean.strip_punctuation.to_string(),
            "strip_markup" => self.clean.strip_markup.to_string(),
            "normalize" => self.clean.normalize.to_string(),
            "pair_mode" => choice_name(PAIR_MODES, &self.pair_mode).into(),
            "prune_min_total" => self.prune_min_total.to_string(),
            "prune_min_days" => self.prune_min_days.to_string(),
            "export_csv" => self.export_csv.to_string(),
            "method" => p.selection.method.as_str().into(),
            "top_n" => p.selection.top_n.to_string(),
            "spike_threshold" => p.selection.spike.threshold().to_string(),
            "classifier" => p.classifier.kind.as_str().into(),
            "count_cap" => p.classifier.count_cap.to_string(),
            "alpha" => p.classifier.alpha.to_string(),
            "learning_rate" => h.learning_rate.to_string(),
            "steps" => h.steps.to_string(),
            "l2" => h.l2.to_string(),
            "k" => h.k.to_string(),
            "max_depth" => h.max_depth.to_string(),
            "min_leaf" => h.min_leaf.to_string(),
            "folds" => p.folds.folds.to_string(),
            "train_size" => p.folds.train_size.to_string(),
            "test_size" => p.folds.test_size.to_string(),
            "seed" => p.folds.seed.to_string(),
            "split" => choice_name(SPLITS, &p.folds.split).into(),
            "selection_scope" => choice_name(SCOPES, &p.scope).into(),
            "decision_threshold" => p.decision_threshold.to_string(),
            "permute_labels" => self.permute_labels.to_string(),
            "synth_num_days" => s.num_days.to_string(),
            "synth_event_day_rate" => s.event_day_rate.to_string(),
            "synth_planted_pairs" => s.planted_pairs.to_string(),
            "synth_noise_vocab" => s.noise_vocab.to_string(),
            "synth_docs_per_day" => s.docs_per_day.to_string(),
            "synth_fire_prob" => s.plant_fire_prob.to_string(),
            "synth_false_prob" => s.plant_false_prob.to_string(),
            "synth_spike_height" => s.spike_height.to_string(),
            "synth_baseline_rate" => s.baseline_rate.to_string(),
            "synth_rate_shape" => s.rate_shape.to_string(),
            "synth_burst_prob" => s.burst_prob.to_string(),
            "synth_burst_scale" => s.burst_scale.to_string(),
            "synth_burst_shape" => s.burst_shape.to_string(),
            "synth_on_empty" => choice_name(ON_EMPTY, &s.on_empty).into(),
            "synth_seed" => s.seed.to_string(),
            "synth_start_date" => self.synth_start_date.clone(),
            "workers" => self.workers.to_string(),
            _ => return None,
        })
    }

    /// Applies a config file's settings on top of `self`.
    pub fn apply_text(&mut self, text: &str, origin: &str, base: &Path) -> Result<(), ConfigError> {
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
            if line.is_empty() {
                continue;
            }
            let at = format!("{origin}:{}", i + 1);
            let (k, v) = line.split_once('=').ok_or_else(|| invalid(&at, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(invalid(&at, format!("key {k:?} set twice")));
            }
            self.set(k, v, base).map_err(|m| invalid(&at, format!("{k}: {m}")))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let origin = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| invalid(&origin, e.to_string()))?;
        let mut c = RunConfig::default();
        let base = path.parent().unwrap_or(Path::new(""));
        c.apply_text(&text, &origin, base)?;
        Ok(c)
    }

    /// Applies one `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| invalid("--set", format!("expected key=value, got {assignment:?}")))?;
        self.set(k.trim(), v.trim(), Path::new("")).map_err(|m| invalid("--set", format!("{}: {m}", k.trim())))
    }

    /// Range checks that do not depend on the data.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.protocol;
        let h = &p.classifier.hyper;
        let check = |ok: bool, key: &str, m: &str| if ok { Ok(()) } else { Err(invalid("config", format!("{key}: {m}"))) };
        check(p.selection.top_n >= 1, "top_n", "must be at least 1")?;
        check(p.classifier.count_cap >= 1, "count_cap", "must be at least 1")?;
        check(p.classifier.alpha > 0.0 && p.classifier.alpha.is_finite(), "alpha", "must be positive")?;
        check(h.learning_rate > 0.0 && h.learning_rate.is_finite(), "learning_rate", "must be positive")?;
        check(h.steps >= 1, "steps", "must be at least 1")?;
        check(h.l2 >= 0.0 && h.l2.is_finite(), "l2", "must be non-negative")?;
        check(h.k % 2 == 1, "k", "must be odd")?;
        check(h.max_depth >= 1, "max_depth", "must be at least 1")?;
        check(h.min_leaf >= 1, "min_leaf", "must be at least 1")?;
        check(p.folds.folds >= 1, "folds", "must be at least 1")?;
        check(p.folds.train_size >= 2, "train_size", "must be at least 2")?;
        check(p.folds.test_size >= 2, "test_size", "must be at least 2")?;
        check((0.0..=1.0).contains(&p.decision_threshold), "decision_threshold", "must lie in [0, 1]")?;
        check(self.workers >= 1, "workers", "must be at least 1")?;
        check(!self.out_dir.as_os_str().is_empty(), "out_dir", "must not be empty")?;
        self.synth.validate().map_err(|e| invalid("config", e.to_string()))?;
        Ok(())
    }

    pub fn corpus_path(&self) -> PathBuf {
        self.corpus.clone().unwrap_or_else(|| self.out_dir.join("corpus.jsonl"))
    }

    pub fn ground_truth_path(&self) -> PathBuf {
        self.ground_truth.clone().unwrap_or_else(|| self.out_dir.join("ground_truth.csv"))
    }

    /// True when the corpus is generated by the synth stage.
    pub fn synthetic(&self) -> bool {
        self.corpus.is_none()
    }

    pub fn selection(&self) -> spikepair_core::SelectionConfig {
        self.protocol.selection
    }

    pub fn classifier(&self) -> ClassifierConfig {
        self.protocol.classifier
    }

    /// `key=value` lines for `keys`, in the given order.
    pub fn render(&self, keys: &[&str]) -> String {
        keys.iter().map(|k| format!("{k}={}\n", self.get(k).expect("known key"))).collect()
    }
}
