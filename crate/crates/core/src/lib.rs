//! Event-day detection from timestamped short texts.
//!
//! Word pairs that co-occur inside a document are counted per day, each
//! pair's daily series is binarized with a two-sided spike filter, and the
//! resulting spike vector is compared to a binary event calendar with the
//! Jaccard index. The best-matching pairs become features of a count-based
//! Naive Bayes day classifier.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallel
//! drivers and the command line live in the `spikepair` crate.
#![cfg_attr(not(test), no_std)]
#![warn(clippy::std_instead_of_alloc)]
#![warn(clippy::std_instead_of_core)]

extern crate alloc;

pub mod classify;
pub mod countstore;
pub mod eval;
pub mod ingest;
pub mod scoring;
pub mod signal;
pub mod synth;

mod stats;

pub use classify::{BaselineKind, BaselineModel, ClassifyError, FeatureMatrix, NbModel};
pub use countstore::{CountBuilder, CountError, CountMatrix, PairRef, SparseSeries};
pub use eval::{EvalError, EvalReport, FoldSpec, ThresholdMetrics};
pub use ingest::{CleanConfig, Lexicon, Preprocessor, Stoplist, WordPair};
pub use scoring::{FeatureScore, Method, ScoringError, SelectionConfig};
pub use signal::{EventCalendar, SpikeConfig, SpikeVector};
