//! File formats, parallel drivers and the staged command-line pipeline on
//! top of [`spikepair_core`].
//!
//! Stages and their artifacts (all inside the run's output directory):
//!
//! | stage      | writes                                      |
//! |------------|---------------------------------------------|
//! | `synth`    | `corpus.jsonl`, `ground_truth.csv`, `planted.csv` |
//! | `ingest`   | `tokens.jsonl`                              |
//! | `count`    | `counts.bpcm` (and `counts.csv` on request) |
//! | `select`   | `scores.csv`                                |
//! | `train`    | `model.json`                                |
//! | `evaluate` | `report.json`, `curves/fold_<k>_{roc,pr}.csv` |
//!
//! Every artifact has a `<name>.inputs` sidecar recording the hashes of the
//! files and config keys it was built from, so stale outputs are detected.

pub mod bpcm;
pub mod config;
pub mod corpus;
pub mod export;
pub mod log;
pub mod model_io;
pub mod parallel;
pub mod pipeline;
pub mod truth;

pub use spikepair_core as core;
