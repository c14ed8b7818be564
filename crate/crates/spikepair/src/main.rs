use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use spikepair::config::{RunConfig, KEYS};
use spikepair::log;
use spikepair::pipeline::{Runner, Stage};

/// Event-day detection by word-pair spike matching.
#[derive(Parser)]
#[command(name = "spikepair", version)]
struct Cli {
    /// Flat `key = value` run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Worker threads (overrides the `workers` key).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory (overrides the `out_dir` key).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus, ground truth and planted-pair manifest.
    Synth,
    /// Clean the corpus into tokens.jsonl.
    Ingest,
    /// Count word pairs per day into counts.bpcm.
    Count,
    /// Rank word pairs into scores.csv.
    Select,
    /// Fit the classifier on the selected features into model.json.
    Train,
    /// Run every stale stage, then cross-validate into report.json.
    Evaluate {
        /// Evaluate a third-party `date,score` file instead.
        #[arg(long, value_name = "CSV")]
        score_file: Option<PathBuf>,
    },
    /// Print every config key with its default.
    Keys,
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for o in &cli.overrides {
        cfg.apply_override(o)?;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let stage = match &cli.command {
        Command::Keys => {
            for (k, v, doc) in KEYS {
                println!("{k} = {v}  # {doc}");
            }
            return Ok(());
        }
        Command::Synth => Stage::Synth,
        Command::Ingest => Stage::Ingest,
        Command::Count => Stage::Count,
        Command::Select => Stage::Select,
        Command::Train => Stage::Train,
        Command::Evaluate { .. } => Stage::Evaluate,
    };
    let runner = Runner::new(config(cli)?)?;
    match &cli.command {
        Command::Evaluate { score_file: Some(path) } => runner.evaluate_scores(path),
        _ => runner.run(stage),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = match &cli.command {
        Command::Synth => "synth",
        Command::Ingest => "ingest",
        Command::Count => "count",
        Command::Select => "select",
        Command::Train => "train",
        Command::Evaluate { .. } => "evaluate",
        Command::Keys => "keys",
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::emit(&[("command", &name), ("status", &"error"), ("error", &format!("{e:#}"))]);
            ExitCode::FAILURE
        }
    }
}
