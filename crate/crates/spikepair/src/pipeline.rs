//! Stage runner.
//!
//! Each stage records what it was built from in `<out_dir>/<stage>.inputs`:
//! the config keys it reads, the SHA-256 of every input file (by role) and
//! the SHA-256 of every output. An artifact set is fresh when re-deriving
//! those lines from the current config and files gives the same text and
//! the outputs still hash to the recorded values. Explicit stages refuse
//! missing or stale upstream artifacts; `evaluate` rebuilds whatever is not
//! fresh, in order.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use spikepair_core::classify::TrainedModel;
use spikepair_core::eval::{permute_labels, pr_curve, roc_curve, EvalReport, MetricSet, Ranker};
use spikepair_core::ingest::{DEFAULT_LEXICON, DEFAULT_STOPLIST};
use spikepair_core::synth::generate;
use spikepair_core::{CountBuilder, CountMatrix, FeatureMatrix, Lexicon, Preprocessor, Stoplist, WordPair};

use crate::config::RunConfig;
use crate::corpus::{
    day_number, format_date, parse_date, read_jsonl, synthetic_timestamp, write_jsonl, DayClock, RawDocument,
    TokenRecord,
};
use crate::model_io::ModelFile;
use crate::parallel::{self, ParallelRanker};
use crate::truth::{read_ground_truth, write_ground_truth, write_planted, GroundTruth};
use crate::{bpcm, export, log};

/// Documents handled per parallel batch.
const BATCH: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Synth,
    Ingest,
    Count,
    Select,
    Train,
    Evaluate,
}

pub const CLEAN_KEYS: &[&str] =
    &["region", "utc_offset", "reject_urls", "hashtags", "strip_non_latin", "strip_punctuation", "strip_markup", "normalize"];
pub const COUNT_KEYS: &[&str] = &["pair_mode", "prune_min_total", "prune_min_days", "export_csv"];
pub const SELECT_KEYS: &[&str] = &["method", "top_n", "spike_threshold"];
pub const CLASSIFIER_KEYS: &[&str] =
    &["classifier", "count_cap", "alpha", "learning_rate", "steps", "l2", "k", "max_depth", "min_leaf"];
pub const EVAL_KEYS: &[&str] =
    &["folds", "train_size", "test_size", "seed", "split", "selection_scope", "decision_threshold", "permute_labels"];

impl Stage {
    pub const ALL: [Stage; 6] = [Stage::Synth, Stage::Ingest, Stage::Count, Stage::Select, Stage::Train, Stage::Evaluate];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Count => "count",
            Stage::Select => "select",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
        }
    }

    fn config_keys(self) -> Vec<&'static str> {
        match self {
            Stage::Synth => crate::config::KEYS.iter().map(|k| k.0).filter(|k| k.starts_with("synth_")).collect(),
            Stage::Ingest => CLEAN_KEYS.to_vec(),
            Stage::Count => COUNT_KEYS.to_vec(),
            Stage::Select => SELECT_KEYS.to_vec(),
            Stage::Train => CLASSIFIER_KEYS.to_vec(),
            Stage::Evaluate => [SELECT_KEYS, CLASSIFIER_KEYS, EVAL_KEYS].concat(),
        }
    }

    /// Input files by role.
    fn inputs(self, cfg: &RunConfig) -> Vec<(&'static str, PathBuf)> {
        let out = &cfg.out_dir;
        let mut v = Vec::new();
        match self {
            Stage::Synth => {}
            Stage::Ingest => {
                v.push(("corpus", cfg.corpus_path()));
                if let Some(p) = &cfg.stoplist {
                    v.push(("stoplist", p.clone()));
                }
                if let Some(p) = &cfg.lexicon {
                    v.push(("lexicon", p.clone()));
                }
            }
            Stage::Count => {
                v.push(("tokens", out.join("tokens.jsonl")));
                v.push(("ground_truth", cfg.ground_truth_path()));
            }
            Stage::Select | Stage::Evaluate => {
                v.push(("counts", out.join("counts.bpcm")));
                v.push(("ground_truth", cfg.ground_truth_path()));
            }
            Stage::Train => {
                v.push(("counts", out.join("counts.bpcm")));
                v.push(("ground_truth", cfg.ground_truth_path()));
                v.push(("scores", out.join("scores.csv")));
            }
        }
        v
    }

    /// Stages whose artifacts this stage reads.
    fn upstream(self, cfg: &RunConfig) -> Vec<Stage> {
        let synth = if cfg.synthetic() { vec![Stage::Synth] } else { vec![] };
        match self {
            Stage::Synth => vec![],
            Stage::Ingest => synth,
            Stage::Count => [synth, vec![Stage::Ingest]].concat(),
            Stage::Select | Stage::Evaluate => [synth, vec![Stage::Count]].concat(),
            Stage::Train => [synth, vec![Stage::Count, Stage::Select]].concat(),
        }
    }

    fn sidecar(self, cfg: &RunConfig) -> PathBuf {
        cfg.out_dir.join(format!("{}.inputs", self.name()))
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut h = Sha256::new();
    std::io::copy(&mut f, &mut h)?;
    Ok(format!("{:x}", h.finalize()))
}

/// Writes through a temporary sibling and renames on success.
fn write_atomic(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out")
    ));
    let mut w = BufWriter::with_capacity(1 << 20, File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?);
    body(&mut w)?;
    w.flush()?;
    drop(w);
    fs::rename(&tmp, path)?;
    Ok(())
}

/// What a run of `stage` wrote, for the sidecar.
struct Outputs(Vec<PathBuf>);

pub struct Runner {
    pub cfg: RunConfig,
    pool: ThreadPool,
}

fn short(hash: &str) -> &str {
    &hash[..12]
}

impl Runner {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.synthetic() && cfg.ground_truth.is_some() {
            bail!("config: ground_truth must be empty when the corpus is synthetic");
        }
        let pool = parallel::pool(cfg.workers);
        Ok(Runner { cfg, pool })
    }

    fn expected_inputs(&self, stage: Stage) -> Result<String> {
        let mut text = format!("stage={}\n", stage.name());
        for k in stage.config_keys() {
            text.push_str(&format!("config.{k}={}\n", self.cfg.get(k).expect("known key")));
        }
        for (role, path) in stage.inputs(&self.cfg) {
            if !path.exists() {
                bail!("missing input {role} ({})", path.display());
            }
            text.push_str(&format!("input.{role}={}\n", sha256_file(&path)?));
        }
        Ok(text)
    }

    /// `Ok(None)` when fresh, otherwise why not.
    fn staleness(&self, stage: Stage) -> Result<Option<String>> {
        let sidecar = stage.sidecar(&self.cfg);
        let Ok(recorded) = fs::read_to_string(&sidecar) else {
            return Ok(Some("missing".into()));
        };
        let Ok(expected) = self.expected_inputs(stage) else {
            return Ok(Some("inputs missing".into()));
        };
        let (head, outputs): (Vec<&str>, Vec<&str>) = recorded.lines().partition(|l| !l.starts_with("output."));
        let head: String = head.iter().map(|l| format!("{l}\n")).collect();
        if head != expected {
            return Ok(Some("inputs or config changed".into()));
        }
        for line in outputs {
            let (name, hash) = line["output.".len()..].split_once('=').ok_or_else(|| anyhow!("corrupt {}", sidecar.display()))?;
            let path = self.cfg.out_dir.join(name);
            if !path.exists() || sha256_file(&path)? != hash {
                return Ok(Some(format!("output {name} missing or modified")));
            }
        }
        Ok(None)
    }

    fn require_upstream(&self, stage: Stage) -> Result<()> {
        for up in stage.upstream(&self.cfg) {
            if let Some(why) = self.staleness(up)? {
                let kind = if why == "missing" { "missing" } else { "stale" };
                bail!("{kind} upstream artifact: stage={} ({why}); run `{}` first", up.name(), up.name());
            }
        }
        Ok(())
    }

    /// Runs one stage after checking its upstream artifacts.
    pub fn run(&self, stage: Stage) -> Result<()> {
        if stage == Stage::Evaluate {
            return self.run_all();
        }
        self.require_upstream(stage)?;
        self.execute(stage)
    }

    /// Rebuilds every stale stage in order and always re-evaluates.
    pub fn run_all(&self) -> Result<()> {
        for stage in Stage::ALL {
            if stage == Stage::Synth && !self.cfg.synthetic() {
                continue;
            }
            if stage != Stage::Evaluate {
                if let Some(why) = self.staleness(stage)? {
                    log::emit(&[("stage", &stage.name()), ("status", &"rebuild"), ("reason", &why)]);
                } else {
                    log::emit(&[("stage", &stage.name()), ("status", &"cached")]);
                    continue;
                }
            }
            self.execute(stage)?;
        }
        Ok(())
    }

    fn execute(&self, stage: Stage) -> Result<()> {
        fs::create_dir_all(&self.cfg.out_dir)
            .with_context(|| format!("cannot create {}", self.cfg.out_dir.display()))?;
        let start = Instant::now();
        let inputs = self.expected_inputs(stage).with_context(|| format!("stage={}", stage.name()))?;
        let (outputs, mut stats) = match stage {
            Stage::Synth => self.synth()?,
            Stage::Ingest => self.ingest()?,
            Stage::Count => self.count()?,
            Stage::Select => self.select()?,
            Stage::Train => self.train()?,
            Stage::Evaluate => self.evaluate()?,
        };
        let mut sidecar = inputs.clone();
        for path in &outputs.0 {
            let rel = path.strip_prefix(&self.cfg.out_dir).expect("outputs live in out_dir");
            sidecar.push_str(&format!("output.{}={}\n", rel.display(), sha256_file(path)?));
        }
        write_atomic(&stage.sidecar(&self.cfg), |w| Ok(w.write_all(sidecar.as_bytes())?))?;

        let mut fields: Vec<(String, String)> = vec![("stage".into(), stage.name().into()), ("status".into(), "ok".into())];
        fields.append(&mut stats);
        let mut curves = 0;
        for line in sidecar.lines().filter(|l| l.starts_with("input.") || l.starts_with("output.")) {
            let (k, h) = line.split_once('=').expect("key=value");
            if k.starts_with("output.curves/") {
                curves += 1;
            } else {
                fields.push((k.to_string(), format!("sha256:{}", short(h))));
            }
        }
        if curves > 0 {
            fields.push(("curve_files".into(), curves.to_string()));
        }
        fields.push(("elapsed_ms".into(), start.elapsed().as_millis().to_string()));
        let refs: Vec<(&str, &dyn std::fmt::Display)> =
            fields.iter().map(|(k, v)| (k.as_str(), v as &dyn std::fmt::Display)).collect();
        log::emit(&refs);
        Ok(())
    }

    fn ground_truth(&self) -> Result<GroundTruth> {
        Ok(read_ground_truth(&self.cfg.ground_truth_path())?)
    }

    fn load_counts(&self, gt: &GroundTruth) -> Result<CountMatrix> {
        let path = self.cfg.out_dir.join("counts.bpcm");
        let m = bpcm::load(&path).with_context(|| format!("reading {}", path.display()))?;
        if m.day_zero() != gt.day_zero || m.num_days() != gt.num_days() {
            bail!("{} was counted for a different calendar than {}", path.display(), self.cfg.ground_truth_path().display());
        }
        Ok(m)
    }

    fn synth(&self) -> Result<(Outputs, Vec<(String, String)>)> {
        let cfg = &self.cfg;
        let corpus = generate(&cfg.synth)?;
        let day_zero = day_number(parse_date(&cfg.synth_start_date).expect("validated"));
        let corpus_path = cfg.corpus_path();
        let mut docs = 0u64;
        write_atomic(&corpus_path, |w| {
            let mut result = Ok(());
            corpus.for_each_document(|day, seq, text| {
                if result.is_err() {
                    return;
                }
                let doc = RawDocument {
                    id: format!("s{day}-{seq}"),
                    ts: synthetic_timestamp(day_zero + i64::from(day), seq),
                    text: text.to_string(),
                    region: None,
                };
                docs += 1;
                result = write_jsonl(w, &doc);
            });
            Ok(result?)
        })?;
        let gt_path = cfg.ground_truth_path();
        let counts: Vec<u32> = match &corpus.calendar.source_counts {
            Some(c) => c.clone(),
            None => corpus.calendar.bits.iter().map(|&b| u32::from(b)).collect(),
        };
        write_ground_truth(&gt_path, day_zero, &counts)?;
        let planted_path = cfg.out_dir.join("planted.csv");
        write_planted(&planted_path, &corpus.planted)?;
        let stats = vec![
            ("documents".into(), docs.to_string()),
            ("event_days".into(), corpus.calendar.event_days().to_string()),
            ("planted".into(), corpus.planted.len().to_string()),
        ];
        Ok((Outputs(vec![corpus_path, gt_path, planted_path]), stats))
    }

    fn preprocessor(&self) -> Result<Preprocessor> {
        let stoplist = match &self.cfg.stoplist {
            Some(p) => Stoplist::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
            None => Stoplist::parse(DEFAULT_STOPLIST),
        };
        let lexicon = match &self.cfg.lexicon {
            Some(p) => Lexicon::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
            None => Lexicon::parse(DEFAULT_LEXICON)?,
        };
        Ok(Preprocessor::new(stoplist, lexicon, self.cfg.clean.clone()))
    }

    fn ingest(&self) -> Result<(Outputs, Vec<(String, String)>)> {
        let cfg = &self.cfg;
        let pre = self.preprocessor()?;
        let clock = DayClock::parse(&cfg.utc_offset)?;
        let input = cfg.corpus_path();
        let reader = BufReader::with_capacity(1 << 20, File::open(&input).with_context(|| format!("cannot open {}", input.display()))?);
        let out_path = cfg.out_dir.join("tokens.jsonl");

        #[derive(Default)]
        struct Tally {
            read: u64,
            written: u64,
            bad_timestamp: u64,
            first_bad: Option<String>,
            other_region: u64,
            url: u64,
            empty: u64,
        }
        enum Outcome {
            Keep(TokenRecord),
            BadTimestamp(String),
            OtherRegion,
            Url,
            Empty,
        }
        let mut t = Tally::default();
        let mut lines = reader.lines().enumerate();
        write_atomic(&out_path, |w| {
            loop {
                let mut batch: Vec<(usize, String)> = Vec::with_capacity(BATCH);
                for (i, line) in lines.by_ref() {
                    let line = line?;
                    if !line.trim().is_empty() {
                        batch.push((i + 1, line));
                    }
                    if batch.len() == BATCH {
                        break;
                    }
                }
                if batch.is_empty() {
                    break;
                }
                let outcomes: Vec<Result<Outcome>> = self.pool.install(|| {
                    batch
                        .par_iter()
                        .map(|(n, line)| {
                            let doc: RawDocument =
                                serde_json::from_str(line).with_context(|| format!("{} line {n}: malformed record", input.display()))?;
                            let Some(day) = clock.day_of(&doc.ts) else {
                                return Ok(Outcome::BadTimestamp(format!("line {n} id {:?} ts {:?}", doc.id, doc.ts)));
                            };
                            if cfg.region.is_some() && doc.region != cfg.region {
                                return Ok(Outcome::OtherRegion);
                            }
                            if pre.rejects(&doc.text) {
                                return Ok(Outcome::Url);
                            }
                            let tokens = pre.clean(&doc.text);
                            if tokens.is_empty() {
                                return Ok(Outcome::Empty);
                            }
                            Ok(Outcome::Keep(TokenRecord { id: doc.id, date: format_date(day), tokens }))
                        })
                        .collect()
                });
                for o in outcomes {
                    t.read += 1;
                    match o? {
                        Outcome::Keep(rec) => {
                            write_jsonl(w, &rec)?;
                            t.written += 1;
                        }
                        Outcome::BadTimestamp(what) => {
                            t.bad_timestamp += 1;
                            t.first_bad.get_or_insert(what);
                        }
                        Outcome::OtherRegion => t.other_region += 1,
                        Outcome::Url => t.url += 1,
                        Outcome::Empty => t.empty += 1,
                    }
                }
            }
            Ok(())
        })?;
        if let Some(first) = &t.first_bad {
            log::emit(&[
                ("stage", &"ingest"),
                ("warning", &"rejected documents with unparseable timestamps"),
                ("count", &t.bad_timestamp),
                ("first", first),
            ]);
        }
        let stats = vec![
            ("documents".into(), t.read.to_string()),
            ("written".into(), t.written.to_string()),
            ("rejected_timestamp".into(), t.bad_timestamp.to_string()),
            ("rejected_region".into(), t.other_region.to_string()),
            ("rejected_url".into(), t.url.to_string()),
            ("empty".into(), t.empty.to_string()),
        ];
        Ok((Outputs(vec![out_path]), stats))
    }

    fn count(&self) -> Result<(Outputs, Vec<(String, String)>)> {
        let cfg = &self.cfg;
        let gt = self.ground_truth()?;
        let path = cfg.out_dir.join("tokens.jsonl");
        let reader = BufReader::with_capacity(1 << 20, File::open(&path)?);
        let mut builder = CountBuilder::new(gt.num_days(), gt.day_zero)?.with_mode(cfg.pair_mode);
        let (mut docs, mut outside, mut emitted) = (0u64, 0u64, 0u64);
        let mut lines = reader.lines().enumerate();
        loop {
            let mut batch: Vec<(usize, String)> = Vec::with_capacity(BATCH);
            for (i, line) in lines.by_ref() {
                batch.push((i + 1, line?));
                if batch.len() == BATCH {
                    break;
                }
            }
            if batch.is_empty() {
                break;
            }
            let parsed: Vec<Result<(Option<u32>, Vec<String>)>> = self.pool.install(|| {
                batch
                    .par_iter()
                    .filter(|(_, l)| !l.trim().is_empty())
                    .map(|(n, line)| {
                        let rec: TokenRecord =
                            serde_json::from_str(line).with_context(|| format!("{} line {n}: malformed record", path.display()))?;
                        let day = parse_date(&rec.date).ok_or_else(|| anyhow!("{} line {n}: bad date {:?}", path.display(), rec.date))?;
                        Ok((gt.index_of(day_number(day)), rec.tokens))
                    })
                    .collect()
            });
            for p in parsed {
                let (day, tokens) = p?;
                docs += 1;
                match day {
                    Some(d) => emitted += builder.accumulate_tokens(d, &tokens)? as u64,
                    None => outside += 1,
                }
            }
        }
        let matrix = builder.finish()?;
        let counted = matrix.len();
        let matrix = matrix.prune(cfg.prune_min_total, cfg.prune_min_days);
        let out = cfg.out_dir.join("counts.bpcm");
        write_atomic(&out, |w| Ok(bpcm::write(&matrix, w)?))?;
        let mut outputs = vec![out];
        if cfg.export_csv {
            let csv_path = cfg.out_dir.join("counts.csv");
            write_atomic(&csv_path, |w| Ok(export::write_count_triplets(&matrix, w)?))?;
            outputs.push(csv_path);
        }
        let stats = vec![
            ("documents".into(), docs.to_string()),
            ("outside_window".into(), outside.to_string()),
            ("emissions".into(), emitted.to_string()),
            ("pairs".into(), counted.to_string()),
            ("retained".into(), matrix.len().to_string()),
            ("cells".into(), matrix.nonzero_cells().to_string()),
        ];
        Ok((Outputs(outputs), stats))
    }

    fn select(&self) -> Result<(Outputs, Vec<(String, String)>)> {
        let gt = self.ground_truth()?;
        let m = self.load_counts(&gt)?;
        let sel = self.cfg.selection();
        let ranked = ParallelRanker::new(&self.pool).rank(&m, &gt.calendar, None, &sel)?;
        let out = self.cfg.out_dir.join("scores.csv");
        write_atomic(&out, |w| Ok(export::write_scores(&ranked, w)?))?;
        let top = ranked.first().map(|f| format!("{}:{}", f.pair, f.score)).unwrap_or_default();
        Ok((Outputs(vec![out]), vec![("pairs".into(), m.len().to_string()), ("top".into(), top)]))
    }

    fn train(&self) -> Result<(Outputs, Vec<(String, String)>)> {
        let gt = self.ground_truth()?;
        let m = self.load_counts(&gt)?;
        let scores = export::read_scores(File::open(self.cfg.out_dir.join("scores.csv"))?)?;
        if scores.is_empty() {
            bail!("scores.csv lists no features");
        }
        let features: Vec<WordPair> = scores.iter().map(|f| f.pair.clone()).collect();
        let days: Vec<u32> = (0..gt.num_days()).collect();
        let x = FeatureMatrix::from_counts(&m, &features, &days);
        let model = TrainedModel::fit(&x, &gt.calendar.bits, &self.cfg.classifier())?;
        let file = ModelFile::new(scores[0].method, self.cfg.selection().spike.threshold(), days.len(), model);
        let out = self.cfg.out_dir.join("model.json");
        let json = file.to_json()?;
        write_atomic(&out, |w| Ok(w.write_all(json.as_bytes())?))?;
        Ok((Outputs(vec![out]), vec![("features".into(), features.len().to_string())]))
    }

    fn evaluate(&self) -> Result<(Outputs, Vec<(String, String)>)> {
        let cfg = &self.cfg;
        let gt = self.ground_truth()?;
        let m = self.load_counts(&gt)?;
        let calendar = if cfg.permute_labels { permute_labels(&gt.calendar, cfg.protocol.folds.seed) } else { gt.calendar.clone() };
        let report = parallel::cross_validate(&m, &calendar, &cfg.protocol, &self.pool)?;
        let mut notes = Vec::new();
        if cfg.protocol.selection.method == spikepair_core::Method::Tfidf {
            notes.push("tfidf uses the day-series adaptation: event-day mean over (1 + overall mean), times ln(days / support), normalized by the candidate maximum".to_string());
        }
        if cfg.permute_labels {
            notes.push("labels permuted: this is a null control".to_string());
        }
        let doc = ReportFile {
            format: REPORT_FORMAT.into(),
            version: REPORT_VERSION,
            num_days: gt.num_days(),
            event_days: calendar.event_days(),
            num_pairs: m.len(),
            permuted_labels: cfg.permute_labels,
            notes,
            report,
        };
        let out = cfg.out_dir.join("report.json");
        let mut json = serde_json::to_string_pretty(&doc)?;
        json.push('\n');
        write_atomic(&out, |w| Ok(w.write_all(json.as_bytes())?))?;
        let mut outputs = vec![out];
        outputs.extend(self.write_curves(&doc.report)?);
        let mean = &doc.report.mean;
        let stats = vec![
            ("auc_roc".into(), format!("{:.6}", mean.auc_roc)),
            ("auc_pr".into(), format!("{:.6}", mean.auc_pr)),
            ("f1".into(), format!("{:.6}", mean.f1)),
            ("accuracy".into(), format!("{:.6}", mean.accuracy)),
        ];
        Ok((Outputs(outputs), stats))
    }

    fn write_curves(&self, report: &EvalReport) -> Result<Vec<PathBuf>> {
        let dir = self.cfg.out_dir.join("curves");
        if dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        let mut paths = Vec::new();
        for f in &report.folds {
            let roc = dir.join(format!("fold_{}_roc.csv", f.index));
            write_atomic(&roc, |w| Ok(export::write_curve(&f.roc, ["fpr", "tpr"], w)?))?;
            let pr = dir.join(format!("fold_{}_pr.csv", f.index));
            write_atomic(&pr, |w| Ok(export::write_curve(&f.pr, ["recall", "precision"], w)?))?;
            paths.extend([roc, pr]);
        }
        Ok(paths)
    }

    /// Scores a third-party `date,score` file against the ground truth and
    /// writes `external_report.json` plus its two curves.
    pub fn evaluate_scores(&self, scores: &Path) -> Result<()> {
        let gt = self.ground_truth()?;
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(scores)?;
        if rdr.headers()?.iter().collect::<Vec<_>>() != ["date", "score"] {
            bail!("{}: expected header `date,score`", scores.display());
        }
        let (mut y, mut s) = (Vec::new(), Vec::new());
        let mut seen = std::collections::HashSet::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let date = parse_date(&rec[0]).ok_or_else(|| anyhow!("{} line {line}: bad date", scores.display()))?;
            let idx = gt
                .index_of(day_number(date))
                .ok_or_else(|| anyhow!("{} line {line}: {} is outside the ground-truth window", scores.display(), &rec[0]))?;
            if !seen.insert(idx) {
                bail!("{} line {line}: date {} listed twice", scores.display(), &rec[0]);
            }
            let score: f64 = rec[1].parse().map_err(|_| anyhow!("{} line {line}: bad score", scores.display()))?;
            y.push(gt.calendar.bits[idx as usize]);
            s.push(score);
        }
        let metrics = MetricSet::compute(&y, &s, self.cfg.protocol.decision_threshold)?;
        let doc = ExternalReport {
            format: "spikepair-external-report".into(),
            version: REPORT_VERSION,
            days: y.len(),
            metrics,
            roc: roc_curve(&y, &s)?,
            pr: pr_curve(&y, &s)?,
        };
        fs::create_dir_all(&self.cfg.out_dir)?;
        let out = self.cfg.out_dir.join("external_report.json");
        let mut json = serde_json::to_string_pretty(&doc)?;
        json.push('\n');
        write_atomic(&out, |w| Ok(w.write_all(json.as_bytes())?))?;
        log::emit(&[
            ("stage", &"evaluate"),
            ("status", &"ok"),
            ("external", &scores.display()),
            ("input.scores", &format!("sha256:{}", short(&sha256_file(scores)?))),
            ("auc_roc", &format!("{:.6}", doc.metrics.auc_roc)),
        ]);
        Ok(())
    }
}

pub const REPORT_FORMAT: &str = "spikepair-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    pub version: u32,
    pub num_days: u32,
    pub event_days: usize,
    pub num_pairs: usize,
    pub permuted_labels: bool,
    pub notes: Vec<String>,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalReport {
    pub format: String,
    pub version: u32,
    pub days: usize,
    pub metrics: MetricSet,
    pub roc: Vec<(f64, f64)>,
    pub pr: Vec<(f64, f64)>,
}

/// Reads every document of a JSONL corpus (for tests and small tools).
pub fn read_corpus(path: &Path) -> Result<Vec<RawDocument>> {
    let f = BufReader::new(File::open(path)?);
    read_jsonl(f).map(|r| r.map(|(_, d)| d).map_err(Into::into)).collect()
}
