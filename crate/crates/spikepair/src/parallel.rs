//! Rayon-backed ranking and cross-validation. Output never depends on the
//! worker count: pairs are scored independently and the final ordering is
//! the core's total order (score, then lexicographic pair).

use rayon::prelude::*;
use rayon::ThreadPool;

use spikepair_core::eval::{make_folds, run_fold, EvalError, EvalReport, ProtocolConfig, Ranker};
use spikepair_core::scoring::{finalize_ranking, PairScorer};
use spikepair_core::{CountMatrix, EventCalendar, FeatureScore, ScoringError, SelectionConfig};

/// Pairs per scheduling unit.
const MIN_CHUNK: usize = 2048;

pub fn pool(workers: usize) -> ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .thread_name(|i| format!("spikepair-{i}"))
        .build()
        .expect("thread pool")
}

#[derive(Clone, Copy)]
pub struct ParallelRanker<'p> {
    pool: &'p ThreadPool,
}

impl<'p> ParallelRanker<'p> {
    pub fn new(pool: &'p ThreadPool) -> Self {
        ParallelRanker { pool }
    }
}

impl Ranker for ParallelRanker<'_> {
    fn rank(
        &self,
        matrix: &CountMatrix,
        gt: &EventCalendar,
        days: Option<&[u32]>,
        config: &SelectionConfig,
    ) -> Result<Vec<FeatureScore>, ScoringError> {
        let proto = PairScorer::new(matrix, gt, days, config)?;
        let scored = self.pool.install(|| {
            (0..matrix.len())
                .into_par_iter()
                .with_min_len(MIN_CHUNK)
                .map_init(
                    || proto.clone(),
                    |scorer, i| {
                        let (pair, series) = matrix.at(i);
                        (pair, scorer.score(series))
                    },
                )
                .collect::<Vec<_>>()
        });
        finalize_ranking(scored, config.method, config.top_n)
    }
}

/// Cross-validation with folds and per-fold ranking on `pool`.
pub fn cross_validate(
    matrix: &CountMatrix,
    gt: &EventCalendar,
    config: &ProtocolConfig,
    pool: &ThreadPool,
) -> Result<EvalReport, EvalError> {
    if matrix.num_days() as usize != gt.len() {
        return Err(EvalError::Protocol("count matrix and calendar differ in length"));
    }
    let folds = make_folds(gt, &config.folds)?;
    let ranker = ParallelRanker::new(pool);
    let results = pool.install(|| {
        folds.par_iter().map(|f| run_fold(matrix, gt, f, config, &ranker)).collect::<Result<Vec<_>, _>>()
    })?;
    Ok(EvalReport::from_folds(*config, results))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spikepair_core::eval::{cross_validate as sequential_cv, FoldConfig, SequentialRanker};
    use spikepair_core::scoring::rank_top_n;
    use spikepair_core::synth::{generate, SynthConfig};
    use spikepair_core::{ingest::PairMode, Method};

    fn corpus() -> (CountMatrix, EventCalendar) {
        let cfg = SynthConfig { num_days: 120, noise_vocab: 400, planted_pairs: 8, seed: 3, ..Default::default() };
        let c = generate(&cfg).unwrap();
        (c.count_matrix(PairMode::Ordered).unwrap(), c.calendar)
    }

    #[test]
    fn ranking_matches_sequential_for_any_worker_count() {
        let (m, gt) = corpus();
        for method in Method::ALL {
            let cfg = SelectionConfig { method, top_n: 40, ..Default::default() };
            let want = rank_top_n(&m, &gt, &cfg).unwrap();
            for workers in [1, 3, 4] {
                let p = pool(workers);
                assert_eq!(ParallelRanker::new(&p).rank(&m, &gt, None, &cfg).unwrap(), want, "{method} {workers}");
            }
        }
    }

    #[test]
    fn cross_validation_matches_sequential() {
        let (m, gt) = corpus();
        let cfg = ProtocolConfig {
            selection: SelectionConfig { top_n: 10, ..Default::default() },
            folds: FoldConfig { folds: 3, train_size: 90, test_size: 30, seed: 5, ..Default::default() },
            ..Default::default()
        };
        let want = sequential_cv(&m, &gt, &cfg, &SequentialRanker).unwrap();
        for workers in [1, 4] {
            assert_eq!(cross_validate(&m, &gt, &cfg, &pool(workers)).unwrap(), want);
        }
    }
}
