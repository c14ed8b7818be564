//! CSV exports: count triplets, ranked feature scores, curves.

use std::io::Write;

use spikepair_core::{CountMatrix, FeatureScore, Method, WordPair};

/// `pair_first,pair_second,day,count` for every non-zero cell, pairs in
/// lexicographic order, days ascending. `day` is the calendar index.
pub fn write_count_triplets(matrix: &CountMatrix, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["pair_first", "pair_second", "day", "count"])?;
    for (p, s) in matrix.sorted() {
        for c in s.cells() {
            w.write_record([p.first, p.second, &c.day.to_string(), &c.count.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `rank,first,second,method,score`, rank starting at 1.
pub fn write_scores(scores: &[FeatureScore], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "first", "second", "method", "score"])?;
    for (i, f) in scores.iter().enumerate() {
        w.write_record([
            &(i + 1).to_string(),
            f.pair.first(),
            f.pair.second(),
            f.method.as_str(),
            &f.score.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ScoresError {
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("scores file line {line}: {message}")]
    Row { line: u64, message: String },
}

/// Reads a file written by [`write_scores`], in rank order.
pub fn read_scores(input: impl std::io::Read) -> Result<Vec<FeatureScore>, ScoresError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != ["rank", "first", "second", "method", "score"] {
        return Err(ScoresError::Row { line: 1, message: "expected header rank,first,second,method,score".into() });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = |message: String| ScoresError::Row { line, message };
        let rank: usize = rec[0].parse().map_err(|_| row(format!("bad rank {:?}", &rec[0])))?;
        if rank != out.len() + 1 {
            return Err(row(format!("rank {rank} out of sequence")));
        }
        let pair = WordPair::new(&rec[1], &rec[2]).map_err(|e| row(e.to_string()))?;
        let method: Method = rec[3].parse().map_err(|_| row(format!("unknown method {:?}", &rec[3])))?;
        let score: f64 = rec[4].parse().map_err(|_| row(format!("bad score {:?}", &rec[4])))?;
        out.push(FeatureScore { pair, method, score });
    }
    Ok(out)
}

/// Two-column curve file with the given header.
pub fn write_curve(points: &[(f64, f64)], header: [&str; 2], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (x, y) in points {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
