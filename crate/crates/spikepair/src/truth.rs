//! Ground-truth calendar (`date,event_count`) and planted-pair manifest
//! (`first,second`) CSV files.

use std::path::Path;

use spikepair_core::signal::binarize_events;
use spikepair_core::{EventCalendar, WordPair};

use crate::corpus::{day_number, format_date, parse_date};

#[derive(Debug, thiserror::Error)]
pub enum TruthError {
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: expected header `{expected}`")]
    Header { path: String, expected: &'static str },
    #[error("{path} line {line}: {message}")]
    Row { path: String, line: u64, message: String },
    #[error("{path}: no rows")]
    Empty { path: String },
}

/// Event calendar anchored at `day_zero` (days since 1970-01-01).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    pub day_zero: i64,
    pub calendar: EventCalendar,
}

impl GroundTruth {
    pub fn num_days(&self) -> u32 {
        self.calendar.len() as u32
    }

    /// Calendar index of an absolute day number, if inside the window.
    pub fn index_of(&self, day: i64) -> Option<u32> {
        let i = day - self.day_zero;
        (0..i64::from(self.num_days())).contains(&i).then_some(i as u32)
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> TruthError + '_ {
    move |source| TruthError::Csv { path: path.display().to_string(), source }
}

fn check_header(rdr: &mut csv::Reader<std::fs::File>, path: &Path, expected: &'static str) -> Result<(), TruthError> {
    let header = rdr.headers().map_err(csv_err(path))?;
    let got: Vec<&str> = header.iter().map(str::trim).collect();
    if got.join(",") != expected {
        return Err(TruthError::Header { path: path.display().to_string(), expected });
    }
    Ok(())
}

/// Reads one row per consecutive calendar day. Gaps, duplicates and
/// out-of-order dates are errors.
pub fn read_ground_truth(path: &Path) -> Result<GroundTruth, TruthError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err(path))?;
    check_header(&mut rdr, path, "date,event_count")?;
    let mut counts = Vec::new();
    let mut day_zero = None;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err(path))?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = |message: String| TruthError::Row { path: path.display().to_string(), line, message };
        let date = parse_date(&rec[0]).ok_or_else(|| row(format!("unparseable date {:?}", &rec[0])))?;
        let count: u32 = rec[1].parse().map_err(|_| row(format!("event_count {:?} is not a non-negative integer", &rec[1])))?;
        let day = day_number(date);
        let start = *day_zero.get_or_insert(day);
        let expected = start + counts.len() as i64;
        if day != expected {
            return Err(row(if day > expected {
                format!("missing date {}", format_date(expected))
            } else {
                format!("date {} is duplicated or out of order", format_date(day))
            }));
        }
        counts.push(count);
    }
    let day_zero = day_zero.ok_or_else(|| TruthError::Empty { path: path.display().to_string() })?;
    Ok(GroundTruth { day_zero, calendar: binarize_events(&counts) })
}

pub fn write_ground_truth(path: &Path, day_zero: i64, counts: &[u32]) -> Result<(), TruthError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["date", "event_count"]).map_err(csv_err(path))?;
    for (i, c) in counts.iter().enumerate() {
        w.write_record([format_date(day_zero + i as i64), c.to_string()]).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| csv_err(path)(e.into()))?;
    Ok(())
}

pub fn read_planted(path: &Path) -> Result<Vec<WordPair>, TruthError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err(path))?;
    check_header(&mut rdr, path, "first,second")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err(path))?;
        let line = rec.position().map_or(0, |p| p.line());
        let pair = WordPair::new(&rec[0], &rec[1])
            .map_err(|e| TruthError::Row { path: path.display().to_string(), line, message: e.to_string() })?;
        out.push(pair);
    }
    Ok(out)
}

pub fn write_planted(path: &Path, pairs: &[WordPair]) -> Result<(), TruthError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["first", "second"]).map_err(csv_err(path))?;
    for p in pairs {
        w.write_record([p.first(), p.second()]).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| csv_err(path)(e.into()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_consecutive_calendar() {
        let f = file("date,event_count\n2017-01-01,0\n2017-01-02,3\n2017-01-03,1\n");
        let gt = read_ground_truth(f.path()).unwrap();
        assert_eq!(gt.calendar.bits, vec![false, true, true]);
        assert_eq!(gt.calendar.source_counts.as_deref(), Some(&[0, 3, 1][..]));
        assert_eq!(format_date(gt.day_zero), "2017-01-01");
        assert_eq!(gt.index_of(gt.day_zero + 2), Some(2));
        assert_eq!(gt.index_of(gt.day_zero + 3), None);
        assert_eq!(gt.index_of(gt.day_zero - 1), None);
    }

    #[test]
    fn missing_date_is_an_error() {
        let f = file("date,event_count\n2017-01-01,0\n2017-01-03,1\n");
        let err = read_ground_truth(f.path()).unwrap_err().to_string();
        assert!(err.contains("missing date 2017-01-02"), "{err}");
        let dup = file("date,event_count\n2017-01-01,0\n2017-01-01,1\n");
        assert!(read_ground_truth(dup.path()).unwrap_err().to_string().contains("duplicated"));
    }

    #[test]
    fn bad_header_and_values() {
        assert!(matches!(read_ground_truth(file("day,count\n").path()), Err(TruthError::Header { .. })));
        assert!(matches!(read_ground_truth(file("date,event_count\n").path()), Err(TruthError::Empty { .. })));
        assert!(read_ground_truth(file("date,event_count\n2017-01-01,-1\n").path()).is_err());
    }

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let gt_path = dir.path().join("gt.csv");
        write_ground_truth(&gt_path, 17_000, &[0, 2, 0, 1]).unwrap();
        let gt = read_ground_truth(&gt_path).unwrap();
        assert_eq!((gt.day_zero, gt.calendar.bits.clone()), (17_000, vec![false, true, false, true]));
        let pl = dir.path().join("planted.csv");
        let pairs = vec![WordPair::new("pa000", "pb000").unwrap(), WordPair::new("x", "y").unwrap()];
        write_planted(&pl, &pairs).unwrap();
        assert_eq!(read_planted(&pl).unwrap(), pairs);
    }
}
