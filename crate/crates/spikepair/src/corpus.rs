//! Newline-delimited JSON corpora, tokenized-document files and day indexing.

use std::io::{BufRead, Write};

use chrono::{DateTime, FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: document {id:?} has unparseable timestamp {value:?}")]
    Timestamp { line: usize, id: String, value: String },
    #[error("line {line}: unparseable date {value:?}")]
    Date { line: usize, value: String },
    #[error("invalid utc offset {0:?}, expected +HH:MM or -HH:MM")]
    Offset(String),
}

/// One input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    /// ISO-8601 / RFC 3339 instant, e.g. `2017-03-01T09:30:00Z`.
    pub ts: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
}

/// Cleaned document as written by the ingest stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub id: String,
    /// Civil date (`YYYY-MM-DD`) in the configured offset.
    pub date: String,
    pub tokens: Vec<String>,
}

/// Days since 1970-01-01 for a civil date.
pub fn day_number(date: NaiveDate) -> i64 {
    date.signed_duration_since(NaiveDate::default()).num_days()
}

pub fn date_of(day: i64) -> NaiveDate {
    NaiveDate::default() + chrono::Duration::days(day)
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

pub fn format_date(day: i64) -> String {
    date_of(day).format("%Y-%m-%d").to_string()
}

/// Maps instants to civil days at one fixed UTC offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DayClock {
    offset: FixedOffset,
}

impl Default for DayClock {
    fn default() -> Self {
        DayClock { offset: FixedOffset::east_opt(0).expect("zero offset") }
    }
}

impl DayClock {
    /// Parses `+HH:MM`, `-HH:MM` or `Z`.
    pub fn parse(spec: &str) -> Result<Self, CorpusError> {
        let bad = || CorpusError::Offset(spec.to_string());
        if spec == "Z" || spec == "UTC" {
            return Ok(DayClock::default());
        }
        let (sign, rest) = match spec.as_bytes().first() {
            Some(b'+') => (1, &spec[1..]),
            Some(b'-') => (-1, &spec[1..]),
            _ => return Err(bad()),
        };
        let (h, m) = rest.split_once(':').ok_or_else(bad)?;
        let (h, m): (i32, i32) = (h.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?);
        if !(0..24).contains(&h) || !(0..60).contains(&m) {
            return Err(bad());
        }
        let offset = FixedOffset::east_opt(sign * (h * 3600 + m * 60)).ok_or_else(bad)?;
        Ok(DayClock { offset })
    }

    /// Civil day number of an RFC 3339 timestamp.
    pub fn day_of(&self, ts: &str) -> Option<i64> {
        let t = DateTime::parse_from_rfc3339(ts).ok()?;
        Some(day_number(t.with_timezone(&self.offset).date_naive()))
    }
}

/// Streams `(line number, record)` from a JSONL reader, skipping blank
/// lines. Line numbers start at 1.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(
    reader: impl BufRead,
) -> impl Iterator<Item = Result<(usize, T), CorpusError>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(CorpusError::Io(e))),
        };
        if line.trim().is_empty() {
            return None;
        }
        Some(serde_json::from_str(&line).map(|r| (i + 1, r)).map_err(|source| CorpusError::Json { line: i + 1, source }))
    })
}

pub fn write_jsonl<T: Serialize>(out: &mut impl Write, record: &T) -> Result<(), CorpusError> {
    serde_json::to_writer(&mut *out, record).map_err(|e| CorpusError::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Timestamp for synthetic document `seq` of day `day`: one second apart,
/// wrapping inside the day.
pub fn synthetic_timestamp(day: i64, seq: u32) -> String {
    let secs = seq % 86_400;
    format!("{}T{:02}:{:02}:{:02}Z", format_date(day), secs / 3600, secs / 60 % 60, secs % 60)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_moves_late_utc_posts_to_next_day() {
        let utc = DayClock::default();
        let melb = DayClock::parse("+10:00").unwrap();
        let ts = "2017-03-01T20:00:00Z";
        assert_eq!(utc.day_of(ts).unwrap() + 1, melb.day_of(ts).unwrap());
        assert_eq!(DayClock::parse("-03:30").unwrap().day_of("2017-03-01T02:00:00Z"), utc.day_of("2017-02-28T12:00:00Z"));
        assert!(DayClock::parse("10:00").is_err());
        assert!(DayClock::parse("+25:00").is_err());
    }

    #[test]
    fn rejects_bad_timestamps() {
        assert!(DayClock::default().day_of("2017-13-01T00:00:00Z").is_none());
        assert!(DayClock::default().day_of("yesterday").is_none());
    }

    #[test]
    fn date_round_trip() {
        for d in [-1000, 0, 17_000, 20_000] {
            assert_eq!(day_number(date_of(d)), d);
            assert_eq!(parse_date(&format_date(d)).map(day_number), Some(d));
        }
        assert_eq!(format_date(0), "1970-01-01");
    }

    #[test]
    fn synthetic_timestamps_parse_back_to_their_day() {
        let clock = DayClock::default();
        for seq in [0, 1, 86_399, 86_400, 200_000] {
            assert_eq!(clock.day_of(&synthetic_timestamp(17_500, seq)), Some(17_500));
        }
    }

    #[test]
    fn jsonl_reports_line_numbers() {
        let text = "{\"id\":\"a\",\"ts\":\"2017-01-01T00:00:00Z\",\"text\":\"x\"}\n\nnot json\n";
        let got: Vec<_> = read_jsonl::<RawDocument>(text.as_bytes()).collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].as_ref().unwrap().0, 1);
        assert!(matches!(got[1], Err(CorpusError::Json { line: 3, .. })));
    }
}
