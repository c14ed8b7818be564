//! `BPCM` binary count container.
//!
//! All integers are little-endian.
//!
//! ```text
//! magic      4 bytes  "BPCM"
//! version    u16      1
//! flags      u16      bit 0: canonical pair mode; other bits zero
//! day_zero   i64      days since 1970-01-01 of calendar index 0
//! num_days   u32      > 0
//! num_tokens u32
//! tokens     num_tokens × (len u32, UTF-8 bytes), strictly ascending
//! num_pairs  u64
//! pairs      num_pairs × (first u32, second u32, num_runs u32,
//!                         num_runs × (start u32, len u32, count u32))
//! ```
//!
//! Pairs are strictly ascending by `(first, second)` token id, which is the
//! lexicographic token order. A run covers days `start..start + len`, all
//! with the same non-zero `count`; runs are ascending and do not touch the
//! next run with an equal count. The encoding of a matrix is therefore
//! unique, so equal matrices produce identical files.

use std::collections::HashMap;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use spikepair_core::ingest::PairMode;
use spikepair_core::{CountBuilder, CountError, CountMatrix};

pub const MAGIC: &[u8; 4] = b"BPCM";
pub const VERSION: u16 = 1;
const FLAG_CANONICAL: u16 = 1;

#[derive(Debug, thiserror::Error)]
pub enum BpcmError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("count container format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },
    #[error("{0}")]
    Count(#[from] CountError),
}

struct Sink<W: Write> {
    w: W,
}

impl<W: Write> Sink<W> {
    fn u16(&mut self, v: u16) -> io::Result<()> {
        self.w.write_all(&v.to_le_bytes())
    }
    fn u32(&mut self, v: u32) -> io::Result<()> {
        self.w.write_all(&v.to_le_bytes())
    }
    fn u64(&mut self, v: u64) -> io::Result<()> {
        self.w.write_all(&v.to_le_bytes())
    }
    fn i64(&mut self, v: i64) -> io::Result<()> {
        self.w.write_all(&v.to_le_bytes())
    }
}

/// Writes `matrix` in canonical form.
pub fn write(matrix: &CountMatrix, out: impl Write) -> Result<(), BpcmError> {
    let mut names: Vec<&str> = Vec::new();
    {
        let mut seen: HashMap<&str, ()> = HashMap::new();
        for (p, _) in matrix.iter() {
            for t in [p.first, p.second] {
                if seen.insert(t, ()).is_none() {
                    names.push(t);
                }
            }
        }
    }
    names.sort_unstable();
    let rank: HashMap<&str, u32> = names.iter().enumerate().map(|(i, &n)| (n, i as u32)).collect();
    let mut order: Vec<(u32, u32, u32)> = matrix
        .iter()
        .enumerate()
        .map(|(i, (p, _))| (rank[p.first], rank[p.second], i as u32))
        .collect();
    order.sort_unstable();

    let mut s = Sink { w: out };
    s.w.write_all(MAGIC)?;
    s.u16(VERSION)?;
    s.u16(if matrix.mode() == PairMode::Canonical { FLAG_CANONICAL } else { 0 })?;
    s.i64(matrix.day_zero())?;
    s.u32(matrix.num_days())?;
    s.u32(names.len() as u32)?;
    for n in &names {
        s.u32(n.len() as u32)?;
        s.w.write_all(n.as_bytes())?;
    }
    s.u64(order.len() as u64)?;
    let mut runs: Vec<(u32, u32, u32)> = Vec::new();
    for &(a, b, i) in &order {
        let (_, series) = matrix.at(i as usize);
        runs.clear();
        for c in series.cells() {
            match runs.last_mut() {
                Some((start, len, count)) if *start + *len == c.day && *count == c.count => *len += 1,
                _ => runs.push((c.day, 1, c.count)),
            }
        }
        s.u32(a)?;
        s.u32(b)?;
        s.u32(runs.len() as u32)?;
        for &(start, len, count) in &runs {
            s.u32(start)?;
            s.u32(len)?;
            s.u32(count)?;
        }
    }
    s.w.flush()?;
    Ok(())
}

struct Source<R: Read> {
    r: R,
    offset: u64,
}

impl<R: Read> Source<R> {
    fn fail<T>(&self, at: u64, message: impl Into<String>) -> Result<T, BpcmError> {
        Err(BpcmError::Format { offset: at, message: message.into() })
    }

    fn bytes<const N: usize>(&mut self) -> Result<[u8; N], BpcmError> {
        let mut buf = [0u8; N];
        self.fill(&mut buf)?;
        Ok(buf)
    }

    fn fill(&mut self, buf: &mut [u8]) -> Result<(), BpcmError> {
        match self.r.read_exact(buf) {
            Ok(()) => {
                self.offset += buf.len() as u64;
                Ok(())
            }
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => self.fail(self.offset, "truncated file"),
            Err(e) => Err(e.into()),
        }
    }

    fn u16(&mut self) -> Result<u16, BpcmError> {
        Ok(u16::from_le_bytes(self.bytes()?))
    }
    fn u32(&mut self) -> Result<u32, BpcmError> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64, BpcmError> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn i64(&mut self) -> Result<i64, BpcmError> {
        Ok(i64::from_le_bytes(self.bytes()?))
    }
}

/// Reads and validates a container.
pub fn read(input: impl Read) -> Result<CountMatrix, BpcmError> {
    let mut src = Source { r: input, offset: 0 };
    if &src.bytes::<4>()? != MAGIC {
        return src.fail(0, "wrong magic header");
    }
    let version = src.u16()?;
    if version != VERSION {
        return src.fail(4, format!("unsupported version {version}"));
    }
    let flags = src.u16()?;
    if flags & !FLAG_CANONICAL != 0 {
        return src.fail(6, format!("unknown flags {flags:#06x}"));
    }
    let mode = if flags & FLAG_CANONICAL != 0 { PairMode::Canonical } else { PairMode::Ordered };
    let day_zero = src.i64()?;
    let at = src.offset;
    let num_days = src.u32()?;
    if num_days == 0 {
        return src.fail(at, "num_days is zero");
    }
    let num_tokens = src.u32()?;
    let mut names: Vec<String> = Vec::new();
    for _ in 0..num_tokens {
        let at = src.offset;
        let len = src.u32()? as usize;
        if len == 0 || len > 1 << 16 {
            return src.fail(at, format!("token length {len} out of range"));
        }
        let mut buf = vec![0u8; len];
        src.fill(&mut buf)?;
        let Ok(name) = String::from_utf8(buf) else {
            return src.fail(at + 4, "token is not UTF-8");
        };
        if names.last().is_some_and(|prev| *prev >= name) {
            return src.fail(at, "token dictionary not strictly ascending");
        }
        names.push(name);
    }
    let num_pairs = src.u64()?;
    let mut builder = CountBuilder::new(num_days, day_zero)?.with_mode(mode);
    let mut prev: Option<(u32, u32)> = None;
    for _ in 0..num_pairs {
        let at = src.offset;
        let (a, b) = (src.u32()?, src.u32()?);
        if a >= num_tokens || b >= num_tokens || a == b {
            return src.fail(at, format!("invalid token ids ({a}, {b})"));
        }
        if mode == PairMode::Canonical && a > b {
            return src.fail(at, "canonical container holds an unsorted pair");
        }
        if prev.is_some_and(|p| p >= (a, b)) {
            return src.fail(at, "pairs not strictly ascending");
        }
        prev = Some((a, b));
        let (first, second) = (&names[a as usize], &names[b as usize]);
        let num_runs = src.u32()?;
        if num_runs == 0 {
            builder.add_count(first, second, 0, 0)?;
        }
        let mut next_free = 0u64;
        let mut last_count = 0;
        for _ in 0..num_runs {
            let at = src.offset;
            let (start, len, count) = (src.u32()?, src.u32()?, src.u32()?);
            let end = u64::from(start) + u64::from(len);
            if len == 0 || count == 0 || end > u64::from(num_days) {
                return src.fail(at, format!("invalid run (start {start}, len {len}, count {count})"));
            }
            if u64::from(start) < next_free || (u64::from(start) == next_free && count == last_count) {
                return src.fail(at, "runs overlap or are not maximal");
            }
            for day in start..start + len {
                builder.add_count(first, second, day, count)?;
            }
            next_free = end;
            last_count = count;
        }
    }
    let mut probe = [0u8; 1];
    match src.r.read(&mut probe) {
        Ok(0) => {}
        Ok(_) => return src.fail(src.offset, "trailing bytes after last pair"),
        Err(e) => return Err(e.into()),
    }
    Ok(builder.finish()?)
}

pub fn save(matrix: &CountMatrix, path: &Path) -> Result<(), BpcmError> {
    let f = std::fs::File::create(path)?;
    write(matrix, BufWriter::with_capacity(1 << 20, f))
}

pub fn load(path: &Path) -> Result<CountMatrix, BpcmError> {
    let f = std::fs::File::open(path)?;
    read(BufReader::with_capacity(1 << 20, f))
}
