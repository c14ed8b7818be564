//! Sparse (word pair × day) count store.
//!
//! Tokens are interned to `u32` ids and a pair is keyed by the two ids packed
//! into a `u64`. [`CountBuilder`] stages `(pair, day, count)` emissions in a
//! buffer that is periodically sorted and folded into a compressed layout:
//! sorted pair keys, per-pair offsets, and one arena of day-sorted non-zero
//! cells. [`CountMatrix`] is that compressed layout. Ids are private:
//! everything public speaks tokens.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use rustc_hash::FxBuildHasher;

use crate::ingest::{PairMode, WordPair};

/// Emissions buffered before a sort-and-merge pass.
pub const DEFAULT_FLUSH_THRESHOLD: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountError {
    DayOutOfRange { day: u32, num_days: u32 },
    EmptyCalendar,
    Incompatible(&'static str),
    SelfPair,
    /// More than `u32::MAX` cells or tokens.
    Capacity,
}

impl fmt::Display for CountError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountError::DayOutOfRange { day, num_days } => {
                write!(f, "day index {day} outside calendar of {num_days} days")
            }
            CountError::EmptyCalendar => f.write_str("count matrix needs at least one day"),
            CountError::Incompatible(what) => write!(f, "cannot merge count matrices: {what} differs"),
            CountError::SelfPair => f.write_str("a word pair needs two distinct tokens"),
            CountError::Capacity => f.write_str("count store exceeds 2^32 cells or tokens"),
        }
    }
}

impl core::error::Error for CountError {}

/// One non-zero cell of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub day: u32,
    pub count: u32,
}

/// Borrowed daily counts of one word pair: non-zero cells sorted by day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseSeries<'a> {
    cells: &'a [Cell],
}

impl<'a> SparseSeries<'a> {
    pub fn cells(&self) -> &'a [Cell] {
        self.cells
    }

    pub fn get(&self, day: u32) -> u32 {
        self.cells.binary_search_by_key(&day, |c| c.day).map_or(0, |i| self.cells[i].count)
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().map(|c| u64::from(c.count)).sum()
    }

    /// Number of days with a non-zero count.
    pub fn support(&self) -> usize {
        self.cells.len()
    }

    /// Writes the dense series into `out`, which must cover every stored day.
    pub fn fill_dense(&self, out: &mut [u32]) {
        out.fill(0);
        for c in self.cells {
            out[c.day as usize] = c.count;
        }
    }

    pub fn to_dense(&self, num_days: u32) -> Vec<u32> {
        let mut out = vec![0; num_days as usize];
        self.fill_dense(&mut out);
        out
    }
}

/// Borrowed view of a pair stored in a [`CountMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairRef<'a> {
    pub first: &'a str,
    pub second: &'a str,
}

impl PairRef<'_> {
    pub fn to_pair(&self) -> WordPair {
        WordPair::new(self.first, self.second).expect("stored pairs have distinct tokens")
    }
}

#[derive(Debug, Clone, Default)]
struct Interner {
    ids: HashMap<String, u32, FxBuildHasher>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, token: &str) -> Result<u32, CountError> {
        if let Some(&id) = self.ids.get(token) {
            return Ok(id);
        }
        let id = u32::try_from(self.names.len()).map_err(|_| CountError::Capacity)?;
        self.names.push(String::from(token));
        self.ids.insert(String::from(token), id);
        Ok(id)
    }

    fn get(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }
}

fn key(first: u32, second: u32) -> u64 {
    (u64::from(first) << 32) | u64::from(second)
}

fn unkey(k: u64) -> (u32, u32) {
    ((k >> 32) as u32, k as u32)
}

/// Sorted keys, `starts[i]..starts[i + 1]` indexing each key's cells.
#[derive(Debug, Clone)]
struct Csr {
    keys: Vec<u64>,
    starts: Vec<u32>,
    cells: Vec<Cell>,
}

impl Default for Csr {
    fn default() -> Self {
        Csr { keys: Vec::new(), starts: vec![0], cells: Vec::new() }
    }
}

impl Csr {
    fn len(&self) -> usize {
        self.keys.len()
    }

    fn row(&self, i: usize) -> &[Cell] {
        &self.cells[self.starts[i] as usize..self.starts[i + 1] as usize]
    }

    fn find(&self, k: u64) -> Option<usize> {
        self.keys.binary_search(&k).ok()
    }

    fn close_row(&mut self, k: u64) -> Result<(), CountError> {
        self.keys.push(k);
        self.starts.push(u32::try_from(self.cells.len()).map_err(|_| CountError::Capacity)?);
        Ok(())
    }

    /// Merges `other` into `self` back to front inside `self`'s own buffers,
    /// so the peak is one copy of the store plus `other`.
    /// Invariant: every write index stays at or above the read index it
    /// consumes, because unread rows of `other` still need room.
    fn merge_in_place(&mut self, other: &Csr) -> Result<(), CountError> {
        if other.keys.is_empty() {
            return Ok(());
        }
        let (n, m) = (self.keys.len(), self.cells.len());
        let (n2, m2) = (other.keys.len(), other.cells.len());
        u32::try_from(m + m2).map_err(|_| CountError::Capacity)?;
        self.keys.reserve_exact(n2);
        self.keys.resize(n + n2, 0);
        self.starts.reserve_exact(n2);
        self.starts.resize(n + n2 + 1, 0);
        self.cells.reserve_exact(m2);
        self.cells.resize(m + m2, Cell { day: 0, count: 0 });

        let (mut i, mut j) = (n, n2);
        let (mut wk, mut wc) = (n + n2, m + m2);
        while i > 0 || j > 0 {
            let mine = (i > 0).then(|| self.keys[i - 1]);
            let theirs = (j > 0).then(|| other.keys[j - 1]);
            let (k, take_mine, take_theirs) = match (mine, theirs) {
                (Some(a), Some(b)) if a == b => (a, true, true),
                (Some(a), Some(b)) => if a > b { (a, true, false) } else { (b, false, true) },
                (Some(a), None) => (a, true, false),
                (None, Some(b)) => (b, false, true),
                (None, None) => unreachable!(),
            };
            let (x_lo, mut x) = if take_mine {
                (self.starts[i - 1] as usize, self.starts[i] as usize)
            } else {
                (0, 0)
            };
            let ys = if take_theirs { other.row(j - 1) } else { &[][..] };
            let mut y = ys.len();
            let end = wc;
            while x > x_lo || y > 0 {
                let a = (x > x_lo).then(|| self.cells[x - 1]);
                let b = (y > 0).then(|| ys[y - 1]);
                let cell = match (a, b) {
                    (Some(a), Some(b)) if a.day == b.day => {
                        x -= 1;
                        y -= 1;
                        Cell { day: a.day, count: a.count.saturating_add(b.count) }
                    }
                    (Some(a), Some(b)) if a.day > b.day => {
                        x -= 1;
                        a
                    }
                    (Some(a), None) => {
                        x -= 1;
                        a
                    }
                    (_, Some(b)) => {
                        y -= 1;
                        b
                    }
                    (None, None) => unreachable!(),
                };
                wc -= 1;
                self.cells[wc] = cell;
            }
            if take_mine {
                i -= 1;
            }
            if take_theirs {
                j -= 1;
            }
            self.starts[wk] = end as u32;
            wk -= 1;
            self.keys[wk] = k;
        }
        // shift the merged block to the front and rebase offsets
        self.keys.copy_within(wk.., 0);
        self.keys.truncate(n + n2 - wk);
        self.cells.copy_within(wc.., 0);
        self.cells.truncate(m + m2 - wc);
        self.starts.copy_within(wk.., 0);
        self.starts.truncate(n + n2 + 1 - wk);
        self.starts[0] = wc as u32;
        for s in &mut self.starts {
            *s -= wc as u32;
        }
        Ok(())
    }
}

/// Staged emission: packed pair key, day, count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Emission {
    key: u64,
    day: u32,
    count: u32,
}

/// Accumulates pair counts document by document.
#[derive(Debug, Clone)]
pub struct CountBuilder {
    num_days: u32,
    day_zero: i64,
    mode: PairMode,
    tokens: Interner,
    pending: Vec<Emission>,
    flush_at: usize,
    frozen: Csr,
    ids: Vec<u32>,
}

impl CountBuilder {
    pub fn new(num_days: u32, day_zero: i64) -> Result<Self, CountError> {
        if num_days == 0 {
            return Err(CountError::EmptyCalendar);
        }
        Ok(CountBuilder {
            num_days,
            day_zero,
            mode: PairMode::Ordered,
            tokens: Interner::default(),
            pending: Vec::new(),
            flush_at: DEFAULT_FLUSH_THRESHOLD,
            frozen: Csr::default(),
            ids: Vec::new(),
        })
    }

    pub fn with_mode(mut self, mode: PairMode) -> Self {
        self.mode = mode;
        self
    }

    /// Buffered emissions before a merge pass; at least 1.
    pub fn with_flush_threshold(mut self, emissions: usize) -> Self {
        self.flush_at = emissions.max(1);
        self
    }

    pub fn num_days(&self) -> u32 {
        self.num_days
    }

    fn check_day(&self, day: u32) -> Result<(), CountError> {
        if day >= self.num_days {
            Err(CountError::DayOutOfRange { day, num_days: self.num_days })
        } else {
            Ok(())
        }
    }

    fn emit(&mut self, key: u64, day: u32, count: u32) -> Result<(), CountError> {
        self.pending.push(Emission { key, day, count });
        if self.pending.len() >= self.flush_at {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), CountError> {
        if self.pending.is_empty() {
            return Ok(());
        }
        self.pending.sort_unstable();
        let mut staged = Csr::default();
        let mut current = None;
        for e in self.pending.drain(..) {
            if current == Some(e.key) {
                let last = staged.cells.last_mut().expect("row open");
                if last.day == e.day {
                    last.count = last.count.saturating_add(e.count);
                    continue;
                }
            } else if let Some(k) = current.replace(e.key) {
                staged.close_row(k)?;
            }
            staged.cells.push(Cell { day: e.day, count: e.count });
        }
        if let Some(k) = current {
            staged.close_row(k)?;
        }
        self.frozen.merge_in_place(&staged)?;
        Ok(())
    }

    /// Adds one occurrence of every listed pair on `day`.
    pub fn accumulate(&mut self, day: u32, pairs: &[WordPair]) -> Result<(), CountError> {
        self.check_day(day)?;
        for p in pairs {
            let (a, b) = (self.tokens.intern(p.first())?, self.tokens.intern(p.second())?);
            self.emit(key(a, b), day, 1)?;
        }
        Ok(())
    }

    /// Extracts the pairs of one tokenized document (using the builder's
    /// pair mode) and counts them on `day`. Returns the number of pairs.
    pub fn accumulate_tokens<S: AsRef<str>>(&mut self, day: u32, tokens: &[S]) -> Result<usize, CountError> {
        self.check_day(day)?;
        let mut ids = core::mem::take(&mut self.ids);
        ids.clear();
        for t in tokens {
            let t = t.as_ref();
            if t.is_empty() {
                continue;
            }
            let id = self.tokens.intern(t)?;
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        let mut emitted = 0;
        for (i, &a) in ids.iter().enumerate() {
            for (j, &b) in ids.iter().enumerate() {
                let k = match self.mode {
                    PairMode::Ordered if i != j => key(a, b),
                    PairMode::Canonical if i < j => {
                        if self.tokens.name(a) <= self.tokens.name(b) {
                            key(a, b)
                        } else {
                            key(b, a)
                        }
                    }
                    _ => continue,
                };
                self.emit(k, day, 1)?;
                emitted += 1;
            }
        }
        self.ids = ids;
        Ok(emitted)
    }

    /// Adds `count` to one cell. Zero counts still register the pair.
    pub fn add_count(&mut self, first: &str, second: &str, day: u32, count: u32) -> Result<(), CountError> {
        self.check_day(day)?;
        if first == second || first.is_empty() || second.is_empty() {
            return Err(CountError::SelfPair);
        }
        let (a, b) = (self.tokens.intern(first)?, self.tokens.intern(second)?);
        self.emit(key(a, b), day, count)
    }

    pub fn finish(mut self) -> Result<CountMatrix, CountError> {
        self.flush()?;
        let mut csr = self.frozen;
        // drop zero cells left by zero-count additions; keep their rows
        if csr.cells.iter().any(|c| c.count == 0) {
            let mut cells = Vec::with_capacity(csr.cells.len());
            let mut starts = Vec::with_capacity(csr.starts.len());
            starts.push(0);
            for i in 0..csr.len() {
                cells.extend(csr.row(i).iter().filter(|c| c.count > 0));
                starts.push(cells.len() as u32);
            }
            csr.cells = cells;
            csr.starts = starts;
        }
        csr.keys.shrink_to_fit();
        csr.starts.shrink_to_fit();
        csr.cells.shrink_to_fit();
        Ok(CountMatrix { num_days: self.num_days, day_zero: self.day_zero, mode: self.mode, tokens: self.tokens, csr })
    }
}

/// Word-pair by day count matrix with a calendar starting at `day_zero`
/// (days since 1970-01-01).
#[derive(Debug, Clone)]
pub struct CountMatrix {
    num_days: u32,
    day_zero: i64,
    mode: PairMode,
    tokens: Interner,
    csr: Csr,
}

impl CountMatrix {
    /// An empty matrix.
    pub fn new(num_days: u32, day_zero: i64) -> Result<Self, CountError> {
        CountBuilder::new(num_days, day_zero)?.finish()
    }

    pub fn num_days(&self) -> u32 {
        self.num_days
    }

    pub fn day_zero(&self) -> i64 {
        self.day_zero
    }

    pub fn mode(&self) -> PairMode {
        self.mode
    }

    /// Number of stored pairs.
    pub fn len(&self) -> usize {
        self.csr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.csr.keys.is_empty()
    }

    pub fn num_tokens(&self) -> usize {
        self.tokens.names.len()
    }

    pub fn get(&self, first: &str, second: &str) -> Option<SparseSeries<'_>> {
        let (a, b) = (self.tokens.get(first)?, self.tokens.get(second)?);
        self.csr.find(key(a, b)).map(|i| SparseSeries { cells: self.csr.row(i) })
    }

    pub fn series(&self, pair: &WordPair) -> Option<SparseSeries<'_>> {
        self.get(pair.first(), pair.second())
    }

    /// Dense series of `pair`; all zeros when the pair is absent.
    pub fn dense(&self, pair: &WordPair) -> Vec<u32> {
        self.series(pair).map_or_else(|| vec![0; self.num_days as usize], |s| s.to_dense(self.num_days))
    }

    fn pair_at(&self, i: usize) -> (PairRef<'_>, SparseSeries<'_>) {
        let (a, b) = unkey(self.csr.keys[i]);
        (
            PairRef { first: self.tokens.name(a), second: self.tokens.name(b) },
            SparseSeries { cells: self.csr.row(i) },
        )
    }

    /// Pairs in storage order (deterministic for a given insertion order).
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (PairRef<'_>, SparseSeries<'_>)> + '_ {
        (0..self.csr.len()).map(move |i| self.pair_at(i))
    }

    /// Pair number `i` in storage order.
    pub fn at(&self, i: usize) -> (PairRef<'_>, SparseSeries<'_>) {
        self.pair_at(i)
    }

    /// Pairs sorted by `(first, second)` token.
    pub fn sorted(&self) -> Vec<(PairRef<'_>, SparseSeries<'_>)> {
        let mut all: Vec<_> = self.iter().collect();
        all.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        all
    }

    /// Keeps the pairs with total count ≥ `min_total` that occur on at least
    /// `min_days` distinct days.
    pub fn prune(mut self, min_total: u64, min_days: usize) -> Self {
        self.retain(|s| s.total() >= min_total && s.support() >= min_days);
        self
    }

    pub fn retain(&mut self, mut keep: impl FnMut(SparseSeries<'_>) -> bool) {
        let csr = &mut self.csr;
        let (mut w_key, mut w_cell) = (0usize, 0usize);
        for i in 0..csr.keys.len() {
            let (s, e) = (csr.starts[i] as usize, csr.starts[i + 1] as usize);
            if !keep(SparseSeries { cells: &csr.cells[s..e] }) {
                continue;
            }
            csr.cells.copy_within(s..e, w_cell);
            csr.keys[w_key] = csr.keys[i];
            csr.starts[w_key] = w_cell as u32;
            w_cell += e - s;
            w_key += 1;
        }
        csr.keys.truncate(w_key);
        csr.starts.truncate(w_key);
        csr.starts.push(w_cell as u32);
        csr.cells.truncate(w_cell);
    }

    /// Adds every cell of `other` into `self`.
    pub fn merge(&mut self, other: &CountMatrix) -> Result<(), CountError> {
        if other.num_days != self.num_days {
            return Err(CountError::Incompatible("num_days"));
        }
        if other.day_zero != self.day_zero {
            return Err(CountError::Incompatible("day_zero"));
        }
        if other.mode != self.mode {
            return Err(CountError::Incompatible("pair mode"));
        }
        let remap = other.tokens.names.iter().map(|n| self.tokens.intern(n)).collect::<Result<Vec<u32>, _>>()?;
        let mut order: Vec<(u64, u32)> = other
            .csr
            .keys
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let (a, b) = unkey(k);
                (key(remap[a as usize], remap[b as usize]), i as u32)
            })
            .collect();
        order.sort_unstable();
        let mut staged = Csr::default();
        for (k, i) in order {
            staged.cells.extend_from_slice(other.csr.row(i as usize));
            staged.close_row(k)?;
        }
        self.csr.merge_in_place(&staged)?;
        Ok(())
    }

    /// Per-day sum over all pairs.
    pub fn column_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.num_days as usize];
        for c in &self.csr.cells {
            sums[c.day as usize] += u64::from(c.count);
        }
        sums
    }

    /// Total number of stored non-zero cells.
    pub fn nonzero_cells(&self) -> usize {
        self.csr.cells.len()
    }

    /// Approximate heap bytes held by the matrix.
    pub fn heap_bytes(&self) -> usize {
        use core::mem::size_of;
        self.csr.keys.capacity() * size_of::<u64>()
            + self.csr.starts.capacity() * size_of::<u32>()
            + self.csr.cells.capacity() * size_of::<Cell>()
            + self.tokens.names.iter().map(|n| 2 * n.len() + 2 * size_of::<String>() + 8).sum::<usize>()
    }
}

impl PartialEq for CountMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.num_days == other.num_days
            && self.day_zero == other.day_zero
            && self.mode == other.mode
            && self.len() == other.len()
            && self.iter().all(|(p, s)| other.get(p.first, p.second) == Some(s))
    }
}

impl Eq for CountMatrix {}
