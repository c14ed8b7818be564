use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Two distinct tokens that co-occur in one document. Order matters unless
/// pairs were produced in [`PairMode::Canonical`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WordPair {
    first: String,
    second: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordPairError {
    SelfPair(String),
    EmptyToken,
}

impl fmt::Display for WordPairError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordPairError::SelfPair(t) => write!(f, "word pair needs two distinct tokens, got ({t}, {t})"),
            WordPairError::EmptyToken => f.write_str("word pair token is empty"),
        }
    }
}

impl core::error::Error for WordPairError {}

impl WordPair {
    pub fn new(first: impl Into<String>, second: impl Into<String>) -> Result<Self, WordPairError> {
        let (first, second) = (first.into(), second.into());
        if first.is_empty() || second.is_empty() {
            return Err(WordPairError::EmptyToken);
        }
        if first == second {
            return Err(WordPairError::SelfPair(first));
        }
        Ok(WordPair { first, second })
    }

    pub fn first(&self) -> &str {
        &self.first
    }

    pub fn second(&self) -> &str {
        &self.second
    }

    /// Same pair with tokens in lexicographic order.
    pub fn canonical(&self) -> WordPair {
        if self.first <= self.second {
            self.clone()
        } else {
            WordPair { first: self.second.clone(), second: self.first.clone() }
        }
    }

    pub fn reversed(&self) -> WordPair {
        WordPair { first: self.second.clone(), second: self.first.clone() }
    }
}

impl fmt::Display for WordPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// Ordered pairs (`m·(m−1)` per document) or canonical unordered pairs
/// (`m·(m−1)/2`, tokens sorted inside each pair).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PairMode {
    #[default]
    Ordered,
    Canonical,
}

/// Distinct tokens in first-occurrence order.
fn distinct<S: AsRef<str>>(tokens: &[S]) -> Vec<&str> {
    let mut seen: Vec<&str> = Vec::with_capacity(tokens.len());
    for t in tokens {
        let t = t.as_ref();
        if !t.is_empty() && !seen.contains(&t) {
            seen.push(t);
        }
    }
    seen
}

/// Calls `emit(first, second)` for every pair of distinct tokens.
pub fn for_each_pair<S: AsRef<str>>(tokens: &[S], mode: PairMode, mut emit: impl FnMut(&str, &str)) {
    let uniq = distinct(tokens);
    for (i, a) in uniq.iter().enumerate() {
        for (j, b) in uniq.iter().enumerate() {
            match mode {
                PairMode::Ordered if i != j => emit(a, b),
                PairMode::Canonical if i < j => {
                    if a <= b {
                        emit(a, b)
                    } else {
                        emit(b, a)
                    }
                }
                _ => {}
            }
        }
    }
}

/// All ordered pairs over the distinct tokens of one document.
pub fn extract_word_pairs<S: AsRef<str>>(tokens: &[S]) -> Vec<WordPair> {
    extract_word_pairs_with(tokens, PairMode::Ordered)
}

pub fn extract_word_pairs_with<S: AsRef<str>>(tokens: &[S], mode: PairMode) -> Vec<WordPair> {
    let mut out = Vec::new();
    for_each_pair(tokens, mode, |a, b| {
        out.push(WordPair { first: String::from(a), second: String::from(b) })
    });
    out
}
