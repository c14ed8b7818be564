//! Text cleaning, token normalization and word-pair extraction.

mod clean;
mod pairs;
pub mod stem;

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub use clean::{contains_url, CleanConfig, HashtagMode, Preprocessor};
pub use pairs::{extract_word_pairs, for_each_pair, PairMode, WordPair, WordPairError};

/// Stopwords shipped with the crate.
pub const DEFAULT_STOPLIST: &str = include_str!("../../data/stopwords_en.txt");
/// Irregular-form table shipped with the crate.
pub const DEFAULT_LEXICON: &str = include_str!("../../data/irregular_en.txt");

/// Set of lowercase tokens removed during cleaning.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist {
    words: BTreeSet<String>,
}

impl Stoplist {
    /// One token per line; blank lines and `#` comments are skipped.
    /// Entries are lowercased.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Stoplist { words }
    }

    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPLIST)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// A malformed lexicon line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconError {
    pub line: usize,
    pub content: String,
}

impl core::fmt::Display for LexiconError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "lexicon line {}: expected `<form> <lemma>`, got {:?}", self.line, self.content)
    }
}

impl core::error::Error for LexiconError {}

/// Irregular-form table mapping an inflected form to its dictionary root
/// (`bought` -> `buy`).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    forms: BTreeMap<String, String>,
}

impl Lexicon {
    /// Each non-comment line holds `<form> <lemma>` separated by whitespace.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut forms = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            match (fields.next(), fields.next(), fields.next()) {
                (Some(form), Some(lemma), None) => {
                    forms.insert(form.to_lowercase(), lemma.to_lowercase());
                }
                _ => return Err(LexiconError { line: idx + 1, content: line.to_string() }),
            }
        }
        Ok(Lexicon { forms })
    }

    pub fn english() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon is well formed")
    }

    pub fn lookup(&self, token: &str) -> Option<&str> {
        self.forms.get(token).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

/// Lemmatizes through the lexicon, then stems, until a fixed point.
///
/// The map `lexicon-then-stem` is iterated on the token; when it settles on
/// a cycle instead of a fixed point the lexicographically smallest member
/// of the cycle is returned. Either way the result is a token whose own
/// normalization is itself.
pub fn normalize_token(token: &str, lexicon: &Lexicon) -> String {
    let step = |t: &str| -> String { stem::stem(lexicon.lookup(t).unwrap_or(t)) };
    let mut seen: Vec<String> = Vec::new();
    let mut current = step(token);
    loop {
        let next = step(&current);
        if next == current {
            return current;
        }
        if let Some(pos) = seen.iter().position(|s| *s == next) {
            let cycle_min = seen[pos..].iter().chain(core::iter::once(&current)).min().cloned();
            return cycle_min.unwrap_or(current);
        }
        seen.push(core::mem::replace(&mut current, next));
        if seen.len() > 64 {
            return current;
        }
    }
}
