use alloc::string::String;
use alloc::vec::Vec;

use super::{normalize_token, Lexicon, Stoplist};

/// How `#hashtag` tokens are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HashtagMode {
    /// Drop the whole token.
    Token,
    /// Drop only the `#` glyph and keep the word.
    Glyph,
    /// Leave hashtags alone (the `#` is then handled as punctuation).
    Keep,
}

/// Which cleaning filters are active. Everything is on by default.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CleanConfig {
    /// Reject whole documents that contain a URL. When off, URL tokens are
    /// still dropped from the token stream.
    pub reject_urls: bool,
    pub hashtags: HashtagMode,
    pub strip_non_latin: bool,
    pub strip_punctuation: bool,
    pub strip_markup: bool,
    /// Lexicon lookup plus stemming. Switched off for languages the bundled
    /// tables do not cover.
    pub normalize: bool,
}

impl Default for CleanConfig {
    fn default() -> Self {
        CleanConfig {
            reject_urls: true,
            hashtags: HashtagMode::Token,
            strip_non_latin: true,
            strip_punctuation: true,
            strip_markup: true,
            normalize: true,
        }
    }
}

fn is_url(token: &str) -> bool {
    let lower = token.trim_start_matches(|c: char| !c.is_alphanumeric());
    let starts = |p: &str| lower.get(..p.len()).is_some_and(|head| head.eq_ignore_ascii_case(p));
    starts("http://") || starts("https://") || starts("www.") || token.contains("://")
}

/// True when any whitespace-separated token of `text` looks like a URL.
pub fn contains_url(text: &str) -> bool {
    text.split_whitespace().any(is_url)
}

fn is_latin(c: char) -> bool {
    c.is_ascii_alphabetic()
        || matches!(c as u32, 0x00C0..=0x024F | 0x1E00..=0x1EFF) && c != '×' && c != '÷'
}

/// Removes `<...>` tags and `&name;` / `&#123;` entities.
fn strip_markup(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '<' => {
                if let Some(end) = text[i..].find('>') {
                    let inner = &text[i + 1..i + end];
                    let looks_like_tag = inner
                        .chars()
                        .next()
                        .is_some_and(|f| f.is_ascii_alphabetic() || f == '/' || f == '!');
                    if looks_like_tag {
                        out.push(' ');
                        while chars.peek().is_some_and(|&(j, _)| j <= i + end) {
                            chars.next();
                        }
                        continue;
                    }
                }
                out.push(c);
            }
            '&' => {
                let rest = &text[i + 1..];
                let entity_len = rest
                    .find(';')
                    .filter(|&n| n > 0 && n <= 10)
                    .filter(|&n| rest[..n].chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '#'));
                match entity_len {
                    Some(n) => {
                        out.push(' ');
                        while chars.peek().is_some_and(|&(j, _)| j <= i + 1 + n) {
                            chars.next();
                        }
                    }
                    None => out.push(c),
                }
            }
            _ => out.push(c),
        }
    }
    out
}

/// Cleans raw document text into normalized tokens.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub stoplist: Stoplist,
    pub lexicon: Lexicon,
    pub config: CleanConfig,
}

impl Default for Preprocessor {
    fn default() -> Self {
        Preprocessor {
            stoplist: Stoplist::english(),
            lexicon: Lexicon::english(),
            config: CleanConfig::default(),
        }
    }
}

impl Preprocessor {
    pub fn new(stoplist: Stoplist, lexicon: Lexicon, config: CleanConfig) -> Self {
        Preprocessor { stoplist, lexicon, config }
    }

    /// Whether the document is dropped before tokenization.
    pub fn rejects(&self, text: &str) -> bool {
        self.config.reject_urls && contains_url(text)
    }

    /// Ordered token list of `text`. Never fails; a rejected document or one
    /// where nothing survives yields an empty list.
    pub fn clean(&self, text: &str) -> Vec<String> {
        if self.rejects(text) {
            return Vec::new();
        }
        let cfg = &self.config;
        let owned;
        let text = if cfg.strip_markup {
            owned = strip_markup(text);
            owned.as_str()
        } else {
            text
        };

        let mut out = Vec::new();
        for raw in text.split_whitespace() {
            if is_url(raw) {
                continue;
            }
            let raw = match (raw.strip_prefix('#'), cfg.hashtags) {
                (Some(_), HashtagMode::Token) => continue,
                (Some(word), HashtagMode::Glyph) => word,
                _ => raw,
            };
            let lowered = raw.to_lowercase();
            if cfg.strip_punctuation {
                let joined: String = lowered.chars().filter(|&c| c != '\'' && c != '’').collect();
                for piece in joined.split(|c: char| !c.is_alphanumeric()) {
                    self.push_token(piece, &mut out);
                }
            } else {
                self.push_token(&lowered, &mut out);
            }
        }
        out
    }

    fn push_token(&self, piece: &str, out: &mut Vec<String>) {
        let token: String = if self.config.strip_non_latin {
            piece
                .chars()
                .filter(|&c| !(c.is_alphabetic() && !is_latin(c)))
                .filter(|&c| !c.is_numeric() || c.is_ascii_digit())
                .collect()
        } else {
            String::from(piece)
        };
        if token.is_empty() || token.chars().any(char::is_whitespace) || self.stoplist.contains(&token) {
            return;
        }
        let token = if self.config.normalize {
            normalize_token(&token, &self.lexicon)
        } else {
            token
        };
        if !token.is_empty() && !self.stoplist.contains(&token) {
            out.push(token);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    const EXAMPLE: &str =
        "Protesters may be unmasked in wake of Coburg clash https://t.co/djjVIfzO3e (News) #melbourne #victoria";

    #[test]
    fn example_tweet() {
        let mut pre = Preprocessor::default();
        pre.config.reject_urls = false;
        assert_eq!(pre.clean(EXAMPLE), vec!["protest", "unmask", "wake", "coburg", "clash", "news"]);
    }

    #[test]
    fn url_rejection_drops_document() {
        let pre = Preprocessor::default();
        assert!(pre.rejects(EXAMPLE));
        assert!(pre.clean(EXAMPLE).is_empty());
    }

    #[test]
    fn empty_and_stopword_only() {
        let pre = Preprocessor::default();
        assert!(pre.clean("").is_empty());
        assert!(pre.clean("The THE the").is_empty());
    }

    #[test]
    fn hashtag_glyph_mode_keeps_word() {
        let mut pre = Preprocessor::default();
        pre.config.hashtags = HashtagMode::Glyph;
        assert_eq!(pre.clean("#coburg rally"), vec!["coburg", "rally"]);
    }

    #[test]
    fn markup_and_entities_removed() {
        let pre = Preprocessor::default();
        assert_eq!(pre.clean("<b>strike</b> &amp; rally"), vec!["strike", "rally"]);
        assert_eq!(pre.clean("3 < 4 strike"), vec!["3", "4", "strike"]);
    }

    #[test]
    fn non_latin_removed() {
        let pre = Preprocessor::default();
        assert_eq!(pre.clean("مرحبا strike 東京"), vec!["strike"]);
        let mut keep = Preprocessor::default();
        keep.config.strip_non_latin = false;
        keep.config.normalize = false;
        assert_eq!(keep.clean("strike 東京"), vec!["strike", "東京"]);
    }

    #[test]
    fn normalization_can_be_disabled() {
        let mut pre = Preprocessor::new(Stoplist::empty(), Lexicon::english(), CleanConfig::default());
        pre.config.normalize = false;
        assert_eq!(pre.clean("demonstrasi mahasiswa"), vec!["demonstrasi", "mahasiswa"]);
    }

    #[test]
    fn apostrophes_join() {
        let pre = Preprocessor::default();
        assert_eq!(pre.clean("Don't stop"), vec!["stop"]);
    }

    proptest! {
        #[test]
        fn output_tokens_are_clean(text in "\\PC{0,80}") {
            let pre = Preprocessor::default();
            for tok in pre.clean(&text) {
                prop_assert!(!tok.is_empty());
                prop_assert!(!pre.stoplist.contains(&tok));
                prop_assert!(tok.chars().all(char::is_alphanumeric), "{:?}", tok);
                prop_assert_eq!(tok.to_lowercase(), tok.clone());
            }
        }
    }
}
