//! Iterative suffix-stripping stemmer in the Paice/Husk style.
//!
//! Rules are grouped by the final letter of the word. The first applicable
//! rule for the current final letter fires; it removes `strip` letters,
//! appends `append` and either stops or continues with the shortened word.
//! A rule only applies when the remaining stem stays acceptable (see
//! [`acceptable`]). The table is deliberately lighter than the classic
//! Lancaster table: there is no bare `-e` removal, so roots such as `wake`
//! survive intact.

use alloc::string::String;

#[derive(Debug, Clone, Copy)]
struct Rule {
    suffix: &'static str,
    intact_only: bool,
    strip: usize,
    append: &'static str,
    continues: bool,
}

const fn r(suffix: &'static str, strip: usize, append: &'static str, continues: bool) -> Rule {
    Rule { suffix, intact_only: false, strip, append, continues }
}

const fn intact(suffix: &'static str, strip: usize) -> Rule {
    Rule { suffix, intact_only: true, strip, append: "", continues: false }
}

const GO: bool = true;
const STOP: bool = false;

static RULES: &[Rule] = &[
    intact("ia", 2),
    intact("a", 1),
    r("bb", 1, "", STOP),
    r("ytic", 3, "s", STOP),
    r("ic", 2, "", GO),
    r("nc", 1, "t", GO),
    r("dd", 1, "", STOP),
    r("ied", 3, "y", GO),
    r("ceed", 2, "ss", STOP),
    r("eed", 1, "", STOP),
    r("ed", 2, "", GO),
    r("hood", 4, "", GO),
    r("lief", 1, "v", STOP),
    r("if", 2, "", GO),
    r("ing", 3, "", GO),
    r("iag", 3, "y", STOP),
    r("ag", 2, "", GO),
    r("gg", 1, "", STOP),
    intact("th", 2),
    r("guish", 5, "ct", STOP),
    r("ish", 3, "", GO),
    intact("i", 1),
    r("i", 1, "y", GO),
    r("ij", 1, "d", STOP),
    r("fuj", 1, "s", STOP),
    r("uj", 1, "d", STOP),
    r("oj", 1, "d", STOP),
    r("hej", 1, "r", STOP),
    r("verj", 1, "t", STOP),
    r("misj", 2, "t", STOP),
    r("nj", 1, "d", STOP),
    r("j", 1, "s", STOP),
    r("ifiabl", 6, "", STOP),
    r("iabl", 4, "y", STOP),
    r("abl", 3, "", GO),
    r("ibl", 3, "", STOP),
    r("bil", 2, "l", GO),
    r("cl", 1, "", STOP),
    r("iful", 4, "y", STOP),
    r("ful", 3, "", GO),
    r("ul", 2, "", STOP),
    r("ial", 3, "", GO),
    r("ual", 3, "", GO),
    r("al", 2, "", GO),
    r("ll", 1, "", STOP),
    r("ium", 3, "", STOP),
    intact("um", 2),
    r("ism", 3, "", GO),
    r("mm", 1, "", STOP),
    r("sion", 4, "j", GO),
    r("xion", 4, "ct", STOP),
    r("ion", 3, "", GO),
    r("ian", 3, "", GO),
    r("an", 2, "", GO),
    r("een", 0, "", STOP),
    r("en", 2, "", GO),
    r("nn", 1, "", STOP),
    r("ship", 4, "", GO),
    r("pp", 1, "", STOP),
    r("er", 2, "", GO),
    r("ear", 0, "", STOP),
    r("ar", 2, "", STOP),
    r("or", 2, "", GO),
    r("ur", 2, "", GO),
    r("rr", 1, "", STOP),
    r("tr", 1, "", GO),
    r("ier", 3, "y", GO),
    r("ies", 3, "y", GO),
    r("sis", 2, "", STOP),
    r("is", 2, "", GO),
    r("ness", 4, "", GO),
    r("ss", 0, "", STOP),
    r("ous", 3, "", GO),
    intact("us", 2),
    Rule { suffix: "s", intact_only: true, strip: 1, append: "", continues: GO },
    r("s", 0, "", STOP),
    r("plicat", 4, "y", STOP),
    r("at", 2, "", GO),
    r("ment", 4, "", GO),
    r("ent", 3, "", GO),
    r("ant", 3, "", GO),
    r("ript", 2, "b", STOP),
    r("orpt", 2, "b", STOP),
    r("duct", 1, "", STOP),
    r("sumpt", 2, "", STOP),
    r("cept", 2, "iv", STOP),
    r("olut", 2, "v", STOP),
    r("sist", 0, "", STOP),
    r("ist", 3, "", GO),
    r("tt", 1, "", STOP),
    r("iqu", 3, "", STOP),
    r("ogu", 1, "", STOP),
    r("siv", 3, "j", GO),
    r("eiv", 0, "", STOP),
    r("iv", 2, "", GO),
    r("bly", 1, "", GO),
    r("ily", 3, "y", GO),
    r("ply", 0, "", STOP),
    r("ly", 2, "", GO),
    r("ogy", 1, "", STOP),
    r("phy", 1, "", STOP),
    r("omy", 1, "", STOP),
    r("opy", 1, "", STOP),
    r("ity", 3, "", GO),
    r("ety", 3, "", GO),
    r("lty", 2, "", STOP),
    r("istry", 5, "", STOP),
    r("ary", 3, "", GO),
    r("ory", 3, "", GO),
    r("ify", 3, "", STOP),
    r("ncy", 2, "t", GO),
    r("acy", 3, "", GO),
    r("iz", 2, "", GO),
    r("yz", 1, "s", STOP),
];

/// Words that look inflected but are roots in their own right.
static INVARIANT: &[&str] = &[
    "ally", "always", "atlas", "belly", "bias", "bully", "bus", "canvas", "chaos", "corps", "cosmos", "early",
    "family", "fly", "gas", "holy", "italy", "jelly", "july", "lens", "news", "only", "rally", "series", "silly",
    "species", "tally", "this", "thus", "ugly", "yes",
];

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// A stem starting with a vowel needs two letters; one starting with a
/// consonant needs three letters and a vowel (or `y`) after the first.
fn acceptable(stem: &[u8]) -> bool {
    match stem.first() {
        None => false,
        Some(&c) if is_vowel(c) => stem.len() >= 2,
        Some(_) => stem.len() >= 3 && stem[1..].iter().any(|&c| is_vowel(c) || c == b'y'),
    }
}

/// Stems one lowercase token. Tokens with non-ASCII letters or digits in
/// final position are returned unchanged.
pub fn stem(word: &str) -> String {
    if !word.is_ascii() || INVARIANT.contains(&word) {
        return String::from(word);
    }
    let mut current = String::from(word);
    let mut is_intact = true;
    'outer: loop {
        let Some(&last) = current.as_bytes().last() else { break };
        if !last.is_ascii_lowercase() {
            break;
        }
        for rule in RULES.iter().filter(|rule| rule.suffix.as_bytes().last() == Some(&last)) {
            if rule.intact_only && !is_intact {
                continue;
            }
            if !current.ends_with(rule.suffix) {
                continue;
            }
            let keep = current.len() - rule.strip;
            let mut candidate = String::with_capacity(keep + rule.append.len());
            candidate.push_str(&current[..keep]);
            candidate.push_str(rule.append);
            if !acceptable(candidate.as_bytes()) {
                continue;
            }
            if candidate == current {
                // protective rule: leave the word as it is
                break 'outer;
            }
            current = candidate;
            is_intact = false;
            if rule.continues {
                continue 'outer;
            }
            break 'outer;
        }
        break;
    }
    current
}
