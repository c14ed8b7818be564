//! Line-oriented `key=value` logging on stderr.

use std::fmt::Write as _;

/// Formats one log line. Values containing spaces, quotes or `=` are
/// quoted with Rust string escaping.
pub fn format_line(fields: &[(&str, &dyn std::fmt::Display)]) -> String {
    let mut line = String::new();
    for (i, (k, v)) in fields.iter().enumerate() {
        if i > 0 {
            line.push(' ');
        }
        let v = v.to_string();
        if v.is_empty() || v.contains(|c: char| c.is_whitespace() || c == '"' || c == '=') {
            let _ = write!(line, "{k}={v:?}");
        } else {
            let _ = write!(line, "{k}={v}");
        }
    }
    line
}

pub fn emit(fields: &[(&str, &dyn std::fmt::Display)]) {
    eprintln!("{}", format_line(fields));
}
