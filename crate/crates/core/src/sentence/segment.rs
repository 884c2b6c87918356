use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};

const BUILTIN_ABBREVIATIONS: &str = include_str!("../../data/abbreviations.txt");

/// Characters that end a sentence. A run of them is kept together with the
/// sentence it closes, so "Infiltrate??" stays one sentence.
fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '?' | ';' | '!')
}

/// Abbreviations whose period is not a sentence boundary.
///
/// The config file is plain text, one abbreviation per line, `#` starts a
/// comment. Entries are matched case-insensitively and a trailing period in
/// the file is ignored, so `e.g` and `e.g.` are the same entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitterConfig {
    abbreviations: HashSet<String>,
}

impl SplitterConfig {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_ABBREVIATIONS)
    }

    pub fn parse(text: &str) -> Self {
        let abbreviations = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .map(|l| l.trim_matches('.').to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        SplitterConfig { abbreviations }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn is_abbreviation(&self, token: &str) -> bool {
        self.abbreviations.contains(&token.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.abbreviations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abbreviations.is_empty()
    }
}

/// One sentence of a report, borrowed from the report text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sentence<'a> {
    pub raw_text: &'a str,
    /// Byte offset of `raw_text` in the report.
    pub start: usize,
    /// 0-based position within the report.
    pub index_in_report: usize,
}

/// Split a report into sentences.
///
/// Boundaries are `.`, `?`, `!`, `;` and newlines. A period is not a
/// boundary when it is directly followed by a digit (decimals such as
/// `5.5` or `.5`) or when it closes a configured abbreviation. Every
/// non-whitespace character of the input lands in exactly one sentence.
pub fn segment<'a>(text: &'a str, config: &SplitterConfig) -> Vec<Sentence<'a>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start: Option<usize> = None;

    let push = |out: &mut Vec<Sentence<'a>>, from: usize, to: usize| {
        let raw = text[from..to].trim_end();
        if !raw.is_empty() {
            let index_in_report = out.len();
            out.push(Sentence {
                raw_text: raw,
                start: from,
                index_in_report,
            });
        }
    };

    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c == '\n' {
            if let Some(s) = start.take() {
                push(&mut out, s, pos);
            }
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if start.is_none() {
            start = Some(pos);
        }
        if is_terminal(c) && !(c == '.' && is_protected_period(text, &chars, i, config)) {
            let mut j = i + 1;
            while j < chars.len()
                && is_terminal(chars[j].1)
                && !(chars[j].1 == '.' && chars.get(j + 1).is_some_and(|&(_, c)| c.is_ascii_digit()))
            {
                j += 1;
            }
            let end = chars.get(j).map_or(text.len(), |&(p, _)| p);
            if let Some(s) = start.take() {
                push(&mut out, s, end);
            }
            i = j;
            continue;
        }
        i += 1;
    }
    if let Some(s) = start {
        push(&mut out, s, text.len());
    }
    out
}

fn is_protected_period(text: &str, chars: &[(usize, char)], i: usize, config: &SplitterConfig) -> bool {
    if chars.get(i + 1).is_some_and(|&(_, c)| c.is_ascii_digit()) {
        return true;
    }
    if config.is_empty() {
        return false;
    }
    // The token around the period: alphanumerics and dots backwards,
    // letters and dots forwards (so "e.g." is seen whole from either dot).
    let mut lo = i;
    while lo > 0 && (chars[lo - 1].1.is_alphanumeric() || chars[lo - 1].1 == '.') {
        lo -= 1;
    }
    let mut hi = i + 1;
    while hi < chars.len() && (chars[hi].1.is_alphabetic() || chars[hi].1 == '.') {
        hi += 1;
    }
    let from = chars[lo].0;
    let to = chars.get(hi).map_or(text.len(), |&(p, _)| p);
    let token = text[from..to].trim_matches('.');
    !token.is_empty() && config.is_abbreviation(token)
}
