//! Token normalization shared by every matching stage.
//!
//! Input is lowercased first; a token is then a maximal run of alphanumeric
//! characters. A hyphen survives only when it sits between two alphanumeric
//! characters, so `"RF-Engineer"` stays one token (`rf-engineer`) while
//! `"a--b"` or a trailing `"-"` act as separators.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Lowercase `s` and split it into tokens.
pub fn normalize_text(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().flat_map(char::to_lowercase).collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.push(c);
        } else if c == '-'
            && i > 0
            && chars[i - 1].is_alphanumeric()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
        {
            current.push('-');
        } else if !current.is_empty() {
            tokens.push(core::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Split intra-word hyphens so `rf-engineer` reads as `rf`, `engineer`.
///
/// Matching and industry filtering run on this view, which makes
/// `"RF-Engineer"` and `"RF Engineer"` equivalent.
pub fn bridge_hyphens<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    for t in tokens {
        out.extend(t.as_ref().split('-').filter(|p| !p.is_empty()).map(String::from));
    }
    out
}

/// A normalized token sequence such as a job-specific term or employer name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Phrase(Vec<String>);

impl Phrase {
    pub fn parse(s: &str) -> Self {
        Phrase(normalize_text(s))
    }

    /// Wrap tokens that are already normalized.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        Phrase(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bridged(&self) -> Vec<String> {
        bridge_hyphens(&self.0)
    }

    /// Title-case rendering, e.g. `Design Engineer`.
    pub fn title_case(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let mut chars = t.chars();
            if let Some(first) = chars.next() {
                out.extend(first.to_uppercase());
                out.push_str(chars.as_str());
            }
        }
        out
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(t)?;
        }
        Ok(())
    }
}

/// True when `needle` occurs as a contiguous run inside `haystack`.
pub fn contains_run<S: AsRef<str>, T: AsRef<str>>(haystack: &[S], needle: &[T]) -> bool {
    if needle.is_empty() || needle.len() > haystack.len() {
        return false;
    }
    haystack
        .windows(needle.len())
        .any(|w| w.iter().zip(needle).all(|(a, b)| a.as_ref() == b.as_ref()))
}
