//! Small text helpers shared by the scorers: scalar-aware truncation and
//! tokenization.

use std::collections::BTreeSet;

/// Words that never count as content tokens for lexical matching.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "by", "can", "for", "from", "has", "have", "i", "in",
    "into", "is", "it", "its", "me", "my", "need", "of", "on", "or", "our", "should", "so", "that",
    "the", "their", "them", "then", "this", "to", "up", "us", "we", "what", "when", "where",
    "which", "while", "who", "will", "with", "without", "you", "your",
];

/// Number of Unicode scalar values in `s`.
pub fn scalar_len(s: &str) -> usize {
    s.chars().count()
}

/// The longest prefix of `s` holding at most `max` scalar values.
pub fn truncate_scalars(s: &str, max: usize) -> &str {
    match s.char_indices().nth(max) {
        Some((idx, _)) => &s[..idx],
        None => s,
    }
}

/// Lowercased runs of alphanumeric characters, in order of appearance.
pub fn word_tokens(s: &str) -> impl Iterator<Item = String> + '_ {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Distinct lowercased alphanumeric tokens.
pub fn token_set(s: &str) -> BTreeSet<String> {
    word_tokens(s).collect()
}

/// Distinct content tokens: alphanumeric tokens minus stopwords and
/// single-character fragments.
pub fn content_token_set(s: &str) -> BTreeSet<String> {
    word_tokens(s)
        .filter(|t| t.chars().count() > 1 && !STOPWORDS.contains(&t.as_str()))
        .collect()
}

/// Case-sensitive name equality after trimming surrounding whitespace.
pub fn names_match(a: &str, b: &str) -> bool {
    a.trim() == b.trim()
}
