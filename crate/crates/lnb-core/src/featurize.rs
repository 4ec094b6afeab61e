//! Unigram featurization with negation marking.
//!
//! A review becomes a bag of lowercase unigrams. Tokens that fall inside a
//! negation scope (between a trigger word and the next clause boundary) are
//! rewritten with the [`NEGATION_PREFIX`] so "not good" and "good" count as
//! different features. No stop-word removal, stemming, or feature selection
//! is applied.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary sentiment class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        }
    }

    pub fn parse(s: &str) -> Option<Polarity> {
        match s {
            "positive" => Some(Polarity::Positive),
            "negative" => Some(Polarity::Negative),
            _ => None,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Both classes, in the fixed order used throughout the crate.
pub const CLASSES: [Polarity; 2] = [Polarity::Positive, Polarity::Negative];

/// A raw review as read from a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawReview {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Polarity>,
    pub domain: String,
}

/// A featurized review: an ordered unigram bag with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub tokens: Vec<String>,
    pub label: Option<Polarity>,
    pub domain: String,
}

/// Prefix marking tokens inside a negation scope. Uppercase, so it can
/// never collide with a natural token (tokenize lowercases everything).
pub const NEGATION_PREFIX: &str = "NOT_";

/// Punctuation treated as clause boundaries. Emitted by [`tokenize`] as
/// single-character sentinel tokens, consumed by [`apply_negation`].
pub const SENTINELS: [char; 6] = ['.', ',', '!', '?', ';', ':'];

/// Base negation triggers. Any token ending in "n't" (don't, isn't, won't,
/// and the rest of the contracted family) is also a trigger.
pub const NEGATION_TRIGGERS: [&str; 4] = ["not", "no", "never", "cannot"];

fn is_sentinel_char(c: char) -> bool {
    SENTINELS.contains(&c)
}

fn is_sentinel_token(token: &str) -> bool {
    let mut chars = token.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if is_sentinel_char(c))
}

fn is_trigger(token: &str) -> bool {
    NEGATION_TRIGGERS.contains(&token) || token.ends_with("n't")
}

/// Splits text into lowercase word tokens and punctuation sentinels.
///
/// A word is a run of alphabetic characters, possibly containing
/// apostrophes with letters on both sides ("don't", "rock'n'roll"). The six
/// [`SENTINELS`] become their own tokens; every other character separates
/// words. Empty output is legal.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_alphabetic() {
            word.extend(c.to_lowercase());
        } else if c == '\'' && !word.is_empty() && chars.peek().is_some_and(|n| n.is_alphabetic()) {
            word.push('\'');
        } else {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            if is_sentinel_char(c) {
                tokens.push(c.to_string());
            }
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

/// Rewrites tokens inside negation scopes and strips the sentinels.
///
/// A scope opens after a trigger token and closes at the next sentinel or
/// at end of input. In-scope tokens get the [`NEGATION_PREFIX`]; triggers
/// themselves stay unprefixed, and a trigger inside an open scope keeps the
/// scope open.
pub fn apply_negation(tokens: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut negating = false;
    for token in tokens {
        if is_sentinel_token(&token) {
            negating = false;
        } else if is_trigger(&token) {
            out.push(token);
            negating = true;
        } else if negating {
            out.push(format!("{NEGATION_PREFIX}{token}"));
        } else {
            out.push(token);
        }
    }
    out
}

/// Converts a raw review into a [`Document`].
///
/// Errors with [`Error::EmptyDocument`] when no feature tokens remain, so
/// callers can decide whether a featureless review is skippable or fatal.
pub fn featurize(review: &RawReview) -> Result<Document> {
    let tokens = apply_negation(tokenize(&review.text));
    if tokens.is_empty() {
        return Err(Error::EmptyDocument);
    }
    Ok(Document {
        tokens,
        label: review.label,
        domain: review.domain.clone(),
    })
}
