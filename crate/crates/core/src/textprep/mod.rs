//! Text cleaning, tokenization, stopword removal and word normalization
//! shared by every analysis.

mod corpus;
pub mod lemma;
pub mod stem;

use std::collections::{BTreeSet, HashSet};
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

pub use corpus::{build_corpus, CorpusError, TokenizedCorpus};
pub use lemma::{lemmatize_token, Lemmatizer};
pub use stem::stem_token;

const STOPWORDS_EN: &str = include_str!("../../data/stopwords_en.txt");

static STOPWORDS: LazyLock<HashSet<String>> = LazyLock::new(|| parse_word_list(STOPWORDS_EN));

fn parse_word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(|l| l.trim().to_lowercase())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// The bundled English stopword list.
pub fn bundled_stopwords() -> &'static HashSet<String> {
    &STOPWORDS
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    None,
    #[default]
    Lemmatize,
    Stem,
}

impl Normalization {
    pub fn apply(self, token: &str) -> String {
        match self {
            Self::None => token.to_string(),
            Self::Lemmatize => lemmatize_token(&token.to_lowercase()),
            Self::Stem => stem_token(&token.to_lowercase()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepOptions {
    pub lowercase: bool,
    pub remove_punctuation: bool,
    pub remove_copyright: bool,
    pub extra_stopwords: BTreeSet<String>,
    pub normalization: Normalization,
}

impl Default for PrepOptions {
    fn default() -> Self {
        Self {
            lowercase: true,
            remove_punctuation: true,
            remove_copyright: false,
            extra_stopwords: BTreeSet::new(),
            normalization: Normalization::Lemmatize,
        }
    }
}

impl PrepOptions {
    /// Lowercases user stopwords and drops blank entries.
    pub fn normalized(mut self) -> Self {
        self.extra_stopwords = self
            .extra_stopwords
            .iter()
            .map(|w| w.trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        self
    }
}

fn is_copyright_sentence(sentence: &str) -> bool {
    if sentence.contains('©') {
        return true;
    }
    let lower = sentence.to_lowercase();
    if lower
        .split(|c: char| !c.is_alphanumeric())
        .any(|w| w == "copyright")
        || lower.contains("all rights reserved")
    {
        return true;
    }
    // "(c)" followed by a year
    lower.match_indices("(c)").any(|(i, _)| {
        let rest = lower[i + 3..].trim_start();
        rest.len() >= 4 && rest.as_bytes()[..4].iter().all(u8::is_ascii_digit)
    })
}

/// Splits after `.`, `!` or `?` when followed by whitespace or end of text.
fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let boundary = chars.peek().is_none_or(|(_, n)| n.is_whitespace());
            if boundary {
                let end = i + c.len_utf8();
                out.push(&text[start..end]);
                start = end;
            }
        }
    }
    if start < text.len() {
        out.push(&text[start..]);
    }
    out
}

pub fn clean_text(text: &str, opts: &PrepOptions) -> String {
    let mut s = if opts.remove_copyright {
        sentences(text)
            .into_iter()
            .filter(|s| !is_copyright_sentence(s))
            .collect::<String>()
    } else {
        text.to_string()
    };
    if opts.remove_punctuation {
        s = s
            .chars()
            .map(|c| {
                if c.is_alphanumeric() || c.is_whitespace() {
                    c
                } else {
                    ' '
                }
            })
            .collect();
    }
    if opts.lowercase {
        s = s.to_lowercase();
    }
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Maximal runs of alphanumerics, keeping hyphens and apostrophes that sit
/// between two alphanumerics.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut current = String::new();
        for (i, &c) in chars.iter().enumerate() {
            if c.is_alphanumeric() {
                current.push(c);
            } else if is_joiner(c)
                && !current.is_empty()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())
            {
                current.push(c);
            } else if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}

pub fn remove_stopwords(tokens: Vec<String>, extra_stopwords: &BTreeSet<String>) -> Vec<String> {
    tokens
        .into_iter()
        .filter(|t| {
            let lower = t.to_lowercase();
            !STOPWORDS.contains(&lower) && !extra_stopwords.contains(&lower)
        })
        .collect()
}

/// The full per-document pipeline: clean, tokenize, drop stopwords, normalize.
pub fn preprocess(text: &str, opts: &PrepOptions) -> Vec<String> {
    let cleaned = clean_text(text, opts);
    remove_stopwords(tokenize(&cleaned), &opts.extra_stopwords)
        .into_iter()
        .map(|t| opts.normalization.apply(&t))
        .collect()
}
