//! Dictionary lemmatizer in the style of WordNet's morphy, without POS tags.
//!
//! A known noun or verb base form is its own lemma. Otherwise the noun,
//! then verb, exception tables apply, then the suffix rules (noun rules
//! first), where a rule's output must be a base form of that part of speech.

use std::collections::{HashMap, HashSet};
use std::sync::LazyLock;

const NOUN_BASEFORMS: &str = include_str!("../../data/baseforms_noun.txt");
const VERB_BASEFORMS: &str = include_str!("../../data/baseforms_verb.txt");
const NOUN_EXCEPTIONS: &str = include_str!("../../data/lemma_exceptions_noun.txt");
const VERB_EXCEPTIONS: &str = include_str!("../../data/lemma_exceptions_verb.txt");

/// (suffix, replacement) in trial order.
const NOUN_RULES: &[(&str, &str)] = &[
    ("ses", "s"),
    ("ies", "y"),
    ("es", "e"),
    ("es", ""),
    ("s", ""),
];

const VERB_RULES: &[(&str, &str)] = &[
    ("ing", ""),
    ("ing", "e"),
    ("ed", ""),
    ("ed", "e"),
    ("ies", "y"),
    ("es", "e"),
    ("s", ""),
];

#[derive(Debug, Clone, Default)]
pub struct Lemmatizer {
    nouns: HashSet<String>,
    verbs: HashSet<String>,
    noun_exceptions: HashMap<String, String>,
    verb_exceptions: HashMap<String, String>,
}

static BUNDLED: LazyLock<Lemmatizer> = LazyLock::new(|| {
    Lemmatizer::from_data(NOUN_BASEFORMS, VERB_BASEFORMS, NOUN_EXCEPTIONS, VERB_EXCEPTIONS)
});

fn word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

fn exception_table(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|line| {
            let mut parts = line.split_whitespace();
            Some((parts.next()?.to_string(), parts.next()?.to_string()))
        })
        .collect()
}

impl Lemmatizer {
    /// The lexicon compiled into the library (derived from WordNet 3.0).
    pub fn bundled() -> &'static Lemmatizer {
        &BUNDLED
    }

    /// Builds a lemmatizer from one-entry-per-line data. Exception lines are
    /// `inflected base`.
    pub fn from_data(nouns: &str, verbs: &str, noun_exceptions: &str, verb_exceptions: &str) -> Self {
        Self {
            nouns: word_list(nouns),
            verbs: word_list(verbs),
            noun_exceptions: exception_table(noun_exceptions),
            verb_exceptions: exception_table(verb_exceptions),
        }
    }

    pub fn is_baseform(&self, word: &str) -> bool {
        self.nouns.contains(word) || self.verbs.contains(word)
    }

    /// Every noun and verb base form, each once.
    pub fn baseforms(&self) -> impl Iterator<Item = &str> {
        self.nouns
            .iter()
            .chain(self.verbs.iter().filter(|v| !self.nouns.contains(*v)))
            .map(String::as_str)
    }

    pub fn noun_exceptions(&self) -> impl Iterator<Item = (&str, &str)> {
        self.noun_exceptions
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn verb_exceptions(&self) -> impl Iterator<Item = (&str, &str)> {
        self.verb_exceptions
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn apply_rules(token: &str, rules: &[(&str, &str)], bases: &HashSet<String>) -> Option<String> {
        rules.iter().find_map(|(suffix, replacement)| {
            let stem = token.strip_suffix(suffix)?;
            if stem.is_empty() {
                return None;
            }
            let candidate = format!("{stem}{replacement}");
            bases.contains(&candidate).then_some(candidate)
        })
    }

    pub fn lemmatize(&self, token: &str) -> String {
        if token.is_empty() || self.is_baseform(token) {
            return token.to_string();
        }
        if let Some(base) = self
            .noun_exceptions
            .get(token)
            .or_else(|| self.verb_exceptions.get(token))
        {
            return base.clone();
        }
        Self::apply_rules(token, NOUN_RULES, &self.nouns)
            .or_else(|| Self::apply_rules(token, VERB_RULES, &self.verbs))
            .unwrap_or_else(|| token.to_string())
    }
}

/// Lemmatizes one lowercase token with the bundled lexicon.
pub fn lemmatize_token(token: &str) -> String {
    Lemmatizer::bundled().lemmatize(token)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(lemmatize_token("apples"), "apple");
        assert_eq!(lemmatize_token("geese"), "goose");
        assert_eq!(lemmatize_token("apple"), "apple");
        assert_eq!(lemmatize_token("models"), "model");
        assert_eq!(lemmatize_token("modeling"), "modeling");
        assert_eq!(lemmatize_token("studies"), "study");
        assert_eq!(lemmatize_token("boxes"), "box");
        assert_eq!(lemmatize_token("analyses"), "analysis");
        assert_eq!(lemmatize_token("xyzzyqs"), "xyzzyqs");
        assert_eq!(lemmatize_token(""), "");
    }

    #[test]
    fn custom_lexicon() {
        let lem = Lemmatizer::from_data("bus\n", "walk\ngo\n", "", "went go\n");
        assert_eq!(lem.lemmatize("walked"), "walk");
        assert_eq!(lem.lemmatize("buses"), "bus");
        assert_eq!(lem.lemmatize("went"), "go");
    }
}
