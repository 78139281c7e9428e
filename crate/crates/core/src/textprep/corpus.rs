use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{preprocess, PrepOptions};
use crate::capability::is_text_column;
use crate::ingest::Dataset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{0}` is not a free-text column")]
    NonTextColumn(String),
}

/// Documents as vocabulary ids, vocabulary in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedCorpus {
    pub docs: Vec<Vec<usize>>,
    pub vocabulary: Vec<String>,
    /// Source row index of each document.
    pub doc_ids: Vec<usize>,
    /// Corpus count of each vocabulary entry.
    pub term_frequencies: Vec<u64>,
}

impl TokenizedCorpus {
    /// Builds a corpus from already-tokenized documents; doc ids are positions.
    pub fn from_token_docs<S: AsRef<str>>(docs: &[Vec<S>]) -> Self {
        let mut corpus = Self::default();
        let mut index: HashMap<String, usize> = HashMap::new();
        for (row, doc) in docs.iter().enumerate() {
            corpus.push_doc(row, doc.iter().map(|t| t.as_ref()), &mut index);
        }
        corpus
    }

    fn push_doc<'a>(
        &mut self,
        row: usize,
        tokens: impl Iterator<Item = &'a str>,
        index: &mut HashMap<String, usize>,
    ) {
        let ids = tokens
            .map(|t| {
                let id = *index.entry(t.to_string()).or_insert_with(|| {
                    self.vocabulary.push(t.to_string());
                    self.term_frequencies.push(0);
                    self.vocabulary.len() - 1
                });
                self.term_frequencies[id] += 1;
                id
            })
            .collect();
        self.docs.push(ids);
        self.doc_ids.push(row);
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn total_tokens(&self) -> u64 {
        self.term_frequencies.iter().sum()
    }

    pub fn doc_tokens(&self, doc: usize) -> Vec<&str> {
        self.docs[doc]
            .iter()
            .map(|&id| self.vocabulary[id].as_str())
            .collect()
    }

    /// Normalized corpus term probabilities.
    pub fn term_probabilities(&self) -> Vec<f64> {
        let total = self.total_tokens() as f64;
        self.term_frequencies
            .iter()
            .map(|&c| if total > 0.0 { c as f64 / total } else { 0.0 })
            .collect()
    }
}

/// Runs the preprocessing pipeline over one column of a dataset.
pub fn build_corpus(
    ds: &Dataset,
    column: &str,
    opts: &PrepOptions,
) -> Result<TokenizedCorpus, CorpusError> {
    let info = ds
        .column(column)
        .ok_or_else(|| CorpusError::UnknownColumn(column.to_string()))?;
    if !is_text_column(info) {
        return Err(CorpusError::NonTextColumn(column.to_string()));
    }
    let opts = opts.clone().normalized();
    let mut corpus = TokenizedCorpus::default();
    let mut index = HashMap::new();
    for (row, cell) in ds.cells(column).enumerate() {
        let tokens = cell.map(|text| preprocess(&text, &opts)).unwrap_or_default();
        corpus.push_doc(row, tokens.iter().map(String::as_str), &mut index);
    }
    Ok(corpus)
}
