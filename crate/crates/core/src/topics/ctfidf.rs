//! Class-based TF-IDF: each class is the concatenation of its documents.
//! W(t, c) = tf(t, c) · ln(1 + A / f(t)), A = average token count per class.

use serde::{Deserialize, Serialize};

use super::{sort_ranked, TermWeight, TopicError};
use crate::textprep::TokenizedCorpus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtfidfResult {
    /// Distinct labels in ascending order; row `i` of `weights` belongs to `classes[i]`.
    pub classes: Vec<usize>,
    pub vocabulary: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    /// Per class, every term with non-zero weight, highest first.
    pub ranked: Vec<Vec<TermWeight>>,
    pub avg_tokens_per_class: f64,
}

pub fn ctfidf(corpus: &TokenizedCorpus, labels: &[usize]) -> Result<CtfidfResult, TopicError> {
    if labels.len() != corpus.num_docs() {
        return Err(TopicError::LabelLengthMismatch {
            labels: labels.len(),
            docs: corpus.num_docs(),
        });
    }
    let mut classes = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let v = corpus.vocab_size();

    let mut tf = vec![vec![0u64; v]; classes.len()];
    for (doc, label) in corpus.docs.iter().zip(labels) {
        let row = classes.binary_search(label).expect("label collected above");
        for &w in doc {
            tf[row][w] += 1;
        }
    }
    let mut f = vec![0u64; v];
    for row in &tf {
        for (ft, &n) in f.iter_mut().zip(row) {
            *ft += n;
        }
    }
    let total: u64 = f.iter().sum();
    let avg = if classes.is_empty() {
        0.0
    } else {
        total as f64 / classes.len() as f64
    };

    let weights: Vec<Vec<f64>> = tf
        .iter()
        .map(|row| {
            row.iter()
                .zip(&f)
                .map(|(&n, &ft)| {
                    if n == 0 {
                        0.0
                    } else {
                        n as f64 * (avg / ft as f64).ln_1p()
                    }
                })
                .collect()
        })
        .collect();

    let ranked = weights
        .iter()
        .zip(&tf)
        .map(|(row, counts)| {
            let mut r: Vec<(usize, f64)> = row
                .iter()
                .copied()
                .enumerate()
                .filter(|&(w, _)| counts[w] > 0)
                .collect();
            sort_ranked(&mut r, &corpus.vocabulary);
            r.into_iter()
                .map(|(w, weight)| TermWeight {
                    term: corpus.vocabulary[w].clone(),
                    weight,
                })
                .collect()
        })
        .collect();

    Ok(CtfidfResult {
        classes,
        vocabulary: corpus.vocabulary.clone(),
        weights,
        ranked,
        avg_tokens_per_class: avg,
    })
}
