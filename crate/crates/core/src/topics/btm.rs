//! Biterm topic model for short texts.
//!
//! Every unordered token pair in a document is a biterm; one topic is drawn
//! per biterm from a corpus-wide topic mixture. Document-topic proportions
//! are recovered afterwards by averaging P(k | b) over a document's biterms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lda::{empty_docs, renormalize};
use super::{sample_index, TopicError, TopicModelParams, TopicModelResult};
use crate::textprep::TokenizedCorpus;

/// Unordered word pair with `w1 <= w2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Biterm {
    pub w1: usize,
    pub w2: usize,
}

impl Biterm {
    pub fn new(a: usize, b: usize) -> Self {
        Self {
            w1: a.min(b),
            w2: a.max(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocBiterm {
    pub doc: usize,
    pub biterm: Biterm,
}

/// All position pairs within each document (the window is the whole document).
pub fn btm_extract_biterms(corpus: &TokenizedCorpus) -> Vec<DocBiterm> {
    let mut out = Vec::new();
    for (doc, tokens) in corpus.docs.iter().enumerate() {
        for i in 0..tokens.len() {
            for j in i + 1..tokens.len() {
                out.push(DocBiterm {
                    doc,
                    biterm: Biterm::new(tokens[i], tokens[j]),
                });
            }
        }
    }
    out
}

pub fn btm_fit(
    corpus: &TokenizedCorpus,
    biterms: &[DocBiterm],
    params: &TopicModelParams,
) -> Result<TopicModelResult, TopicError> {
    params.validate_for_fit()?;
    if biterms.is_empty() {
        return Err(TopicError::NoBiterms);
    }
    let (k, v) = (params.k, corpus.vocab_size());
    let (alpha, beta) = (params.alpha, params.beta);
    let v_beta = v as f64 * beta;
    let mut rng = params.rng();

    let mut topic_biterms = vec![0u32; k];
    let mut word_topic = vec![0u32; k * v];
    let mut z: Vec<usize> = biterms
        .iter()
        .map(|b| {
            let t = rng.random_range(0..k);
            topic_biterms[t] += 1;
            word_topic[t * v + b.biterm.w1] += 1;
            word_topic[t * v + b.biterm.w2] += 1;
            t
        })
        .collect();

    let mut weights = vec![0.0; k];
    let mut log_likelihood = Vec::with_capacity(params.iterations);
    for _ in 0..params.iterations {
        for (i, b) in biterms.iter().enumerate() {
            let (w1, w2) = (b.biterm.w1, b.biterm.w2);
            let old = z[i];
            topic_biterms[old] -= 1;
            word_topic[old * v + w1] -= 1;
            word_topic[old * v + w2] -= 1;

            for t in 0..k {
                let words_in_topic = 2.0 * topic_biterms[t] as f64 + v_beta;
                weights[t] = (topic_biterms[t] as f64 + alpha)
                    * (word_topic[t * v + w1] as f64 + beta)
                    * (word_topic[t * v + w2] as f64 + beta)
                    / (words_in_topic * words_in_topic);
            }
            let new = sample_index(&weights, rng.random::<f64>());

            z[i] = new;
            topic_biterms[new] += 1;
            word_topic[new * v + w1] += 1;
            word_topic[new * v + w2] += 1;
        }
        let (pz, phi) = estimates(&topic_biterms, &word_topic, k, v, alpha, beta, biterms.len());
        let ll: f64 = biterms
            .iter()
            .map(|b| {
                (0..k)
                    .map(|t| pz[t] * phi[t][b.biterm.w1] * phi[t][b.biterm.w2])
                    .sum::<f64>()
                    .ln()
            })
            .sum();
        log_likelihood.push(ll);
    }

    let (pz, phi) = estimates(&topic_biterms, &word_topic, k, v, alpha, beta, biterms.len());
    let theta = doc_topics(corpus, biterms, &pz, &phi);
    let mut result = TopicModelResult {
        algorithm: "btm".into(),
        params: params.clone(),
        vocabulary: corpus.vocabulary.clone(),
        phi,
        theta,
        term_probabilities: corpus.term_probabilities(),
        top_terms: Vec::new(),
        relevance: Vec::new(),
        log_likelihood,
        empty_docs: empty_docs(corpus),
        warnings: Vec::new(),
    };
    result.fill_rankings();
    Ok(result)
}

/// Global topic proportions P(k) and topic-word distributions phi.
fn estimates(
    topic_biterms: &[u32],
    word_topic: &[u32],
    k: usize,
    v: usize,
    alpha: f64,
    beta: f64,
    n_biterms: usize,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut pz: Vec<f64> = topic_biterms
        .iter()
        .map(|&n| (n as f64 + alpha) / (n_biterms as f64 + k as f64 * alpha))
        .collect();
    renormalize(&mut pz);
    let phi = (0..k)
        .map(|t| {
            let denom = 2.0 * topic_biterms[t] as f64 + v as f64 * beta;
            let mut row: Vec<f64> = word_topic[t * v..(t + 1) * v]
                .iter()
                .map(|&n| (n as f64 + beta) / denom)
                .collect();
            renormalize(&mut row);
            row
        })
        .collect();
    (pz, phi)
}

/// theta[d][k] = mean over the document's biterms of P(k | b). Single-token
/// documents use P(k | w) ∝ P(k)·phi[k][w]; empty ones are uniform.
fn doc_topics(
    corpus: &TokenizedCorpus,
    biterms: &[DocBiterm],
    pz: &[f64],
    phi: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let k = pz.len();
    let mut theta = vec![vec![0.0; k]; corpus.num_docs()];
    let mut counts = vec![0usize; corpus.num_docs()];
    let mut posterior = vec![0.0; k];
    for b in biterms {
        for t in 0..k {
            posterior[t] = pz[t] * phi[t][b.biterm.w1] * phi[t][b.biterm.w2];
        }
        renormalize(&mut posterior);
        for t in 0..k {
            theta[b.doc][t] += posterior[t];
        }
        counts[b.doc] += 1;
    }
    for (d, row) in theta.iter_mut().enumerate() {
        let tokens = &corpus.docs[d];
        if counts[d] > 0 {
            for x in row.iter_mut() {
                *x /= counts[d] as f64;
            }
        } else if let [w] = tokens.as_slice() {
            for t in 0..k {
                row[t] = pz[t] * phi[t][*w];
            }
        } else {
            row.fill(1.0);
        }
        renormalize(row);
    }
    theta
}
