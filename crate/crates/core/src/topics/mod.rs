//! Topic models: collapsed-Gibbs LDA, the Biterm topic model, and k-means
//! over document embeddings labeled with class-based TF-IDF. Also the
//! relevance ranking used to browse topic terms.

pub mod btm;
pub mod ctfidf;
pub mod embeddings;
pub mod kmeans;
pub mod lda;
pub mod relevance;

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use btm::{btm_extract_biterms, btm_fit, Biterm, DocBiterm};
pub use ctfidf::{ctfidf, CtfidfResult};
pub use embeddings::{parse_embeddings, EmbeddingError};
pub use kmeans::{cluster_embeddings, KMeansError};
pub use lda::{lda_fit, LdaSampler};
pub use relevance::relevance_ranking;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopicError {
    #[error("corpus has no non-empty documents")]
    EmptyCorpus,
    #[error("no biterms: every document has fewer than two tokens")]
    NoBiterms,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("lambda must lie in [0, 1], got {0}")]
    InvalidLambda(f64),
    #[error("{labels} labels for {docs} documents")]
    LabelLengthMismatch { labels: usize, docs: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopicModelParams {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    pub top_n: usize,
    #[serde(rename = "lambda")]
    pub lambda_relevance: f64,
}

impl Default for TopicModelParams {
    fn default() -> Self {
        Self {
            k: 5,
            alpha: 0.1,
            beta: 0.01,
            iterations: 500,
            seed: 42,
            top_n: 10,
            lambda_relevance: 0.6,
        }
    }
}

impl TopicModelParams {
    /// Checks the user-facing constraints (K ≥ 2).
    pub fn validate(&self) -> Result<(), TopicError> {
        if self.k < 2 {
            return Err(TopicError::InvalidParams(format!("k must be at least 2, got {}", self.k)));
        }
        self.validate_for_fit()
    }

    /// Constraints the samplers need. K = 1 is allowed here as a degenerate case.
    pub(crate) fn validate_for_fit(&self) -> Result<(), TopicError> {
        let bad = |msg: String| Err(TopicError::InvalidParams(msg));
        if self.k == 0 {
            return bad("k must be positive".into());
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta must be > 0, got {}", self.beta));
        }
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        if self.top_n == 0 {
            return bad("top_n must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.lambda_relevance) {
            return Err(TopicError::InvalidLambda(self.lambda_relevance));
        }
        Ok(())
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWeight {
    pub term: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModelResult {
    pub algorithm: String,
    pub params: TopicModelParams,
    pub vocabulary: Vec<String>,
    /// K×V topic-term probabilities.
    pub phi: Vec<Vec<f64>>,
    /// D×K document-topic probabilities.
    pub theta: Vec<Vec<f64>>,
    /// Corpus term probabilities, used for relevance re-ranking.
    pub term_probabilities: Vec<f64>,
    /// Per topic, the `top_n` terms by phi.
    pub top_terms: Vec<Vec<TermWeight>>,
    /// Per topic, the `top_n` terms by relevance at `params.lambda`.
    pub relevance: Vec<Vec<TermWeight>>,
    pub log_likelihood: Vec<f64>,
    /// Documents with no tokens; their theta rows are uniform by convention.
    pub empty_docs: Vec<usize>,
    pub warnings: Vec<String>,
}

impl TopicModelResult {
    /// Largest deviation of any phi row or non-empty theta row sum from 1,
    /// or infinity if any entry is negative or non-finite.
    pub fn normalization_error(&self) -> f64 {
        let row_err = |row: &Vec<f64>| {
            if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
                f64::INFINITY
            } else {
                (row.iter().sum::<f64>() - 1.0).abs()
            }
        };
        let phi = self.phi.iter().map(row_err);
        let theta = self
            .theta
            .iter()
            .enumerate()
            .filter(|(d, _)| !self.empty_docs.contains(d))
            .map(|(_, r)| row_err(r));
        phi.chain(theta).fold(0.0, f64::max)
    }

    /// Index of the most probable topic per document.
    pub fn dominant_topics(&self) -> Vec<usize> {
        self.theta.iter().map(|row| argmax(row)).collect()
    }

    pub(crate) fn fill_rankings(&mut self) {
        let top_n = self.params.top_n;
        self.top_terms = self
            .phi
            .iter()
            .map(|row| {
                let mut ranked: Vec<(usize, f64)> =
                    row.iter().copied().enumerate().filter(|(_, p)| *p > 0.0).collect();
                sort_ranked(&mut ranked, &self.vocabulary);
                to_terms(&ranked, &self.vocabulary, top_n)
            })
            .collect();
        self.relevance = relevance_ranking(
            &self.phi,
            &self.term_probabilities,
            self.params.lambda_relevance,
            &self.vocabulary,
        )
        .expect("lambda validated before fitting")
        .into_iter()
        .map(|ranked| to_terms(&ranked, &self.vocabulary, top_n))
        .collect();
    }
}

pub(crate) fn argmax(row: &[f64]) -> usize {
    row.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
        .0
}

/// Descending by weight, ties broken by term string.
pub(crate) fn sort_ranked(ranked: &mut [(usize, f64)], vocabulary: &[String]) {
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| vocabulary[a.0].cmp(&vocabulary[b.0]))
    });
}

fn to_terms(ranked: &[(usize, f64)], vocabulary: &[String], n: usize) -> Vec<TermWeight> {
    ranked
        .iter()
        .take(n)
        .map(|&(id, weight)| TermWeight {
            term: vocabulary[id].clone(),
            weight,
        })
        .collect()
}

/// Inverse-CDF draw from unnormalized non-negative weights.
pub(crate) fn sample_index(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = u * total;
    for (i, w) in weights.iter().enumerate() {
        if target < *w {
            return i;
        }
        target -= w;
    }
    weights.len() - 1
}
