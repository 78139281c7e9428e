//! Latent Dirichlet allocation by collapsed Gibbs sampling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use super::{sample_index, TopicError, TopicModelParams, TopicModelResult};
use crate::textprep::TokenizedCorpus;

/// Sampler state: per-token topic assignments and the three count tables.
pub struct LdaSampler<'a> {
    corpus: &'a TokenizedCorpus,
    k: usize,
    v: usize,
    alpha: f64,
    beta: f64,
    rng: ChaCha8Rng,
    /// Topic of each token, per document.
    pub assignments: Vec<Vec<usize>>,
    /// D×K document-topic counts, row-major.
    pub doc_topic: Vec<u32>,
    /// K×V topic-word counts, row-major.
    pub topic_word: Vec<u32>,
    pub topic_totals: Vec<u32>,
    weights: Vec<f64>,
}

impl<'a> LdaSampler<'a> {
    /// Assigns every token a uniformly random topic.
    pub fn new(corpus: &'a TokenizedCorpus, params: &TopicModelParams) -> Self {
        let (k, v) = (params.k, corpus.vocab_size());
        let mut rng = params.rng();
        let mut doc_topic = vec![0u32; corpus.num_docs() * k];
        let mut topic_word = vec![0u32; k * v];
        let mut topic_totals = vec![0u32; k];
        let assignments = corpus
            .docs
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                doc.iter()
                    .map(|&w| {
                        let z = rng.random_range(0..k);
                        doc_topic[d * k + z] += 1;
                        topic_word[z * v + w] += 1;
                        topic_totals[z] += 1;
                        z
                    })
                    .collect()
            })
            .collect();
        Self {
            corpus,
            k,
            v,
            alpha: params.alpha,
            beta: params.beta,
            rng,
            assignments,
            doc_topic,
            topic_word,
            topic_totals,
            weights: vec![0.0; k],
        }
    }

    /// Resamples every token once.
    pub fn sweep(&mut self) {
        let (k, v) = (self.k, self.v);
        let v_beta = v as f64 * self.beta;
        for (d, doc) in self.corpus.docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = self.assignments[d][i];
                self.doc_topic[d * k + old] -= 1;
                self.topic_word[old * v + w] -= 1;
                self.topic_totals[old] -= 1;

                for t in 0..k {
                    self.weights[t] = (self.doc_topic[d * k + t] as f64 + self.alpha)
                        * (self.topic_word[t * v + w] as f64 + self.beta)
                        / (self.topic_totals[t] as f64 + v_beta);
                }
                let new = sample_index(&self.weights, self.rng.random::<f64>());

                self.assignments[d][i] = new;
                self.doc_topic[d * k + new] += 1;
                self.topic_word[new * v + w] += 1;
                self.topic_totals[new] += 1;
            }
        }
    }

    /// Collapsed log p(w | z).
    pub fn log_likelihood(&self) -> f64 {
        let (k, v, beta) = (self.k, self.v, self.beta);
        let v_beta = v as f64 * beta;
        let lg_beta = ln_gamma(beta);
        let mut ll = k as f64 * (ln_gamma(v_beta) - v as f64 * lg_beta);
        for t in 0..k {
            let row = &self.topic_word[t * v..(t + 1) * v];
            let mut zeros = 0usize;
            for &n in row {
                if n == 0 {
                    zeros += 1;
                } else {
                    ll += ln_gamma(n as f64 + beta);
                }
            }
            ll += zeros as f64 * lg_beta;
            ll -= ln_gamma(self.topic_totals[t] as f64 + v_beta);
        }
        ll
    }

    /// True when every count table agrees with the assignments.
    pub fn counts_consistent(&self) -> bool {
        let (k, v) = (self.k, self.v);
        let docs_ok = self.corpus.docs.iter().enumerate().all(|(d, doc)| {
            let row = &self.doc_topic[d * k..(d + 1) * k];
            row.iter().map(|&c| c as usize).sum::<usize>() == doc.len()
                && (0..k).all(|t| {
                    row[t] as usize == self.assignments[d].iter().filter(|&&z| z == t).count()
                })
        });
        let topics_ok = (0..k).all(|t| {
            self.topic_word[t * v..(t + 1) * v]
                .iter()
                .map(|&c| c as u64)
                .sum::<u64>()
                == self.topic_totals[t] as u64
        });
        docs_ok && topics_ok
    }

    pub fn phi(&self) -> Vec<Vec<f64>> {
        let (k, v) = (self.k, self.v);
        let v_beta = v as f64 * self.beta;
        (0..k)
            .map(|t| {
                let denom = self.topic_totals[t] as f64 + v_beta;
                let mut row: Vec<f64> = self.topic_word[t * v..(t + 1) * v]
                    .iter()
                    .map(|&n| (n as f64 + self.beta) / denom)
                    .collect();
                renormalize(&mut row);
                row
            })
            .collect()
    }

    pub fn theta(&self) -> Vec<Vec<f64>> {
        let k = self.k;
        let k_alpha = k as f64 * self.alpha;
        self.corpus
            .docs
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                if doc.is_empty() {
                    return vec![1.0 / k as f64; k];
                }
                let denom = doc.len() as f64 + k_alpha;
                let mut row: Vec<f64> = self.doc_topic[d * k..(d + 1) * k]
                    .iter()
                    .map(|&n| (n as f64 + self.alpha) / denom)
                    .collect();
                renormalize(&mut row);
                row
            })
            .collect()
    }
}

/// Rescales a probability row so rounding error does not accumulate.
pub(crate) fn renormalize(row: &mut [f64]) {
    let sum: f64 = row.iter().sum();
    if sum > 0.0 {
        for x in row.iter_mut() {
            *x /= sum;
        }
    }
}

pub fn lda_fit(corpus: &TokenizedCorpus, params: &TopicModelParams) -> Result<TopicModelResult, TopicError> {
    params.validate_for_fit()?;
    if corpus.docs.iter().all(Vec::is_empty) {
        return Err(TopicError::EmptyCorpus);
    }
    let mut warnings = Vec::new();
    if corpus.vocab_size() < params.k {
        warnings.push(format!(
            "vocabulary size {} is smaller than k = {}",
            corpus.vocab_size(),
            params.k
        ));
    }
    let mut sampler = LdaSampler::new(corpus, params);
    let mut log_likelihood = Vec::with_capacity(params.iterations);
    for _ in 0..params.iterations {
        sampler.sweep();
        log_likelihood.push(sampler.log_likelihood());
    }
    let mut result = TopicModelResult {
        algorithm: "lda".into(),
        params: params.clone(),
        vocabulary: corpus.vocabulary.clone(),
        phi: sampler.phi(),
        theta: sampler.theta(),
        term_probabilities: corpus.term_probabilities(),
        top_terms: Vec::new(),
        relevance: Vec::new(),
        log_likelihood,
        empty_docs: empty_docs(corpus),
        warnings,
    };
    result.fill_rankings();
    Ok(result)
}

pub(crate) fn empty_docs(corpus: &TokenizedCorpus) -> Vec<usize> {
    corpus
        .docs
        .iter()
        .enumerate()
        .filter(|(_, d)| d.is_empty())
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> TokenizedCorpus {
        TokenizedCorpus::from_token_docs(&[
            vec!["a", "b", "a", "c"],
            vec![],
            vec!["d", "e", "d"],
            vec!["a", "e"],
        ])
    }

    fn params() -> TopicModelParams {
        TopicModelParams {
            k: 2,
            iterations: 20,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn counts_conserved_every_sweep() {
        let corpus = toy();
        let mut s = LdaSampler::new(&corpus, &params());
        assert!(s.counts_consistent());
        for _ in 0..25 {
            s.sweep();
            assert!(s.counts_consistent());
        }
    }

    #[test]
    fn normalized_and_deterministic() {
        let corpus = toy();
        let a = lda_fit(&corpus, &params()).unwrap();
        let b = lda_fit(&corpus, &params()).unwrap();
        assert!(a.normalization_error() < 1e-9);
        assert_eq!(a.phi, b.phi);
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.empty_docs, vec![1]);
        assert_eq!(a.theta[1], vec![0.5, 0.5]);
        assert_eq!(a.log_likelihood.len(), 20);
    }

    #[test]
    fn empty_corpus() {
        let corpus = TokenizedCorpus::from_token_docs::<&str>(&[vec![], vec![]]);
        assert_eq!(lda_fit(&corpus, &params()), Err(TopicError::EmptyCorpus));
    }
}
