//! Term relevance: λ·log φ(k,w) + (1−λ)·log(φ(k,w)/p(w)).
//!
//! λ = 1 ranks by topic probability, λ = 0 by lift over the corpus rate.

use super::{sort_ranked, TopicError};

/// Per topic, `(term id, relevance)` sorted descending with ties broken by
/// term string. Terms with zero topic probability or zero corpus
/// probability are left out.
pub fn relevance_ranking(
    phi: &[Vec<f64>],
    term_probabilities: &[f64],
    lambda: f64,
    vocabulary: &[String],
) -> Result<Vec<Vec<(usize, f64)>>, TopicError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(TopicError::InvalidLambda(lambda));
    }
    Ok(phi
        .iter()
        .map(|row| {
            let mut ranked: Vec<(usize, f64)> = row
                .iter()
                .zip(term_probabilities)
                .enumerate()
                .filter(|(_, (&p, &pw))| p > 0.0 && pw > 0.0)
                .map(|(w, (&p, &pw))| (w, lambda * p.ln() + (1.0 - lambda) * (p / pw).ln()))
                .collect();
            sort_ranked(&mut ranked, vocabulary);
            ranked
        })
        .collect())
}
