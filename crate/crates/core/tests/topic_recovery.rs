use biblio_core::synthetic::{purity, two_block_corpus};
use biblio_core::topics::{btm_extract_biterms, btm_fit, lda_fit, LdaSampler, TopicModelParams};

fn params(seed: u64) -> TopicModelParams {
    TopicModelParams {
        k: 2,
        seed,
        ..Default::default()
    }
}

#[test]
fn lda_separates_two_blocks() {
    for seed in 1..=5 {
        let (corpus, truth) = two_block_corpus(200, 50, 20, seed);
        let fit = lda_fit(&corpus, &params(seed + 1000)).unwrap();
        let p = purity(&truth, &fit.dominant_topics());
        assert!(p >= 0.95, "seed {seed}: purity {p}");
        assert!(fit.normalization_error() < 1e-9);
        assert_eq!(fit.log_likelihood.len(), 500);
    }
}

#[test]
fn btm_separates_two_blocks_of_short_texts() {
    for seed in 1..=5 {
        let (corpus, truth) = two_block_corpus(200, 50, 3, seed);
        let fit = btm_fit(&corpus, &btm_extract_biterms(&corpus), &params(seed + 1000)).unwrap();
        let p = purity(&truth, &fit.dominant_topics());
        assert!(p >= 0.95, "seed {seed}: purity {p}");
        assert!(fit.normalization_error() < 1e-9);
    }
}

#[test]
fn likelihood_improves_from_random_start() {
    // The model seed must differ from the corpus seed; sharing one stream
    // makes each initial topic a function of the word drawn with it.
    let (corpus, _) = two_block_corpus(100, 30, 15, 9);
    let mut sampler = LdaSampler::new(&corpus, &params(1009));
    let start = sampler.log_likelihood();
    for _ in 0..50 {
        sampler.sweep();
    }
    assert!(sampler.log_likelihood() > start);
}
