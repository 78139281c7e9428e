//! Seeded synthetic inputs with known structure, for recovery checks and
//! benchmarks, plus the small random tables and exhaustive reference miner
//! used by the randomized checks.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::assocnet::{AssociationRule, Transaction};
use crate::ingest::{canonical, BiblioRecord, Dataset, SourceKind};
use crate::textprep::TokenizedCorpus;

/// `docs` documents of `doc_len` tokens. Document `d` draws uniformly from
/// block `d % 2`, whose `vocab_per_block` terms are disjoint from the other
/// block's. Returns the corpus and each document's block.
pub fn two_block_corpus(
    docs: usize,
    vocab_per_block: usize,
    doc_len: usize,
    seed: u64,
) -> (TokenizedCorpus, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: [Vec<String>; 2] = [
        (0..vocab_per_block).map(|i| format!("alpha{i}")).collect(),
        (0..vocab_per_block).map(|i| format!("beta{i}")).collect(),
    ];
    let labels: Vec<usize> = (0..docs).map(|d| d % 2).collect();
    let token_docs: Vec<Vec<&str>> = labels
        .iter()
        .map(|&b| {
            (0..doc_len)
                .map(|_| blocks[b].choose(&mut rng).expect("non-empty block").as_str())
                .collect()
        })
        .collect();
    (TokenizedCorpus::from_token_docs(&token_docs), labels)
}

/// `n` points in `dim` dimensions around `centers.len()` centers placed at
/// `centers[c]` on every axis, unit variance. Point `i` belongs to center
/// `i % centers.len()`.
pub fn gaussian_blobs(n: usize, dim: usize, centers: &[f64], seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).expect("valid normal");
    let labels: Vec<usize> = (0..n).map(|i| i % centers.len()).collect();
    let points = labels
        .iter()
        .map(|&c| (0..dim).map(|_| centers[c] + noise.sample(&mut rng)).collect())
        .collect();
    (points, labels)
}

/// Fraction of items whose predicted cluster's majority class matches their
/// own class. Invariant to relabeling clusters.
pub fn purity(truth: &[usize], predicted: &[usize]) -> f64 {
    assert_eq!(truth.len(), predicted.len());
    if truth.is_empty() {
        return 1.0;
    }
    let clusters = predicted.iter().max().map_or(0, |m| m + 1);
    let classes = truth.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![vec![0usize; classes]; clusters];
    for (&t, &p) in truth.iter().zip(predicted) {
        table[p][t] += 1;
    }
    let hits: usize = table.iter().map(|row| row.iter().copied().max().unwrap_or(0)).sum();
    hits as f64 / truth.len() as f64
}

const TOPIC_WORDS: [&[&str]; 3] = [
    &["library", "catalogue", "repository", "metadata", "librarian", "collection", "archive", "patron"],
    &["citation", "journal", "impact", "bibliometric", "indicator", "author", "collaboration", "productivity"],
    &["topic", "model", "latent", "allocation", "corpus", "cluster", "embedding", "sampling"],
];
const KEYWORDS: [&[&str]; 3] = [
    &["digital libraries", "metadata", "open access", "information retrieval"],
    &["bibliometrics", "citation analysis", "h-index", "scientometrics"],
    &["topic modeling", "text mining", "lda", "natural language processing"],
];
const DOC_TYPES: [&str; 3] = ["Article", "Conference Paper", "Review"];
const SOURCES: [&str; 4] = ["Scientometrics", "Library Hi Tech", "Journal of Informetrics", "Digital Library Perspectives"];

/// A custom-format CSV with all seven canonical fields over three themes.
pub fn bibliography_csv(rows: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "Title",
        "Abstract",
        "Author Keywords",
        "Publication Year",
        "Citations",
        "Document Type",
        "Source Title",
    ])
    .expect("write to Vec");
    for i in 0..rows {
        let theme = i % TOPIC_WORDS.len();
        let words = TOPIC_WORDS[theme];
        let pick = |rng: &mut ChaCha8Rng, n: usize| -> Vec<&str> {
            (0..n).map(|_| *words.choose(rng).expect("non-empty")).collect()
        };
        let title = pick(&mut rng, 6).join(" ");
        let abstract_text = format!("{}. {}.", pick(&mut rng, 12).join(" "), pick(&mut rng, 10).join(" "));
        let keywords: Vec<&str> = KEYWORDS[theme].choose_multiple(&mut rng, 2).copied().collect();
        w.write_record([
            format!("Study {i}: {title}"),
            abstract_text,
            keywords.join("; "),
            rng.random_range(2010..=2023).to_string(),
            rng.random_range(0..60u32).to_string(),
            DOC_TYPES.choose(&mut rng).expect("non-empty").to_string(),
            SOURCES.choose(&mut rng).expect("non-empty").to_string(),
        ])
        .expect("write to Vec");
    }
    String::from_utf8(w.into_inner().expect("flush Vec")).expect("utf-8")
}

const KEYWORD_POOL: [&str; 24] = [
    "Apples", "apple", "Studies", "study", "studied", "Libraries", "digital libraries",
    "Digital Library", "networks", "network", "Network Analysis", "analyses", "analysis",
    "Topic Models", "topic modeling", "geese", "goose", "Mice", "running", "ran",
    "data", "citations", "citation", "H-index",
];

/// Between 1 and 20 rows with one or two keyword columns of random
/// inflected keywords, mixed case, some cells empty.
pub fn random_keyword_dataset(rng: &mut impl Rng) -> Dataset {
    let columns: Vec<String> = if rng.random_bool(0.5) {
        vec!["Author Keywords".into()]
    } else {
        vec!["Author Keywords".into(), "Index Keywords".into()]
    };
    let rows = rng.random_range(1..=20);
    let records = (0..rows)
        .map(|i| {
            let mut rec = BiblioRecord {
                title: format!("Record {i}"),
                ..Default::default()
            };
            for col in &columns {
                let n = rng.random_range(0..=5);
                let cell: Vec<&str> = (0..n)
                    .map(|_| *KEYWORD_POOL.choose(rng).expect("non-empty pool"))
                    .collect();
                rec.set_cell(col, &cell.join("; "));
            }
            rec
        })
        .collect();
    let mut header = vec![canonical::TITLE.to_string()];
    header.extend(columns);
    Dataset::new(records, SourceKind::Custom, header)
}

/// Between 1 and 40 rows over a handful of types, sources and years. Each of
/// the three grouping fields is missing with probability 0.1 and citations
/// with probability 0.2; row 0 always has all four.
pub fn random_sunburst_dataset(rng: &mut impl Rng) -> Dataset {
    let rows = rng.random_range(1..=40);
    let records = (0..rows)
        .map(|i| {
            let keep = |rng: &mut _, p: f64| i == 0 || !Rng::random_bool(rng, p);
            BiblioRecord {
                title: format!("Record {i}"),
                document_type: keep(rng, 0.1).then(|| DOC_TYPES.choose(rng).expect("non-empty").to_string()),
                source_title: keep(rng, 0.1).then(|| SOURCES.choose(rng).expect("non-empty").to_string()),
                publication_year: keep(rng, 0.1).then(|| rng.random_range(2015..=2020)),
                citations: keep(rng, 0.2).then(|| rng.random_range(0..200)),
                ..Default::default()
            }
        })
        .collect();
    let mut header = vec![canonical::TITLE.to_string()];
    header.extend(canonical::SUNBURST_FIELDS.iter().map(|f| f.to_string()));
    Dataset::new(records, SourceKind::Custom, header)
}

/// Up to `max_transactions` transactions over at most `max_items` items,
/// each transaction non-empty.
pub fn random_transactions(rng: &mut impl Rng, max_items: usize, max_transactions: usize) -> Vec<Transaction> {
    let items = rng.random_range(1..=max_items);
    let n = rng.random_range(1..=max_transactions);
    (0..n)
        .map(|_| {
            let mut t: Transaction = (0..items)
                .filter(|_| rng.random_bool(0.4))
                .map(|i| format!("i{i}"))
                .collect();
            if t.is_empty() {
                t.insert(format!("i{}", rng.random_range(0..items)));
            }
            t
        })
        .collect()
}

/// Reference rule miner: enumerates every subset of the item universe and
/// every split of each frequent one. Exponential, for small inputs only.
/// Rules come back sorted by (antecedent, consequent).
pub fn brute_force_rules(transactions: &[Transaction], min_support: f64, min_confidence: f64) -> Vec<AssociationRule> {
    let universe: Vec<&String> = transactions
        .iter()
        .flatten()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    assert!(universe.len() <= 16, "oracle is exponential in the item count");
    let n = transactions.len() as f64;
    let support = |items: &[&String]| {
        transactions
            .iter()
            .filter(|t| items.iter().all(|i| t.contains(*i)))
            .count() as f64
            / n
    };
    let subset = |mask: u32| -> Vec<&String> {
        universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, s)| *s)
            .collect()
    };
    let mut rules = Vec::new();
    for mask in 1u32..1 << universe.len() {
        if mask.count_ones() < 2 {
            continue;
        }
        let whole = subset(mask);
        let s = support(&whole);
        if s < min_support {
            continue;
        }
        // Walk the proper non-empty submasks of `mask`.
        let mut a = (mask - 1) & mask;
        while a > 0 {
            let antecedent = subset(a);
            let consequent = subset(mask & !a);
            let confidence = s / support(&antecedent);
            if confidence >= min_confidence {
                rules.push(AssociationRule {
                    antecedent: antecedent.into_iter().cloned().collect(),
                    consequent: consequent.iter().map(|s| (*s).clone()).collect(),
                    support: s,
                    confidence,
                    lift: confidence / support(&consequent),
                });
            }
            a = (a - 1) & mask;
        }
    }
    rules.sort_by(|x, y| (&x.antecedent, &x.consequent).cmp(&(&y.antecedent, &y.consequent)));
    rules
}
