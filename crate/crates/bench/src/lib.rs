//! Inputs shared by the benchmarks, built once per benchmark group.

use biblio_core::assocnet::{build_transactions, Transaction};
use biblio_core::synthetic::{bibliography_csv, two_block_corpus};
use biblio_core::{parse_dataset, Dataset, MappingSet, SourceKind, TokenizedCorpus};

/// A generated custom-format dataset with every canonical field filled.
pub fn bibliography(rows: usize) -> Dataset {
    parse_dataset(bibliography_csv(rows, 1).as_bytes(), SourceKind::Custom, &MappingSet::bundled())
        .expect("generated CSV parses")
}

/// Two-topic corpus of `docs` documents, `doc_len` tokens each.
pub fn two_topics(docs: usize, doc_len: usize) -> TokenizedCorpus {
    two_block_corpus(docs, 50, doc_len, 7).0
}

/// Keyword transactions from a generated dataset.
pub fn keyword_transactions(rows: usize) -> Vec<Transaction> {
    build_transactions(&bibliography(rows), "Author Keywords").expect("keyword column exists")
}

/// Every whitespace token of the generated titles and abstracts, lowercased.
pub fn words(rows: usize) -> Vec<String> {
    bibliography(rows)
        .records
        .iter()
        .flat_map(|r| [r.title.clone(), r.abstract_text.clone().unwrap_or_default()])
        .flat_map(|t| t.split_whitespace().map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()).collect::<Vec<_>>())
        .filter(|w| !w.is_empty())
        .collect()
}
