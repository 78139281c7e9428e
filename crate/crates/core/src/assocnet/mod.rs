//! Association rules over semicolon-delimited columns and the directed
//! keyword network built from them.

pub mod apriori;
pub mod graph;
pub mod rules;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ingest::{split_multivalue, ColumnKind, Dataset};

pub use apriori::{mine_itemsets, mine_itemsets_bounded, Itemset};
pub use graph::{build_graph, GraphEdge, GraphNode, RuleGraph};
pub use rules::{derive_rules, rules_to_csv, AssociationRule};

pub const DEFAULT_MIN_SUPPORT: f64 = 0.02;
pub const DEFAULT_MIN_CONFIDENCE: f64 = 0.3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssocError {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{0}` holds numbers, not delimited items")]
    NoMultivalueContent(String),
    #[error("min_support must lie in (0, 1], got {0}")]
    InvalidSupport(f64),
    #[error("min_confidence must lie in (0, 1], got {0}")]
    InvalidConfidence(f64),
}

/// Lowercased, deduplicated items of one row.
pub type Transaction = BTreeSet<String>;

/// One transaction per row with at least one item. `N` is the length of the
/// returned list.
pub fn build_transactions(ds: &Dataset, column: &str) -> Result<Vec<Transaction>, AssocError> {
    let info = ds
        .column(column)
        .ok_or_else(|| AssocError::UnknownColumn(column.to_string()))?;
    if matches!(info.kind, ColumnKind::Numeric | ColumnKind::Year) {
        return Err(AssocError::NoMultivalueContent(column.to_string()));
    }
    Ok(ds
        .cells(column)
        .flatten()
        .map(|cell| {
            split_multivalue(&cell, ';')
                .into_iter()
                .map(|item| item.to_lowercase())
                .collect::<Transaction>()
        })
        .filter(|t| !t.is_empty())
        .collect())
}

/// Number of transactions containing each item.
pub fn item_counts(transactions: &[Transaction]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for t in transactions {
        for item in t {
            *counts.entry(item.clone()).or_insert(0) += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_dataset, MappingSet, SourceKind};

    fn ds(text: &str) -> Dataset {
        parse_dataset(text.as_bytes(), SourceKind::Custom, &MappingSet::bundled()).unwrap()
    }

    fn set(items: &[&str]) -> Transaction {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalizes_rows() {
        let d = ds("Title,Tags\nT1,A; B\nT2,a\nT3,\nT4,C;c\n");
        let t = build_transactions(&d, "Tags").unwrap();
        assert_eq!(t, vec![set(&["a", "b"]), set(&["a"]), set(&["c"])]);
    }

    #[test]
    fn empty_column_gives_no_transactions() {
        let d = ds("Title,Tags\nT1,\n");
        assert!(build_transactions(&d, "Tags").unwrap().is_empty());
        assert_eq!(build_transactions(&d, "Nope"), Err(AssocError::UnknownColumn("Nope".into())));
    }

    #[test]
    fn rejects_numeric_columns() {
        let d = ds("Title,Citations\nT,3\n");
        assert_eq!(
            build_transactions(&d, "Citations"),
            Err(AssocError::NoMultivalueContent("Citations".into()))
        );
    }

    #[test]
    fn counts_items() {
        let c = item_counts(&[set(&["a", "b"]), set(&["a"])]);
        assert_eq!(c["a"], 2);
        assert_eq!(c["b"], 1);
    }
}
