//! Keyword normalization: lemmatize or stem every keyword in the selected
//! keyword columns and record each original→modified pair.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capability::detect_keyword_columns;
use crate::ingest::Dataset;
use crate::textprep::{lemmatize_token, stem_token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KeystemError {
    #[error("no keyword columns selected")]
    NoKeywordColumns,
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{0}` is not a keyword column")]
    NotKeywordColumn(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeywordMethod {
    #[default]
    Lemmatize,
    Stem,
}

impl std::str::FromStr for KeywordMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lemmatize" => Ok(Self::Lemmatize),
            "stem" => Ok(Self::Stem),
            other => Err(format!("unknown method `{other}` (expected lemmatize or stem)")),
        }
    }
}

/// Distinct (original, modified) pairs in first-seen, row-major order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordMap {
    pub pairs: Vec<(String, String)>,
}

impl KeywordMap {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, original: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(o, _)| o == original)
            .map(|(_, m)| m.as_str())
    }

    /// Two-column CSV with header `original,modified`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["original", "modified"]).expect("write to Vec");
        for (o, m) in &self.pairs {
            w.write_record([o, m]).expect("write to Vec");
        }
        String::from_utf8(w.into_inner().expect("flush Vec")).expect("utf-8")
    }
}

fn transform(keyword: &str, method: KeywordMethod) -> String {
    keyword
        .split_whitespace()
        .map(|t| match method {
            KeywordMethod::Lemmatize => lemmatize_token(t),
            KeywordMethod::Stem => stem_token(t),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn dedup_keep_first(items: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(items.len());
    for item in items {
        if !out.contains(&item) {
            out.push(item);
        }
    }
    out
}

fn validate_columns(ds: &Dataset, columns: &[String]) -> Result<(), KeystemError> {
    if columns.is_empty() {
        return Err(KeystemError::NoKeywordColumns);
    }
    let keyword_cols = detect_keyword_columns(ds);
    for col in columns {
        if ds.column(col).is_none() {
            return Err(KeystemError::UnknownColumn(col.clone()));
        }
        if !keyword_cols.contains(col) {
            return Err(KeystemError::NotKeywordColumn(col.clone()));
        }
    }
    Ok(())
}

/// Rebuilds keyword cells in `columns` through `f`, which maps one
/// lowercased keyword to its replacement.
fn rewrite(ds: &Dataset, columns: &[String], mut f: impl FnMut(&str) -> String) -> Dataset {
    let mut records = ds.records.clone();
    for rec in records.iter_mut() {
        for col in columns {
            let Some(list) = rec.keyword_fields.get_mut(col) else { continue };
            let mapped = list.iter().map(|k| f(&k.to_lowercase())).collect();
            *list = dedup_keep_first(mapped);
        }
    }
    let mut out = Dataset::new(records, ds.source, ds.column_names().map(String::from).collect());
    out.warnings = ds.warnings.clone();
    out
}

/// Normalizes the keyword cells of `columns`.
pub fn stem_keywords(
    ds: &Dataset,
    method: KeywordMethod,
    columns: &[String],
) -> Result<(Dataset, KeywordMap), KeystemError> {
    validate_columns(ds, columns)?;
    let mut map = KeywordMap::default();
    let mut seen: HashMap<String, String> = HashMap::new();
    let out = rewrite(ds, columns, |keyword| {
        if let Some(m) = seen.get(keyword) {
            return m.clone();
        }
        let modified = transform(keyword, method);
        seen.insert(keyword.to_string(), modified.clone());
        map.pairs.push((keyword.to_string(), modified.clone()));
        modified
    });
    Ok((out, map))
}

/// Replays a keyword map over the original dataset.
pub fn apply_keyword_map(
    ds: &Dataset,
    columns: &[String],
    map: &KeywordMap,
) -> Result<Dataset, KeystemError> {
    validate_columns(ds, columns)?;
    let lookup: HashMap<&str, &str> = map
        .pairs
        .iter()
        .map(|(o, m)| (o.as_str(), m.as_str()))
        .collect();
    Ok(rewrite(ds, columns, |k| {
        lookup.get(k).map_or_else(|| k.to_string(), |m| m.to_string())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_dataset, MappingSet, SourceKind};

    fn ds(text: &str) -> Dataset {
        parse_dataset(text.as_bytes(), SourceKind::Custom, &MappingSet::bundled()).unwrap()
    }

    fn cols() -> Vec<String> {
        vec!["Author Keywords".to_string()]
    }

    #[test]
    fn apples_merge() {
        let d = ds("Title,Author Keywords\nT,Apples; Apple\n");
        let (out, map) = stem_keywords(&d, KeywordMethod::Lemmatize, &cols()).unwrap();
        assert_eq!(out.records[0].cell("Author Keywords").as_deref(), Some("apple"));
        assert_eq!(
            map.pairs,
            vec![
                ("apples".to_string(), "apple".to_string()),
                ("apple".to_string(), "apple".to_string())
            ]
        );
    }

    #[test]
    fn multiword_keywords() {
        let d = ds("Title,Author Keywords\nT,Topic Modeling; Topic Models\n");
        let (out, _) = stem_keywords(&d, KeywordMethod::Lemmatize, &cols()).unwrap();
        assert_eq!(
            out.records[0].cell("Author Keywords").as_deref(),
            Some("topic modeling; topic model")
        );
        let (out, _) = stem_keywords(&d, KeywordMethod::Stem, &cols()).unwrap();
        assert_eq!(out.records[0].cell("Author Keywords").as_deref(), Some("topic model"));
    }

    #[test]
    fn empty_cell_no_entries() {
        let d = ds("Title,Author Keywords\nT,\nU,x; y\n");
        let (out, map) = stem_keywords(&d, KeywordMethod::Lemmatize, &cols()).unwrap();
        assert_eq!(out.records[0].cell("Author Keywords"), None);
        assert_eq!(map.len(), 2);
    }

    #[test]
    fn errors() {
        let d = ds("Title,Author Keywords\nT,a\n");
        assert_eq!(
            stem_keywords(&d, KeywordMethod::Lemmatize, &[]),
            Err(KeystemError::NoKeywordColumns)
        );
        assert_eq!(
            stem_keywords(&d, KeywordMethod::Lemmatize, &["Keywords Plus".to_string()]),
            Err(KeystemError::UnknownColumn("Keywords Plus".into()))
        );
        assert_eq!(
            stem_keywords(&d, KeywordMethod::Lemmatize, &["Title".to_string()]),
            Err(KeystemError::NotKeywordColumn("Title".into()))
        );
    }

    #[test]
    fn map_csv() {
        let map = KeywordMap {
            pairs: vec![("apples".into(), "apple".into())],
        };
        assert_eq!(map.to_csv(), "original,modified\napples,apple\n");
    }

    #[test]
    fn lemmatize_idempotent_and_replayable() {
        let d = ds("Title,Author Keywords\nT,Libraries; Digital Libraries; geese\nU,Studies; studied\n");
        let (once, map) = stem_keywords(&d, KeywordMethod::Lemmatize, &cols()).unwrap();
        let (twice, _) = stem_keywords(&once, KeywordMethod::Lemmatize, &cols()).unwrap();
        assert_eq!(once.records, twice.records);
        assert_eq!(apply_keyword_map(&d, &cols(), &map).unwrap().records, once.records);
    }
}
