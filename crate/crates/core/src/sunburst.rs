//! Three-ring hierarchy: document type → source title → publication year.
//!
//! Slice size is the document count. Leaves carry their citation total;
//! every inner node carries the count-weighted mean of its children's
//! per-document citation means, which equals total citations / count.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capability::check_capabilities;
use crate::ingest::Dataset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SunburstError {
    #[error("dataset is missing required fields: {}", .0.join(", "))]
    NotEligible(Vec<String>),
    #[error("no rows left after filtering")]
    EmptyAfterFilter,
    #[error("invalid year range {0}..={1}")]
    InvalidRange(i32, i32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Root,
    DocumentType,
    SourceTitle,
    PublicationYear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SunburstNode {
    pub label: String,
    pub layer: Layer,
    pub count: usize,
    pub value: f64,
    pub children: Vec<SunburstNode>,
}

impl SunburstNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Citations per document under this node.
    pub fn mean_citations(&self) -> f64 {
        if self.is_leaf() {
            self.value / self.count as f64
        } else {
            self.value
        }
    }

    /// Visits nodes depth first, parents before children.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SunburstNode, Option<&'a SunburstNode>)) {
        fn go<'a>(
            n: &'a SunburstNode,
            parent: Option<&'a SunburstNode>,
            f: &mut impl FnMut(&'a SunburstNode, Option<&'a SunburstNode>),
        ) {
            f(n, parent);
            for c in &n.children {
                go(c, Some(n), f);
            }
        }
        go(self, None, f);
    }
}

/// Flat arrays for chart renderers that take parallel id/parent lists.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlatSunburst {
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    /// Empty string for the root.
    pub parents: Vec<String>,
    /// Document counts (slice sizes).
    pub values: Vec<usize>,
    /// Citation values (slice colors).
    pub colors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SunburstResult {
    pub root: SunburstNode,
    /// Rows dropped for lacking a document type, source title or year, or
    /// falling outside the year range.
    pub excluded_rows: usize,
    pub year_range: Option<(i32, i32)>,
    pub flat: FlatSunburst,
}

type Groups = BTreeMap<String, BTreeMap<String, BTreeMap<i32, (usize, u64)>>>;

pub fn build_sunburst(ds: &Dataset, year_range: Option<(i32, i32)>) -> Result<SunburstResult, SunburstError> {
    let cap = check_capabilities(ds).sunburst;
    if !cap.eligible {
        return Err(SunburstError::NotEligible(cap.missing_fields));
    }
    if let Some((lo, hi)) = year_range {
        if lo > hi {
            return Err(SunburstError::InvalidRange(lo, hi));
        }
    }

    let mut groups = Groups::new();
    let mut excluded = 0;
    for rec in &ds.records {
        let (Some(doc_type), Some(source), Some(year)) =
            (rec.document_type.as_ref(), rec.source_title.as_ref(), rec.publication_year)
        else {
            excluded += 1;
            continue;
        };
        if year_range.is_some_and(|(lo, hi)| year < lo || year > hi) {
            excluded += 1;
            continue;
        }
        let leaf = groups
            .entry(doc_type.clone())
            .or_default()
            .entry(source.clone())
            .or_default()
            .entry(year)
            .or_default();
        leaf.0 += 1;
        leaf.1 += rec.citations.unwrap_or(0);
    }
    if groups.is_empty() {
        return Err(SunburstError::EmptyAfterFilter);
    }

    let types = groups
        .into_iter()
        .map(|(doc_type, sources)| {
            let sources = sources
                .into_iter()
                .map(|(source, years)| {
                    let leaves = years
                        .into_iter()
                        .map(|(year, (count, total))| SunburstNode {
                            label: year.to_string(),
                            layer: Layer::PublicationYear,
                            count,
                            value: total as f64,
                            children: Vec::new(),
                        })
                        .collect();
                    inner(source, Layer::SourceTitle, leaves)
                })
                .collect();
            inner(doc_type, Layer::DocumentType, sources)
        })
        .collect();
    let root = inner("root".to_string(), Layer::Root, types);
    let flat = flatten(&root);
    Ok(SunburstResult {
        root,
        excluded_rows: excluded,
        year_range,
        flat,
    })
}

fn inner(label: String, layer: Layer, mut children: Vec<SunburstNode>) -> SunburstNode {
    children.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.label.cmp(&b.label)));
    let count = children.iter().map(|c| c.count).sum();
    let weighted: f64 = children.iter().map(|c| c.count as f64 * c.mean_citations()).sum();
    SunburstNode {
        label,
        layer,
        count,
        value: weighted / count as f64,
        children,
    }
}

fn escape_id(label: &str) -> String {
    label.replace('%', "%25").replace('/', "%2F")
}

fn flatten(root: &SunburstNode) -> FlatSunburst {
    fn go(n: &SunburstNode, id: String, parent: &str, out: &mut FlatSunburst) {
        out.ids.push(id.clone());
        out.labels.push(n.label.clone());
        out.parents.push(parent.to_string());
        out.values.push(n.count);
        out.colors.push(n.value);
        for c in &n.children {
            go(c, format!("{id}/{}", escape_id(&c.label)), &id, out);
        }
    }
    let mut out = FlatSunburst::default();
    go(root, escape_id(&root.label), "", &mut out);
    out
}
