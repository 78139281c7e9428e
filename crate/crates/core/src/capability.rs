//! File checker: which analyses a dataset supports.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ingest::{canonical, ColumnInfo, ColumnKind, Dataset};

/// Minimum mean whitespace-token count for a free-text column to feed topic models.
pub const TEXT_MIN_MEAN_TOKENS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    KeywordsStem,
    TopicModeling,
    BidirectionalNetwork,
    Sunburst,
}

impl Analysis {
    pub const ALL: [Analysis; 4] = [
        Self::KeywordsStem,
        Self::TopicModeling,
        Self::BidirectionalNetwork,
        Self::Sunburst,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::KeywordsStem => "keywords_stem",
            Self::TopicModeling => "topic_modeling",
            Self::BidirectionalNetwork => "bidirectional_network",
            Self::Sunburst => "sunburst",
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capability {
    pub eligible: bool,
    pub missing_fields: Vec<String>,
    pub usable_columns: Vec<String>,
}

impl Capability {
    fn from_parts(usable_columns: Vec<String>, missing_fields: Vec<String>) -> Self {
        Self {
            eligible: missing_fields.is_empty(),
            missing_fields,
            usable_columns,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilityReport {
    pub keywords_stem: Capability,
    pub topic_modeling: Capability,
    pub bidirectional_network: Capability,
    pub sunburst: Capability,
}

impl CapabilityReport {
    pub fn get(&self, analysis: Analysis) -> &Capability {
        match analysis {
            Analysis::KeywordsStem => &self.keywords_stem,
            Analysis::TopicModeling => &self.topic_modeling,
            Analysis::BidirectionalNetwork => &self.bidirectional_network,
            Analysis::Sunburst => &self.sunburst,
        }
    }

    /// Fixed-width table, one row per analysis.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<22} {:<9} {:<40} {}\n", "analysis", "eligible", "missing", "columns");
        for analysis in Analysis::ALL {
            let cap = self.get(analysis);
            out.push_str(&format!(
                "{:<22} {:<9} {:<40} {}\n",
                analysis.as_str(),
                if cap.eligible { "yes" } else { "no" },
                if cap.missing_fields.is_empty() {
                    "-".to_string()
                } else {
                    cap.missing_fields.join(", ")
                },
                cap.usable_columns.join(", ")
            ));
        }
        out
    }
}

/// Title, Abstract, or a text column averaging at least
/// [`TEXT_MIN_MEAN_TOKENS`] tokens per non-empty cell.
pub fn is_text_column(info: &ColumnInfo) -> bool {
    info.name == canonical::TITLE
        || info.name == canonical::ABSTRACT
        || (info.kind == ColumnKind::Text && info.mean_tokens >= TEXT_MIN_MEAN_TOKENS)
}

/// Columns whose name contains "keyword", case-insensitively, in catalog order.
pub fn detect_keyword_columns(ds: &Dataset) -> Vec<String> {
    ds.column_names()
        .filter(|n| canonical::is_keyword_column(n))
        .map(String::from)
        .collect()
}

pub fn check_capabilities(ds: &Dataset) -> CapabilityReport {
    let populated = |name: &str| ds.column(name).is_some_and(|c| c.non_empty > 0);

    let keyword_cols: Vec<String> = detect_keyword_columns(ds)
        .into_iter()
        .filter(|c| populated(c))
        .collect();
    let keywords_stem = Capability::from_parts(
        keyword_cols.clone(),
        if keyword_cols.is_empty() {
            vec![canonical::KEYWORDS.to_string()]
        } else {
            Vec::new()
        },
    );

    let text_cols: Vec<String> = ds
        .column_catalog
        .iter()
        .filter(|c| c.non_empty > 0 && is_text_column(c))
        .map(|c| c.name.clone())
        .collect();
    let topic_modeling = Capability::from_parts(
        text_cols.clone(),
        if text_cols.is_empty() {
            vec![canonical::TITLE.to_string(), canonical::ABSTRACT.to_string()]
        } else {
            Vec::new()
        },
    );

    let multi_cols: Vec<String> = ds
        .column_catalog
        .iter()
        .filter(|c| c.kind == ColumnKind::Multivalue && c.non_empty > 0)
        .map(|c| c.name.clone())
        .collect();
    let bidirectional_network = Capability::from_parts(
        multi_cols.clone(),
        if multi_cols.is_empty() {
            vec![canonical::KEYWORDS.to_string()]
        } else {
            Vec::new()
        },
    );

    let (present, missing): (Vec<&str>, Vec<&str>) = canonical::SUNBURST_FIELDS
        .iter()
        .partition(|f| populated(f));
    let sunburst = Capability::from_parts(
        present.into_iter().map(String::from).collect(),
        missing.into_iter().map(String::from).collect(),
    );

    CapabilityReport {
        keywords_stem,
        topic_modeling,
        bidirectional_network,
        sunburst,
    }
}
