//! Per-source field mappings.
//!
//! Each vendor export has its own column names (or two-letter tags for Web of
//! Science). A [`FieldMapping`] renames those to canonical names and carries
//! the header signature used by [`super::detect_source`]. The bundled configs
//! live in `mappings/*.json`; [`MappingSet::load_dir`] reads replacements from
//! disk when a vendor changes its export layout.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IngestError, SourceKind};

/// Canonical field names shared across every source.
pub mod canonical {
    pub const TITLE: &str = "Title";
    pub const ABSTRACT: &str = "Abstract";
    pub const KEYWORDS: &str = "Keywords";
    pub const PUBLICATION_YEAR: &str = "Publication Year";
    pub const CITATIONS: &str = "Citations";
    pub const DOCUMENT_TYPE: &str = "Document Type";
    pub const SOURCE_TITLE: &str = "Source Title";

    /// Fields that must be non-empty somewhere for the sunburst hierarchy.
    pub const SUNBURST_FIELDS: [&str; 4] =
        [PUBLICATION_YEAR, CITATIONS, DOCUMENT_TYPE, SOURCE_TITLE];

    /// Scalar canonical fields; at most one source column may claim each.
    pub const SCALAR_FIELDS: [&str; 6] = [
        TITLE,
        ABSTRACT,
        PUBLICATION_YEAR,
        CITATIONS,
        DOCUMENT_TYPE,
        SOURCE_TITLE,
    ];

    /// True for column names treated as keyword lists.
    pub fn is_keyword_column(name: &str) -> bool {
        name.to_lowercase().contains("keyword")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub columns: Vec<String>,
    #[serde(default)]
    pub required: Vec<String>,
    pub min_matches: usize,
}

impl Signature {
    /// Number of signature columns present in `header`, or `None` if a
    /// required column is absent or fewer than `min_matches` columns match.
    pub fn score(&self, header: &[String]) -> Option<usize> {
        if self.columns.is_empty() {
            return None;
        }
        let present = |c: &String| header.iter().any(|h| h == c);
        if !self.required.iter().all(present) {
            return None;
        }
        let hits = self.columns.iter().filter(|c| present(c)).count();
        (hits >= self.min_matches).then_some(hits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMapping {
    pub version: u32,
    pub kind: SourceKind,
    pub delimiter: String,
    pub signature: Signature,
    /// WoS tagged-format tags whose continuation lines are separate list items.
    #[serde(default)]
    pub list_tags: Vec<String>,
    #[serde(default)]
    pub case_insensitive: bool,
    /// Source column (or tag) to canonical column name.
    pub fields: BTreeMap<String, String>,
}

impl FieldMapping {
    pub fn from_json(text: &str) -> Result<Self, IngestError> {
        let mapping: FieldMapping =
            serde_json::from_str(text).map_err(|e| IngestError::Mapping(e.to_string()))?;
        mapping.validate()?;
        Ok(mapping)
    }

    fn validate(&self) -> Result<(), IngestError> {
        if self.delimiter.chars().count() != 1 {
            return Err(IngestError::Mapping(format!(
                "{} mapping: delimiter must be a single character",
                self.kind
            )));
        }
        Ok(())
    }

    pub fn delimiter_byte(&self) -> u8 {
        self.delimiter.as_bytes()[0]
    }

    /// Renames a source header. Canonical scalar fields are claimed by the
    /// first column that maps to them; later claimants keep their original
    /// name so the mapping stays injective on required fields.
    pub fn rename_header(&self, header: &[String]) -> Vec<String> {
        let lowered: HashMap<String, &String> = if self.case_insensitive {
            self.fields
                .iter()
                .map(|(k, v)| (k.to_lowercase(), v))
                .collect()
        } else {
            HashMap::new()
        };
        let mut claimed: Vec<&String> = Vec::new();
        let mut out = Vec::with_capacity(header.len());
        for col in header {
            let target = self.fields.get(col).or_else(|| {
                if self.case_insensitive {
                    lowered.get(&col.to_lowercase()).copied()
                } else {
                    None
                }
            });
            let name = match target {
                Some(t) if canonical::SCALAR_FIELDS.contains(&t.as_str()) => {
                    if claimed.contains(&t) {
                        col.clone()
                    } else {
                        claimed.push(t);
                        t.clone()
                    }
                }
                Some(t) => t.clone(),
                None => col.clone(),
            };
            out.push(name);
        }
        // Passthrough names may now collide with renamed ones; suffix them.
        let mut seen: HashMap<String, usize> = HashMap::new();
        for name in out.iter_mut() {
            let n = seen.entry(name.clone()).or_insert(0);
            *n += 1;
            if *n > 1 {
                *name = format!("{name} ({n})");
            }
        }
        out
    }
}

/// The full set of mappings used for detection and parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingSet {
    pub scopus: FieldMapping,
    pub wos: FieldMapping,
    pub lens: FieldMapping,
    pub custom: FieldMapping,
}

const SCOPUS_JSON: &str = include_str!("../../mappings/scopus.json");
const WOS_JSON: &str = include_str!("../../mappings/wos.json");
const LENS_JSON: &str = include_str!("../../mappings/lens.json");
const CUSTOM_JSON: &str = include_str!("../../mappings/custom.json");

impl MappingSet {
    /// The mappings compiled into the library.
    pub fn bundled() -> Self {
        Self {
            scopus: FieldMapping::from_json(SCOPUS_JSON).expect("bundled scopus mapping"),
            wos: FieldMapping::from_json(WOS_JSON).expect("bundled wos mapping"),
            lens: FieldMapping::from_json(LENS_JSON).expect("bundled lens mapping"),
            custom: FieldMapping::from_json(CUSTOM_JSON).expect("bundled custom mapping"),
        }
    }

    /// Loads `{scopus,wos,lens,custom}.json` from `dir`, falling back to the
    /// bundled config for any file that is not present.
    pub fn load_dir(dir: &Path) -> Result<Self, IngestError> {
        let mut set = Self::bundled();
        for kind in SourceKind::ALL {
            let path = dir.join(format!("{kind}.json"));
            if !path.exists() {
                continue;
            }
            let text = std::fs::read_to_string(&path)
                .map_err(|e| IngestError::Mapping(format!("{}: {e}", path.display())))?;
            let mapping = FieldMapping::from_json(&text)?;
            if mapping.kind != kind {
                return Err(IngestError::Mapping(format!(
                    "{}: declares kind {} but file is for {kind}",
                    path.display(),
                    mapping.kind
                )));
            }
            *set.get_mut(kind) = mapping;
        }
        Ok(set)
    }

    pub fn get(&self, kind: SourceKind) -> &FieldMapping {
        match kind {
            SourceKind::Scopus => &self.scopus,
            SourceKind::Wos => &self.wos,
            SourceKind::Lens => &self.lens,
            SourceKind::Custom => &self.custom,
        }
    }

    fn get_mut(&mut self, kind: SourceKind) -> &mut FieldMapping {
        match kind {
            SourceKind::Scopus => &mut self.scopus,
            SourceKind::Wos => &mut self.wos,
            SourceKind::Lens => &mut self.lens,
            SourceKind::Custom => &mut self.custom,
        }
    }
}

impl Default for MappingSet {
    fn default() -> Self {
        Self::bundled()
    }
}
