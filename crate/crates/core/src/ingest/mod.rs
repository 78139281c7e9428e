//! Source detection, parsing and normalization of bibliographic exports.
//!
//! Scopus and Lens exports are RFC 4180 CSV; Web of Science comes either as a
//! tab-delimited table keyed by two-letter field tags or as the plain-text
//! tagged record format. Everything is normalized into a [`Dataset`] of
//! [`BiblioRecord`]s with canonical column names.

pub mod mapping;
mod tagged;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mapping::{canonical, FieldMapping, MappingSet, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IngestError {
    #[error("file is not valid UTF-8 (only UTF-8 and UTF-8 with BOM are accepted)")]
    UndecodableFile,
    #[error("file is empty")]
    EmptyFile,
    #[error("malformed row {row} (line {line}): expected {expected} columns, found {found}")]
    MalformedRow {
        row: usize,
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("missing header row")]
    MissingHeader,
    #[error("mapping config: {0}")]
    Mapping(String),
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Scopus,
    Wos,
    Lens,
    Custom,
}

impl SourceKind {
    pub const ALL: [SourceKind; 4] = [Self::Scopus, Self::Wos, Self::Lens, Self::Custom];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Scopus => "scopus",
            Self::Wos => "wos",
            Self::Lens => "lens",
            Self::Custom => "custom",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown source kind `{s}`"))
    }
}

/// One bibliographic row with canonical fields pulled out.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiblioRecord {
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub keyword_fields: BTreeMap<String, Vec<String>>,
    pub publication_year: Option<i32>,
    pub citations: Option<u64>,
    pub document_type: Option<String>,
    pub source_title: Option<String>,
    pub extra: BTreeMap<String, String>,
}

impl BiblioRecord {
    /// Renders the named column as text, `None` when absent or empty.
    pub fn cell(&self, column: &str) -> Option<String> {
        use canonical::*;
        let nonempty = |s: &String| (!s.is_empty()).then(|| s.clone());
        match column {
            TITLE => nonempty(&self.title),
            ABSTRACT => self.abstract_text.as_ref().and_then(nonempty),
            PUBLICATION_YEAR => self.publication_year.map(|y| y.to_string()),
            CITATIONS => self.citations.map(|c| c.to_string()),
            DOCUMENT_TYPE => self.document_type.as_ref().and_then(nonempty),
            SOURCE_TITLE => self.source_title.as_ref().and_then(nonempty),
            _ => {
                if let Some(list) = self.keyword_fields.get(column) {
                    (!list.is_empty()).then(|| list.join("; "))
                } else {
                    self.extra.get(column).and_then(nonempty)
                }
            }
        }
    }

    /// Column names this record carries a value for.
    pub fn present_columns(&self) -> Vec<String> {
        use canonical::*;
        let mut out = Vec::new();
        for name in SCALAR_FIELDS {
            if self.cell(name).is_some() {
                out.push(name.to_string());
            }
        }
        out.extend(self.keyword_fields.keys().cloned());
        out.extend(self.extra.keys().cloned());
        out
    }

    /// Stores a raw cell under a canonical or passthrough column name.
    /// Returns a message when a numeric field could not be parsed.
    pub fn set_cell(&mut self, column: &str, raw: &str) -> Option<String> {
        use canonical::*;
        let value = raw.trim();
        if value.is_empty() {
            return None;
        }
        match column {
            TITLE => self.title = value.to_string(),
            ABSTRACT => self.abstract_text = Some(value.to_string()),
            PUBLICATION_YEAR => match parse_year(value) {
                Some(y) => self.publication_year = Some(y),
                None => return Some(format!("`{value}` is not a 4-digit year")),
            },
            CITATIONS => match value.parse::<u64>() {
                Ok(c) => self.citations = Some(c),
                Err(_) => return Some(format!("`{value}` is not a non-negative citation count")),
            },
            DOCUMENT_TYPE => self.document_type = Some(value.to_string()),
            SOURCE_TITLE => self.source_title = Some(value.to_string()),
            _ if canonical::is_keyword_column(column) => {
                let list = split_multivalue(value, ';');
                if !list.is_empty() {
                    self.keyword_fields.insert(column.to_string(), list);
                }
            }
            _ => {
                self.extra.insert(column.to_string(), value.to_string());
            }
        }
        None
    }

    pub fn has_title(&self) -> bool {
        !self.title.is_empty()
    }
}

fn parse_year(value: &str) -> Option<i32> {
    (value.len() == 4 && value.bytes().all(|b| b.is_ascii_digit()))
        .then(|| value.parse().ok())
        .flatten()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Text,
    Numeric,
    Year,
    Multivalue,
}

/// Catalog entry with the per-column statistics the file checker needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnInfo {
    pub name: String,
    pub kind: ColumnKind,
    pub non_empty: usize,
    pub semicolon_cells: usize,
    /// Mean whitespace-token count over non-empty cells.
    pub mean_tokens: f64,
}

/// A non-fatal problem found while parsing one cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowWarning {
    pub row: usize,
    pub column: String,
    pub message: String,
}

/// Immutable table of records plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<BiblioRecord>,
    pub source: SourceKind,
    pub column_catalog: Vec<ColumnInfo>,
    pub row_count: usize,
    pub warnings: Vec<RowWarning>,
}

impl Dataset {
    /// Builds a dataset and its column catalog. `columns` fixes catalog
    /// order; columns found in records but not listed are appended.
    pub fn new(records: Vec<BiblioRecord>, source: SourceKind, columns: Vec<String>) -> Self {
        let mut order = columns;
        for rec in &records {
            for col in rec.present_columns() {
                if !order.contains(&col) {
                    order.push(col);
                }
            }
        }
        let column_catalog = order
            .into_iter()
            .map(|name| column_info(&records, name))
            .collect();
        Self {
            row_count: records.len(),
            records,
            source,
            column_catalog,
            warnings: Vec::new(),
        }
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.column_catalog.iter().map(|c| c.name.as_str())
    }

    pub fn column(&self, name: &str) -> Option<&ColumnInfo> {
        self.column_catalog.iter().find(|c| c.name == name)
    }

    /// Cells of one column in row order.
    pub fn cells<'a>(&'a self, column: &'a str) -> impl Iterator<Item = Option<String>> + 'a {
        self.records.iter().map(move |r| r.cell(column))
    }

    /// Row indices retained without a title.
    pub fn rows_missing_title(&self) -> Vec<usize> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.has_title())
            .map(|(i, _)| i)
            .collect()
    }

    /// A copy without the named columns (catalog recomputed).
    pub fn without_columns(&self, drop: &[&str]) -> Dataset {
        let records = self
            .records
            .iter()
            .map(|r| {
                let mut out = BiblioRecord::default();
                for col in r.present_columns() {
                    if !drop.contains(&col.as_str()) {
                        if let Some(v) = r.cell(&col) {
                            out.set_cell(&col, &v);
                        }
                    }
                }
                out
            })
            .collect();
        let cols = self
            .column_names()
            .filter(|c| !drop.contains(c))
            .map(String::from)
            .collect();
        Dataset::new(records, self.source, cols)
    }
}

fn column_info(records: &[BiblioRecord], name: String) -> ColumnInfo {
    let mut non_empty = 0usize;
    let mut semicolon_cells = 0usize;
    let mut tokens = 0usize;
    let mut all_numeric = true;
    for rec in records {
        let Some(cell) = rec.cell(&name) else { continue };
        non_empty += 1;
        if cell.contains(';') {
            semicolon_cells += 1;
        }
        tokens += cell.split_whitespace().count();
        if cell.trim().parse::<f64>().is_err() {
            all_numeric = false;
        }
    }
    let kind = if name == canonical::PUBLICATION_YEAR {
        ColumnKind::Year
    } else if name == canonical::CITATIONS || (non_empty > 0 && all_numeric) {
        ColumnKind::Numeric
    } else if non_empty > 0 && semicolon_cells * 10 >= non_empty {
        ColumnKind::Multivalue
    } else {
        ColumnKind::Text
    };
    ColumnInfo {
        name,
        kind,
        non_empty,
        semicolon_cells,
        mean_tokens: if non_empty == 0 {
            0.0
        } else {
            tokens as f64 / non_empty as f64
        },
    }
}

/// Splits a semicolon-delimited cell into trimmed, non-empty tokens.
pub fn split_multivalue(cell: &str, delimiter: char) -> Vec<String> {
    cell.split(delimiter)
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

/// Strips a UTF-8 BOM and validates the encoding.
pub fn decode(raw: &[u8]) -> Result<&str, IngestError> {
    let bytes = raw.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(raw);
    let text = std::str::from_utf8(bytes).map_err(|_| IngestError::UndecodableFile)?;
    if text.trim().is_empty() {
        return Err(IngestError::EmptyFile);
    }
    Ok(text)
}

fn first_line(text: &str) -> &str {
    text.lines()
        .find(|l| !l.trim().is_empty())
        .unwrap_or("")
        .trim_end_matches('\r')
}

fn read_header(text: &str) -> Result<Vec<String>, IngestError> {
    let line = first_line(text);
    if line.contains('\t') {
        return Ok(trim_header(line.split('\t').map(String::from).collect()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(line.as_bytes());
    let mut record = csv::StringRecord::new();
    match reader.read_record(&mut record) {
        Ok(true) => Ok(trim_header(record.iter().map(String::from).collect())),
        Ok(false) => Err(IngestError::MissingHeader),
        Err(e) => Err(IngestError::Csv(e.to_string())),
    }
}

fn trim_header(mut cols: Vec<String>) -> Vec<String> {
    for c in cols.iter_mut() {
        *c = c.trim().to_string();
    }
    while cols.last().is_some_and(|c| c.is_empty()) {
        cols.pop();
    }
    cols
}

/// Identifies which database produced a file.
///
/// `filename` is accepted for diagnostics; detection is driven by content.
pub fn detect_source(
    raw: &[u8],
    _filename: &str,
    mappings: &MappingSet,
) -> Result<SourceKind, IngestError> {
    let text = decode(raw)?;
    if tagged::looks_tagged(text) {
        return Ok(SourceKind::Wos);
    }
    let header = read_header(text)?;
    let mut best: Option<(usize, SourceKind)> = None;
    for kind in [SourceKind::Scopus, SourceKind::Wos, SourceKind::Lens] {
        let mapping = mappings.get(kind);
        // WoS tables are tab-delimited; don't match a comma file on tags.
        if kind == SourceKind::Wos && !first_line(text).contains('\t') {
            continue;
        }
        if let Some(score) = mapping.signature.score(&header) {
            if best.is_none_or(|(b, _)| score > b) {
                best = Some((score, kind));
            }
        }
    }
    Ok(best.map_or(SourceKind::Custom, |(_, k)| k))
}

/// Parses a file of the given kind into a [`Dataset`].
pub fn parse_dataset(
    raw: &[u8],
    kind: SourceKind,
    mappings: &MappingSet,
) -> Result<Dataset, IngestError> {
    let text = decode(raw)?;
    let mapping = mappings.get(kind);
    let (header, rows) = if kind == SourceKind::Wos && tagged::looks_tagged(text) {
        tagged::parse(text, mapping)?
    } else {
        let line = first_line(text);
        let delimiter = if kind == SourceKind::Wos || (line.contains('\t') && !line.contains(',')) {
            b'\t'
        } else {
            mapping.delimiter_byte()
        };
        parse_delimited(text, delimiter)?
    };
    if header.is_empty() {
        return Err(IngestError::MissingHeader);
    }
    let columns = mapping.rename_header(&header);
    let mut warnings = Vec::new();
    let records = rows
        .iter()
        .enumerate()
        .map(|(row, cells)| {
            let mut rec = BiblioRecord::default();
            for (col, cell) in columns.iter().zip(cells) {
                if let Some(message) = rec.set_cell(col, cell) {
                    warnings.push(RowWarning {
                        row,
                        column: col.clone(),
                        message,
                    });
                }
            }
            rec
        })
        .collect();
    let mut ds = Dataset::new(records, kind, columns);
    ds.warnings = warnings;
    Ok(ds)
}

/// Detects the source kind, then parses.
pub fn load_dataset(raw: &[u8], filename: &str, mappings: &MappingSet) -> Result<Dataset, IngestError> {
    let kind = detect_source(raw, filename, mappings)?;
    parse_dataset(raw, kind, mappings)
}

fn parse_delimited(text: &str, delimiter: u8) -> Result<(Vec<String>, Vec<Vec<String>>), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .quoting(delimiter != b'\t')
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = loop {
        match records.next() {
            None => return Err(IngestError::MissingHeader),
            Some(Err(e)) => return Err(IngestError::Csv(e.to_string())),
            Some(Ok(r)) if r.iter().all(|c| c.trim().is_empty()) => continue,
            Some(Ok(r)) => break trim_header(r.iter().map(String::from).collect()),
        }
    };
    let width = header.len();
    let mut rows = Vec::new();
    for result in records {
        let record = result.map_err(|e| IngestError::Csv(e.to_string()))?;
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let mut cells: Vec<String> = record.iter().map(String::from).collect();
        // Trailing delimiters (common in WoS tables) only add empty cells.
        while cells.len() > width && cells.last().is_some_and(|c| c.trim().is_empty()) {
            cells.pop();
        }
        if cells.len() != width {
            return Err(IngestError::MalformedRow {
                row: rows.len(),
                line: record.position().map_or(0, |p| p.line()),
                expected: width,
                found: cells.len(),
            });
        }
        rows.push(cells);
    }
    Ok((header, rows))
}

/// Serializes a dataset as CSV with canonical column names.
pub fn to_canonical_csv(ds: &Dataset) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let names: Vec<&str> = ds.column_names().collect();
    writer.write_record(&names).expect("write to Vec");
    for rec in &ds.records {
        let row: Vec<String> = names
            .iter()
            .map(|n| rec.cell(n).unwrap_or_default())
            .collect();
        writer.write_record(&row).expect("write to Vec");
    }
    String::from_utf8(writer.into_inner().expect("flush Vec")).expect("csv output is UTF-8")
}
