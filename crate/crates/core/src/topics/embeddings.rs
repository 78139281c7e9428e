//! Embedding sidecar files: CSV with header `row_index,v0,v1,...`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("embedding header must be `row_index,v0,v1,...`")]
    BadHeader,
    #[error("line {line}: {message}")]
    BadRow { line: usize, message: String },
    #[error("no embedding for row {0}")]
    MissingRow(usize),
    #[error("duplicate embedding for row {0}")]
    DuplicateRow(usize),
}

/// Parses a sidecar and returns one vector per dataset row, in row order.
pub fn parse_embeddings(text: &str, rows: usize) -> Result<Vec<Vec<f64>>, EmbeddingError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.trim_start_matches('\u{feff}').as_bytes());
    let header = reader.headers().map_err(|_| EmbeddingError::BadHeader)?.clone();
    let dim = header.len().saturating_sub(1);
    let header_ok = header.get(0) == Some("row_index")
        && dim > 0
        && header.iter().skip(1).enumerate().all(|(i, h)| h == format!("v{i}"));
    if !header_ok {
        return Err(EmbeddingError::BadHeader);
    }
    let mut out: Vec<Option<Vec<f64>>> = vec![None; rows];
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| EmbeddingError::BadRow {
            line,
            message: e.to_string(),
        })?;
        if rec.len() != dim + 1 {
            return Err(EmbeddingError::BadRow {
                line,
                message: format!("expected {} fields, found {}", dim + 1, rec.len()),
            });
        }
        let bad = |message: String| EmbeddingError::BadRow { line, message };
        let row: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad row_index `{}`", &rec[0])))?;
        if row >= rows {
            return Err(bad(format!("row_index {row} out of range (dataset has {rows} rows)")));
        }
        let vector = rec
            .iter()
            .skip(1)
            .map(|x| x.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| bad("non-numeric component".into()))?;
        if out[row].replace(vector).is_some() {
            return Err(EmbeddingError::DuplicateRow(row));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or(EmbeddingError::MissingRow(i)))
        .collect()
}
