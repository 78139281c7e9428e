//! Web of Science plain-text tagged records.
//!
//! ```text
//! FN Clarivate Analytics Web of Science
//! VR 1.0
//! PT J
//! AU Smith, J
//!    Doe, K
//! TI A title that wraps
//!    onto a second line
//! ER
//!
//! EF
//! ```

use super::{FieldMapping, IngestError};

const FILE_TAGS: [&str; 3] = ["FN", "VR", "EF"];

fn tag_of(line: &str) -> Option<&str> {
    let bytes = line.as_bytes();
    if bytes.len() < 2 {
        return None;
    }
    let is_tag_char = |b: u8| b.is_ascii_uppercase() || b.is_ascii_digit();
    if !(bytes[0].is_ascii_uppercase() && is_tag_char(bytes[1])) {
        return None;
    }
    if bytes.len() == 2 || bytes[2] == b' ' {
        Some(&line[..2])
    } else {
        None
    }
}

/// True when the first non-blank line is a tagged field and an `ER`
/// terminator appears somewhere in the file.
pub(super) fn looks_tagged(text: &str) -> bool {
    let Some(first) = text.lines().find(|l| !l.trim().is_empty()) else {
        return false;
    };
    let first = first.trim_start_matches('\u{feff}').trim_end();
    tag_of(first).is_some() && text.lines().any(|l| l.trim_end() == "ER")
}

pub(super) fn parse(
    text: &str,
    mapping: &FieldMapping,
) -> Result<(Vec<String>, Vec<Vec<String>>), IngestError> {
    let mut header: Vec<String> = Vec::new();
    let mut records: Vec<Vec<(String, Vec<String>)>> = Vec::new();
    let mut current: Vec<(String, Vec<String>)> = Vec::new();
    let mut in_file_tag = false;

    for raw in text.lines() {
        let line = raw.trim_start_matches('\u{feff}').trim_end();
        if line.is_empty() {
            continue;
        }
        if line == "ER" {
            if !current.is_empty() {
                records.push(std::mem::take(&mut current));
            }
            in_file_tag = false;
            continue;
        }
        if let Some(tag) = tag_of(line) {
            if FILE_TAGS.contains(&tag) {
                in_file_tag = true;
                continue;
            }
            in_file_tag = false;
            let value = line.get(3..).unwrap_or("").trim().to_string();
            if !header.iter().any(|h| h == tag) {
                header.push(tag.to_string());
            }
            match current.iter_mut().find(|(t, _)| t == tag) {
                Some((_, values)) => values.push(value),
                None => current.push((tag.to_string(), vec![value])),
            }
        } else if line.starts_with(' ') && !in_file_tag {
            match current.last_mut() {
                Some((_, values)) => values.push(line.trim().to_string()),
                None => continue,
            }
        }
    }
    if !current.is_empty() {
        records.push(current);
    }
    if header.is_empty() {
        return Err(IngestError::MissingHeader);
    }

    let rows = records
        .into_iter()
        .map(|fields| {
            header
                .iter()
                .map(|tag| {
                    fields
                        .iter()
                        .find(|(t, _)| t == tag)
                        .map(|(t, values)| {
                            let sep = if mapping.list_tags.contains(t) { "; " } else { " " };
                            values
                                .iter()
                                .filter(|v| !v.is_empty())
                                .cloned()
                                .collect::<Vec<_>>()
                                .join(sep)
                        })
                        .unwrap_or_default()
                })
                .collect()
        })
        .collect();
    Ok((header, rows))
}
