//! CSV ingestion.
//!
//! One sample per row, comma separated, UTF-8. Every column is numeric except
//! the label column, which may hold arbitrary strings; labels are remapped to
//! `0..n_classes` in order of first appearance.

use std::collections::HashMap;
use std::path::Path;

use rml_core::{DataPoint, LabeledDataset};

use crate::error::{Result, RmlError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
    /// The rightmost column.
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Integers select by index, `last` the final column, anything else a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) if s == "last" => LabelColumn::Last,
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
            LabelColumn::Last => f.write_str("last"),
        }
    }
}

/// A dataset together with the original label strings, indexed by class id.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub data: LabeledDataset,
    pub class_names: Vec<String>,
}

pub fn load_csv(path: &Path, label: &LabelColumn, has_header: bool) -> Result<LoadedDataset> {
    let file = std::fs::File::open(path).map_err(|e| RmlError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(file);

    let header_row = usize::from(has_header);
    let mut label_idx = match label {
        LabelColumn::Index(i) => Some(*i),
        LabelColumn::Last => None,
        LabelColumn::Name(name) => {
            if !has_header {
                return Err(RmlError::parse(
                    path,
                    1,
                    format!("label column {name:?} named but file has no header"),
                ));
            }
            let headers = reader
                .headers()
                .map_err(|e| RmlError::parse(path, 1, e.to_string()))?;
            Some(
                headers
                    .iter()
                    .position(|h| h.trim() == name)
                    .ok_or_else(|| {
                        RmlError::parse(path, 1, format!("unknown label column {name:?}"))
                    })?,
            )
        }
    };

    let mut width = None;
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut class_ids: HashMap<String, usize> = HashMap::new();
    let mut class_names = Vec::new();

    for (i, record) in reader.records().enumerate() {
        let row = i + 1 + header_row;
        let record = record.map_err(|e| RmlError::parse(path, row, e.to_string()))?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(RmlError::parse(
                path,
                row,
                format!("expected {w} fields, found {}", record.len()),
            ));
        }
        let li = *label_idx.get_or_insert(w.saturating_sub(1));
        if li >= w {
            return Err(RmlError::parse(
                path,
                row,
                format!("label column {li} out of range for {w} fields"),
            ));
        }
        if w < 2 {
            return Err(RmlError::parse(
                path,
                row,
                "need at least one feature column and a label column",
            ));
        }

        let mut features = Vec::with_capacity(w - 1);
        for (j, field) in record.iter().enumerate() {
            if j == li {
                continue;
            }
            let v: f64 = field.trim().parse().map_err(|_| {
                RmlError::parse(
                    path,
                    row,
                    format!("column {j}: non-numeric value {field:?}"),
                )
            })?;
            features.push(v);
        }
        let point =
            DataPoint::new(features).map_err(|e| RmlError::parse(path, row, e.to_string()))?;

        let name = record[li].trim().to_string();
        let next = class_ids.len();
        let id = *class_ids.entry(name.clone()).or_insert_with(|| {
            class_names.push(name);
            next
        });
        points.push(point);
        labels.push(id);
    }

    if points.is_empty() {
        return Err(RmlError::parse(path, header_row + 1, "no data rows"));
    }
    let n_classes = class_names.len();
    let data = LabeledDataset::with_classes(points, labels, n_classes)
        .map_err(|e| RmlError::parse(path, header_row + 1, e.to_string()))?;
    Ok(LoadedDataset { data, class_names })
}
