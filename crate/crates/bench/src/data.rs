//! CSV ingestion and export.
//!
//! Loading drops every row with a missing or non-numeric cell in a retained
//! column, and removes the requested feature columns (identifiers, labels,
//! and so on). Surviving rows keep their original 0-based data-row number as
//! point id.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use kmpp::Dataset;

use crate::error::HarnessError;

/// A column to drop, by header name or by 0-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for ColumnRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub header: bool,
    pub drop_columns: Vec<ColumnRef>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            header: true,
            drop_columns: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadSummary {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub columns_kept: Vec<String>,
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<(Dataset, LoadSummary), HarnessError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_csv(file, options)
}

pub fn read_csv<R: std::io::Read>(reader: R, options: &CsvOptions) -> Result<(Dataset, LoadSummary), HarnessError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.header)
        .flexible(true)
        .from_reader(reader);

    let headers: Option<Vec<String>> = if options.header {
        Some(rdr.headers()?.iter().map(|h| h.trim().to_string()).collect())
    } else {
        None
    };

    let mut width = headers.as_ref().map(Vec::len);
    let mut keep: Option<Vec<usize>> = None;
    let mut data = Vec::new();
    let mut ids = Vec::new();
    let mut rows_read = 0;
    let mut rows_dropped = 0;

    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        rows_read += 1;
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(HarnessError::Load {
                row,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        let keep = match &keep {
            Some(k) => k,
            None => keep.insert(retained_columns(expected, headers.as_deref(), &options.drop_columns)?),
        };
        let parsed: Option<Vec<f64>> = keep
            .iter()
            .map(|&c| record[c].trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect();
        match parsed {
            Some(values) => {
                data.extend(values);
                ids.push(row);
            }
            None => rows_dropped += 1,
        }
    }

    let keep = keep.unwrap_or_default();
    if ids.is_empty() {
        return Err(HarnessError::NoRows { dropped: rows_dropped });
    }
    let columns_kept = keep
        .iter()
        .map(|&c| headers.as_ref().map_or_else(|| c.to_string(), |h| h[c].clone()))
        .collect();
    let ds = Dataset::with_ids(keep.len(), data, ids)?;
    Ok((
        ds,
        LoadSummary {
            rows_read,
            rows_dropped,
            columns_kept,
        },
    ))
}

fn retained_columns(width: usize, headers: Option<&[String]>, drop: &[ColumnRef]) -> Result<Vec<usize>, HarnessError> {
    let mut dropped = vec![false; width];
    for col in drop {
        let idx = match col {
            ColumnRef::Index(i) => *i,
            ColumnRef::Name(name) => {
                headers
                    .and_then(|h| h.iter().position(|x| x == name))
                    .ok_or_else(|| HarnessError::Load {
                        row: 0,
                        message: format!("no column named '{name}'"),
                    })?
            }
        };
        if idx >= width {
            return Err(HarnessError::Load {
                row: 0,
                message: format!("column {idx} out of range (width {width})"),
            });
        }
        dropped[idx] = true;
    }
    let keep: Vec<usize> = (0..width).filter(|&c| !dropped[c]).collect();
    if keep.is_empty() {
        return Err(HarnessError::NoColumns);
    }
    Ok(keep)
}

/// Float formatting used by every emitted file: 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the dataset as CSV with a `x0..x{d-1}` header.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_csv_to(ds, &mut out).map_err(|e| HarnessError::io(path, e))?;
    out.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_csv_to<W: Write>(ds: &Dataset, out: &mut W) -> std::io::Result<()> {
    let header: Vec<String> = (0..ds.d()).map(|j| format!("x{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in ds.rows() {
        let cells: Vec<String> = row.iter().map(|&v| format_f64(v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
