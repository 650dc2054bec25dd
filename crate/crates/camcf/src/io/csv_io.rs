//! CSV ingestion and emission. Files carry a header row; cells are integer
//! codes or real numbers; empty cells and `?` are treated as missing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{assemble_dataset, IngestError, IngestOptions, RawColumn, RawTable};
use crate::data::Dataset;

enum Cell {
    Integer(i64),
    Float(f64),
    Missing,
}

fn parse_cell(text: &str) -> Option<Cell> {
    let text = text.trim();
    if text.is_empty() || text == "?" {
        return Some(Cell::Missing);
    }
    if let Ok(v) = text.parse::<i64>() {
        return Some(Cell::Integer(v));
    }
    if let Ok(v) = text.parse::<f64>() {
        if v.is_finite() {
            return Some(Cell::Float(v));
        }
    }
    None
}

pub fn load_csv_with(path: impl AsRef<Path>, options: &IngestOptions) -> Result<Dataset, IngestError> {
    let path = path.as_ref();
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_path(path)?;
    let names: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if names.is_empty() {
        return Err(IngestError::Empty {
            path: path.display().to_string(),
        });
    }

    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut missing_rows: Vec<usize> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row_number = i + 1; // 1-based data rows, header excluded
        if record.len() != names.len() {
            return Err(IngestError::Ragged {
                row: row_number,
                got: record.len(),
                expected: names.len(),
            });
        }
        let mut row = Vec::with_capacity(names.len());
        let mut has_missing = false;
        for (column, cell) in record.iter().enumerate() {
            match parse_cell(cell) {
                Some(Cell::Missing) => {
                    has_missing = true;
                    row.push(Cell::Missing);
                }
                Some(parsed) => row.push(parsed),
                None => {
                    return Err(IngestError::NonNumeric {
                        row: row_number,
                        column: names[column].clone(),
                        value: cell.to_string(),
                    });
                }
            }
        }
        if has_missing {
            missing_rows.push(row_number);
        }
        rows.push(row);
    }
    if !missing_rows.is_empty() {
        missing_rows.truncate(10);
        return Err(IngestError::MissingValues { rows: missing_rows });
    }
    if rows.is_empty() {
        return Err(IngestError::Empty {
            path: path.display().to_string(),
        });
    }

    // a column is integer only if every cell parsed as an integer
    let mut columns = Vec::with_capacity(names.len());
    for c in 0..names.len() {
        let all_integer = rows.iter().all(|row| matches!(row[c], Cell::Integer(_)));
        let column = if all_integer {
            RawColumn::Integer(
                rows.iter()
                    .map(|row| match row[c] {
                        Cell::Integer(v) => v,
                        _ => unreachable!(),
                    })
                    .collect(),
            )
        } else {
            RawColumn::Continuous(
                rows.iter()
                    .map(|row| match row[c] {
                        Cell::Integer(v) => v as f64,
                        Cell::Float(v) => v,
                        Cell::Missing => unreachable!("missing rows rejected above"),
                    })
                    .collect(),
            )
        };
        columns.push(column);
    }

    assemble_dataset(RawTable { names, columns }, options)
}

/// Writes the dataset as CSV: header of feature names then label names,
/// then one row of integer codes per sample.
pub fn write_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let mut out = BufWriter::new(File::create(path)?);
    let header: Vec<&str> = dataset
        .feature_names()
        .iter()
        .chain(dataset.label_names().iter())
        .map(String::as_str)
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for row in 0..dataset.n_samples() {
        let mut cells: Vec<String> = Vec::with_capacity(header.len());
        for f in 0..dataset.n_features() {
            cells.push(dataset.feature(f).codes()[row].to_string());
        }
        for l in 0..dataset.n_labels() {
            cells.push(dataset.label(l).codes()[row].to_string());
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}
