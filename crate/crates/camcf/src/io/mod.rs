//! Dataset ingestion and serialization.
//!
//! Both loaders produce the same intermediate raw table: integer columns
//! pass through as category codes (canonicalized to `0..distinct` in value
//! order), non-integer numeric columns are discretized by equal-frequency
//! binning, and rows with missing cells reject the load with their row
//! numbers. Label columns must be integer-coded.

mod arff;
mod csv_io;

pub use arff::load_arff_with;
pub use csv_io::{load_csv_with, write_csv};

use std::path::Path;

use thiserror::Error;

use crate::data::{DataError, Dataset, DiscreteColumn};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv parse error: {0}")]
    Csv(#[from] ::csv::Error),
    #[error("{path}: file contains no data rows")]
    Empty { path: String },
    #[error("data row {row} has {got} cells, expected {expected}")]
    Ragged {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("missing cells in data rows {rows:?}; rows with missing values are rejected")]
    MissingValues { rows: Vec<usize> },
    #[error("{labels} label columns requested but the file has only {columns} columns")]
    TooManyLabelColumns { labels: usize, columns: usize },
    #[error("data row {row}, column {column:?}: {value:?} is not numeric")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("label column {name:?} must be integer-coded")]
    LabelNotInteger { name: String },
    #[error("no column named {name:?}")]
    UnknownColumn { name: String },
    #[error("label selector matches no columns")]
    NoLabelColumns,
    #[error("line {line}: malformed attribute declaration: {text}")]
    BadAttribute { line: usize, text: String },
    #[error("line {line}: unsupported attribute type {type_name:?}")]
    UnsupportedAttributeType { line: usize, type_name: String },
    #[error("line {line}: value {value:?} is not declared for attribute {attribute:?}")]
    UnknownNominalValue {
        line: usize,
        attribute: String,
        value: String,
    },
    #[error("line {line}: sparse index {index} out of range for {count} attributes")]
    SparseIndexOutOfRange {
        line: usize,
        index: usize,
        count: usize,
    },
    #[error("missing @data section")]
    MissingDataSection,
    #[error(transparent)]
    Data(#[from] DataError),
}

/// How label columns are identified inside a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelSelector {
    /// The last `n` columns are labels.
    LastColumns(usize),
    /// Columns with these exact names are labels.
    Names(Vec<String>),
    /// Columns whose name starts with this prefix are labels.
    Prefix(String),
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub labels: LabelSelector,
    /// Bin count for equal-frequency discretization of continuous columns.
    pub bins: usize,
}

impl IngestOptions {
    pub fn last_columns(n: usize) -> Self {
        Self {
            labels: LabelSelector::LastColumns(n),
            bins: 5,
        }
    }
}

/// Loads a CSV file whose last `n_label_columns` columns are labels,
/// discretizing continuous features into 5 equal-frequency bins.
pub fn load_csv(path: impl AsRef<Path>, n_label_columns: usize) -> Result<Dataset, IngestError> {
    load_csv_with(path, &IngestOptions::last_columns(n_label_columns))
}

/// Loads an ARFF file whose last `n_label_columns` attributes are labels.
pub fn load_arff(path: impl AsRef<Path>, n_label_columns: usize) -> Result<Dataset, IngestError> {
    load_arff_with(path, &IngestOptions::last_columns(n_label_columns))
}

/// Loads a file by extension: `.arff` goes to the ARFF parser, everything
/// else is treated as CSV.
pub fn load_dataset(path: impl AsRef<Path>, options: &IngestOptions) -> Result<Dataset, IngestError> {
    let path = path.as_ref();
    let is_arff = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("arff"));
    if is_arff {
        load_arff_with(path, options)
    } else {
        load_csv_with(path, options)
    }
}

/// One parsed column before code assignment.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum RawColumn {
    Integer(Vec<i64>),
    Continuous(Vec<f64>),
}

#[derive(Debug, Clone)]
pub(crate) struct RawTable {
    pub names: Vec<String>,
    pub columns: Vec<RawColumn>,
}

/// Equal-frequency discretization with linear-interpolation quantile cuts.
/// Values equal to a cut point fall into the lower bin; codes are densified
/// so the arity equals the number of non-empty bins. Constant columns map to
/// a single code.
pub fn discretize_equal_frequency(values: &[f64], bins: usize) -> DiscreteColumn {
    assert!(bins >= 1, "bins must be at least 1");
    if values.is_empty() {
        return DiscreteColumn::from_codes(Vec::new());
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let cuts: Vec<f64> = (1..bins)
        .map(|i| {
            let h = (i as f64 / bins as f64) * (sorted.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo as f64)
        })
        .collect();
    let raw: Vec<u32> = values
        .iter()
        .map(|&v| cuts.iter().filter(|&&c| c < v).count() as u32)
        .collect();
    densify(&raw)
}

/// Remaps codes to `0..distinct` preserving value order.
pub(crate) fn densify(raw: &[u32]) -> DiscreteColumn {
    let mut distinct: Vec<u32> = raw.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let codes: Vec<u32> = raw
        .iter()
        .map(|v| distinct.binary_search(v).expect("value present") as u32)
        .collect();
    DiscreteColumn::new(codes, distinct.len().max(1) as u32).expect("dense codes")
}

fn densify_i64(raw: &[i64]) -> DiscreteColumn {
    let mut distinct: Vec<i64> = raw.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let codes: Vec<u32> = raw
        .iter()
        .map(|v| distinct.binary_search(v).expect("value present") as u32)
        .collect();
    DiscreteColumn::new(codes, distinct.len().max(1) as u32).expect("dense codes")
}

/// Splits a raw table into a [`Dataset`], assigning codes per column.
pub(crate) fn assemble_dataset(
    table: RawTable,
    options: &IngestOptions,
) -> Result<Dataset, IngestError> {
    let n_columns = table.names.len();
    let label_mask: Vec<bool> = match &options.labels {
        LabelSelector::LastColumns(n) => {
            if *n >= n_columns {
                return Err(IngestError::TooManyLabelColumns {
                    labels: *n,
                    columns: n_columns,
                });
            }
            (0..n_columns).map(|i| i >= n_columns - n).collect()
        }
        LabelSelector::Names(names) => {
            for name in names {
                if !table.names.contains(name) {
                    return Err(IngestError::UnknownColumn { name: name.clone() });
                }
            }
            table.names.iter().map(|n| names.contains(n)).collect()
        }
        LabelSelector::Prefix(prefix) => table
            .names
            .iter()
            .map(|n| n.starts_with(prefix.as_str()))
            .collect(),
    };
    if label_mask.iter().all(|&is_label| !is_label) {
        return Err(IngestError::NoLabelColumns);
    }
    if label_mask.iter().all(|&is_label| is_label) {
        return Err(IngestError::TooManyLabelColumns {
            labels: n_columns,
            columns: n_columns,
        });
    }

    let mut feature_columns = Vec::new();
    let mut feature_names = Vec::new();
    let mut label_columns = Vec::new();
    let mut label_names = Vec::new();
    for ((name, column), is_label) in table.names.into_iter().zip(table.columns).zip(label_mask) {
        if is_label {
            match column {
                RawColumn::Integer(values) => {
                    label_columns.push(densify_i64(&values));
                    label_names.push(name);
                }
                RawColumn::Continuous(_) => {
                    return Err(IngestError::LabelNotInteger { name });
                }
            }
        } else {
            let column = match column {
                RawColumn::Integer(values) => densify_i64(&values),
                RawColumn::Continuous(values) => {
                    discretize_equal_frequency(&values, options.bins)
                }
            };
            feature_columns.push(column);
            feature_names.push(name);
        }
    }
    Ok(Dataset::new(
        feature_columns,
        label_columns,
        feature_names,
        label_names,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_frequency_splits_at_the_median() {
        let col = discretize_equal_frequency(&[1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(col.codes(), &[0, 0, 1, 1]);
    }

    #[test]
    fn constant_column_gets_single_code() {
        let col = discretize_equal_frequency(&[3.5, 3.5, 3.5], 4);
        assert_eq!(col.codes(), &[0, 0, 0]);
        assert_eq!(col.arity(), 1);
    }

    #[test]
    fn boundary_ties_fall_into_the_lower_bin() {
        // the median cut lands on 1.0, so the three 1.0 entries stay low
        let col = discretize_equal_frequency(&[1.0, 1.0, 1.0, 2.0], 2);
        assert_eq!(col.codes(), &[0, 0, 0, 1]);
    }

    #[test]
    fn discretization_is_deterministic() {
        let values = [0.3, -1.2, 5.0, 2.2, 2.2, 0.0, 9.1];
        let a = discretize_equal_frequency(&values, 3);
        let b = discretize_equal_frequency(&values, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn densify_preserves_value_order() {
        let col = densify(&[7, 2, 7, 9]);
        assert_eq!(col.codes(), &[1, 0, 1, 2]);
        assert_eq!(col.arity(), 3);
    }
}
