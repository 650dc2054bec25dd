//! Multi-label evaluation: the seven standard metrics and an ML-kNN
//! classifier for scoring selected feature subsets end to end.

mod metrics;
mod mlknn;

pub use metrics::{
    average_precision, coverage, evaluate_predictions, hamming_loss, macro_f1, micro_f1,
    ranking_loss, Coverage, EvalReport, F1Outcome, RankedMetric,
};
pub use mlknn::{mlknn_fit, mlknn_predict, MlKnn};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("matrix shapes differ: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("matrices must be non-empty")]
    Empty,
    #[error("label matrix entries must be 0 or 1, found {0}")]
    NotBinary(u8),
    #[error("score matrix entries must be finite")]
    NonFiniteScore,
    #[error("ragged row {row}: {len} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("every instance is degenerate for {metric}")]
    Degenerate { metric: &'static str },
    #[error("k = {k} exceeds the number of training instances {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("k must be at least 1")]
    KZero,
}

/// Row-major binary matrix of ground-truth or predicted labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMatrix {
    n_rows: usize,
    n_labels: usize,
    data: Vec<u8>,
}

impl LabelMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self, EvalError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(EvalError::Empty);
        }
        let n_labels = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * n_labels);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_labels {
                return Err(EvalError::RaggedRow {
                    row: i,
                    len: row.len(),
                    expected: n_labels,
                });
            }
            for &v in row {
                if v > 1 {
                    return Err(EvalError::NotBinary(v));
                }
                data.push(v);
            }
        }
        Ok(Self {
            n_rows: rows.len(),
            n_labels,
            data,
        })
    }

    pub fn zeros(n_rows: usize, n_labels: usize) -> Self {
        Self {
            n_rows,
            n_labels,
            data: vec![0; n_rows * n_labels],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn get(&self, row: usize, label: usize) -> u8 {
        self.data[row * self.n_labels + label]
    }

    pub fn set(&mut self, row: usize, label: usize, value: u8) {
        debug_assert!(value <= 1);
        self.data[row * self.n_labels + label] = value;
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.n_labels..(row + 1) * self.n_labels]
    }
}

/// Row-major matrix of real-valued label confidence scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    n_rows: usize,
    n_labels: usize,
    data: Vec<f64>,
}

impl ScoreMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, EvalError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(EvalError::Empty);
        }
        let n_labels = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * n_labels);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_labels {
                return Err(EvalError::RaggedRow {
                    row: i,
                    len: row.len(),
                    expected: n_labels,
                });
            }
            for &v in row {
                if !v.is_finite() {
                    return Err(EvalError::NonFiniteScore);
                }
                data.push(v);
            }
        }
        Ok(Self {
            n_rows: rows.len(),
            n_labels,
            data,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn get(&self, row: usize, label: usize) -> f64 {
        self.data[row * self.n_labels + label]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n_labels..(row + 1) * self.n_labels]
    }
}

fn check_label_shapes(a: &LabelMatrix, b: &LabelMatrix) -> Result<(), EvalError> {
    if a.n_rows != b.n_rows || a.n_labels != b.n_labels {
        return Err(EvalError::ShapeMismatch(
            a.n_rows, a.n_labels, b.n_rows, b.n_labels,
        ));
    }
    Ok(())
}

fn check_score_shape(truth: &LabelMatrix, scores: &ScoreMatrix) -> Result<(), EvalError> {
    if truth.n_rows != scores.n_rows || truth.n_labels != scores.n_labels {
        return Err(EvalError::ShapeMismatch(
            truth.n_rows,
            truth.n_labels,
            scores.n_rows,
            scores.n_labels,
        ));
    }
    Ok(())
}
