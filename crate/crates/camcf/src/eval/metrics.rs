//! The seven multi-label metrics.
//!
//! Ranking is 1-based over descending scores with ties broken by ascending
//! label index. Instances without a relevant label are excluded from the
//! ranking metrics (ranking loss additionally excludes instances without an
//! irrelevant label); the exclusion counts travel with the results. A label
//! whose F1 denominator is zero contributes 0 and is counted as degenerate.

use serde::{Deserialize, Serialize};

use super::{check_label_shapes, check_score_shape, EvalError, LabelMatrix, ScoreMatrix};

/// A ranking-based metric value plus the number of excluded instances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedMetric {
    pub value: f64,
    pub excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub raw: f64,
    pub normalized: f64,
    pub excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Outcome {
    pub value: f64,
    pub degenerate_labels: usize,
}

/// Fraction of instance-label pairs where prediction and truth disagree.
pub fn hamming_loss(truth: &LabelMatrix, pred: &LabelMatrix) -> Result<f64, EvalError> {
    check_label_shapes(truth, pred)?;
    let mut wrong = 0usize;
    for row in 0..truth.n_rows() {
        for label in 0..truth.n_labels() {
            if truth.get(row, label) != pred.get(row, label) {
                wrong += 1;
            }
        }
    }
    Ok(wrong as f64 / (truth.n_rows() * truth.n_labels()) as f64)
}

/// Fraction of instances whose entire label vector is predicted exactly.
pub fn subset_accuracy(truth: &LabelMatrix, pred: &LabelMatrix) -> Result<f64, EvalError> {
    check_label_shapes(truth, pred)?;
    let exact = (0..truth.n_rows())
        .filter(|&row| truth.row(row) == pred.row(row))
        .count();
    Ok(exact as f64 / truth.n_rows() as f64)
}

/// 1-based rank of each label under descending score, ascending label index
/// on ties.
fn ranks(scores: &[f64]) -> Vec<usize> {
    let l = scores.len();
    let mut ranks = vec![0usize; l];
    for label in 0..l {
        let mut rank = 1;
        for other in 0..l {
            if scores[other] > scores[label] || (scores[other] == scores[label] && other < label) {
                rank += 1;
            }
        }
        ranks[label] = rank;
    }
    ranks
}

/// Mean over instances of the average, over relevant labels, of the fraction
/// of labels at or above each relevant label's rank that are themselves
/// relevant.
pub fn average_precision(
    truth: &LabelMatrix,
    scores: &ScoreMatrix,
) -> Result<RankedMetric, EvalError> {
    check_score_shape(truth, scores)?;
    let mut total = 0.0;
    let mut included = 0usize;
    for row in 0..truth.n_rows() {
        let relevant: Vec<usize> = (0..truth.n_labels())
            .filter(|&l| truth.get(row, l) == 1)
            .collect();
        if relevant.is_empty() {
            continue;
        }
        let row_ranks = ranks(scores.row(row));
        let mut instance = 0.0;
        for &l in &relevant {
            let above = relevant
                .iter()
                .filter(|&&l2| row_ranks[l2] <= row_ranks[l])
                .count();
            instance += above as f64 / row_ranks[l] as f64;
        }
        total += instance / relevant.len() as f64;
        included += 1;
    }
    if included == 0 {
        return Err(EvalError::Degenerate {
            metric: "average_precision",
        });
    }
    Ok(RankedMetric {
        value: total / included as f64,
        excluded: truth.n_rows() - included,
    })
}

/// Mean number of ranked steps needed to cover every relevant label,
/// reported raw (up to L-1) and normalized by the label count.
pub fn coverage(truth: &LabelMatrix, scores: &ScoreMatrix) -> Result<Coverage, EvalError> {
    check_score_shape(truth, scores)?;
    let mut total = 0.0;
    let mut included = 0usize;
    for row in 0..truth.n_rows() {
        let row_ranks = ranks(scores.row(row));
        let deepest = (0..truth.n_labels())
            .filter(|&l| truth.get(row, l) == 1)
            .map(|l| row_ranks[l])
            .max();
        if let Some(deepest) = deepest {
            total += (deepest - 1) as f64;
            included += 1;
        }
    }
    if included == 0 {
        return Err(EvalError::Degenerate { metric: "coverage" });
    }
    let raw = total / included as f64;
    Ok(Coverage {
        raw,
        normalized: raw / truth.n_labels() as f64,
        excluded: truth.n_rows() - included,
    })
}

/// Fraction of (relevant, irrelevant) label pairs whose scores are ordered
/// wrongly, ties counting as wrong.
pub fn ranking_loss(truth: &LabelMatrix, scores: &ScoreMatrix) -> Result<RankedMetric, EvalError> {
    check_score_shape(truth, scores)?;
    let mut total = 0.0;
    let mut included = 0usize;
    for row in 0..truth.n_rows() {
        let relevant: Vec<usize> = (0..truth.n_labels())
            .filter(|&l| truth.get(row, l) == 1)
            .collect();
        let irrelevant: Vec<usize> = (0..truth.n_labels())
            .filter(|&l| truth.get(row, l) == 0)
            .collect();
        if relevant.is_empty() || irrelevant.is_empty() {
            continue;
        }
        let mut inverted = 0usize;
        for &a in &relevant {
            for &b in &irrelevant {
                if scores.get(row, a) <= scores.get(row, b) {
                    inverted += 1;
                }
            }
        }
        total += inverted as f64 / (relevant.len() * irrelevant.len()) as f64;
        included += 1;
    }
    if included == 0 {
        return Err(EvalError::Degenerate {
            metric: "ranking_loss",
        });
    }
    Ok(RankedMetric {
        value: total / included as f64,
        excluded: truth.n_rows() - included,
    })
}

fn confusion_per_label(truth: &LabelMatrix, pred: &LabelMatrix) -> Vec<(usize, usize, usize)> {
    let mut counts = vec![(0usize, 0usize, 0usize); truth.n_labels()];
    for row in 0..truth.n_rows() {
        for label in 0..truth.n_labels() {
            let (tp, fp, fn_) = &mut counts[label];
            match (truth.get(row, label), pred.get(row, label)) {
                (1, 1) => *tp += 1,
                (0, 1) => *fp += 1,
                (1, 0) => *fn_ += 1,
                _ => {}
            }
        }
    }
    counts
}

/// Arithmetic mean of per-label F1 scores; a label with an empty denominator
/// contributes 0 and is counted.
pub fn macro_f1(truth: &LabelMatrix, pred: &LabelMatrix) -> Result<F1Outcome, EvalError> {
    check_label_shapes(truth, pred)?;
    let counts = confusion_per_label(truth, pred);
    let mut sum = 0.0;
    let mut degenerate = 0usize;
    for (tp, fp, fn_) in counts {
        let denom = 2 * tp + fp + fn_;
        if denom == 0 {
            degenerate += 1;
        } else {
            sum += 2.0 * tp as f64 / denom as f64;
        }
    }
    Ok(F1Outcome {
        value: sum / truth.n_labels() as f64,
        degenerate_labels: degenerate,
    })
}

/// F1 over the globally pooled confusion counts.
pub fn micro_f1(truth: &LabelMatrix, pred: &LabelMatrix) -> Result<f64, EvalError> {
    check_label_shapes(truth, pred)?;
    let counts = confusion_per_label(truth, pred);
    let (tp, fp, fn_) = counts
        .into_iter()
        .fold((0, 0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2));
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        return Ok(0.0);
    }
    Ok(2.0 * tp as f64 / denom as f64)
}

/// All seven metrics in one report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub hamming_loss: f64,
    pub subset_accuracy: f64,
    pub average_precision: f64,
    pub coverage_raw: f64,
    pub coverage_normalized: f64,
    pub ranking_loss: f64,
    pub macro_f1: f64,
    pub micro_f1: f64,
    /// Instances with no relevant label, excluded from the ranking metrics.
    pub instances_without_relevant_labels: usize,
    /// Instances excluded from ranking loss (no relevant or no irrelevant
    /// label).
    pub ranking_loss_excluded_instances: usize,
    /// Labels whose F1 denominator was zero.
    pub degenerate_labels: usize,
}

pub fn evaluate_predictions(
    truth: &LabelMatrix,
    pred: &LabelMatrix,
    scores: &ScoreMatrix,
) -> Result<EvalReport, EvalError> {
    let avp = average_precision(truth, scores)?;
    let cov = coverage(truth, scores)?;
    let rl = ranking_loss(truth, scores)?;
    let macro_ = macro_f1(truth, pred)?;
    Ok(EvalReport {
        hamming_loss: hamming_loss(truth, pred)?,
        subset_accuracy: subset_accuracy(truth, pred)?,
        average_precision: avp.value,
        coverage_raw: cov.raw,
        coverage_normalized: cov.normalized,
        ranking_loss: rl.value,
        macro_f1: macro_.value,
        micro_f1: micro_f1(truth, pred)?,
        instances_without_relevant_labels: avp.excluded,
        ranking_loss_excluded_instances: rl.excluded,
        degenerate_labels: macro_.degenerate_labels,
    })
}
