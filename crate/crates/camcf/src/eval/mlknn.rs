//! ML-kNN: multi-label k-nearest-neighbor classification by per-label MAP
//! over neighbor-count statistics.
//!
//! Fitting estimates, per label, a smoothed prior and the conditional
//! distribution of "r of my k neighbors carry this label" under presence and
//! absence, from the training set's own neighborhoods (self excluded).
//! Prediction counts label occurrences among a query's k nearest training
//! rows and picks the MAP hypothesis; the reported score is the posterior
//! probability of label presence. Distances are Euclidean over the feature
//! columns with ties broken by ascending training index.

use super::{EvalError, LabelMatrix, ScoreMatrix};

#[derive(Debug, Clone)]
pub struct MlKnn {
    k: usize,
    train_features: Vec<Vec<f64>>,
    train_labels: LabelMatrix,
    prior_positive: Vec<f64>,
    /// `[label][r]` = P(r neighbors with label | label present)
    posterior_positive: Vec<Vec<f64>>,
    posterior_negative: Vec<Vec<f64>>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` nearest rows to `query`, skipping `exclude` when set.
/// Distance ties resolve to the lower training index.
fn nearest(
    features: &[Vec<f64>],
    query: &[f64],
    k: usize,
    exclude: Option<usize>,
) -> Vec<usize> {
    let mut order: Vec<(f64, usize)> = features
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != exclude)
        .map(|(i, row)| (squared_distance(row, query), i))
        .collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite distances").then(a.1.cmp(&b.1)));
    order.truncate(k);
    order.into_iter().map(|(_, i)| i).collect()
}

pub fn mlknn_fit(
    train_features: &[Vec<f64>],
    train_labels: &LabelMatrix,
    k: usize,
    smoothing: f64,
) -> Result<MlKnn, EvalError> {
    let n = train_features.len();
    if k == 0 {
        return Err(EvalError::KZero);
    }
    if k > n {
        return Err(EvalError::KTooLarge { k, n });
    }
    if n != train_labels.n_rows() {
        return Err(EvalError::ShapeMismatch(
            n,
            train_features.first().map_or(0, Vec::len),
            train_labels.n_rows(),
            train_labels.n_labels(),
        ));
    }
    let n_labels = train_labels.n_labels();
    let s = smoothing;

    let mut prior_positive = Vec::with_capacity(n_labels);
    for label in 0..n_labels {
        let positives: usize = (0..n).map(|i| train_labels.get(i, label) as usize).sum();
        prior_positive.push((s + positives as f64) / (2.0 * s + n as f64));
    }

    // neighborhood statistics over the training set itself; each row looks
    // at its k nearest among the others (k is capped at n-1 here)
    let stats_k = k.min(n.saturating_sub(1));
    let mut with_label = vec![vec![0usize; k + 1]; n_labels];
    let mut without_label = vec![vec![0usize; k + 1]; n_labels];
    for i in 0..n {
        let neighbors = nearest(train_features, &train_features[i], stats_k, Some(i));
        for label in 0..n_labels {
            let r: usize = neighbors
                .iter()
                .map(|&j| train_labels.get(j, label) as usize)
                .sum();
            if train_labels.get(i, label) == 1 {
                with_label[label][r] += 1;
            } else {
                without_label[label][r] += 1;
            }
        }
    }

    let smooth = |counts: &[usize]| -> Vec<f64> {
        let total: usize = counts.iter().sum();
        let denom = s * (k as f64 + 1.0) + total as f64;
        counts.iter().map(|&c| (s + c as f64) / denom).collect()
    };
    let posterior_positive: Vec<Vec<f64>> = with_label.iter().map(|c| smooth(c)).collect();
    let posterior_negative: Vec<Vec<f64>> = without_label.iter().map(|c| smooth(c)).collect();

    Ok(MlKnn {
        k,
        train_features: train_features.to_vec(),
        train_labels: train_labels.clone(),
        prior_positive,
        posterior_positive,
        posterior_negative,
    })
}

pub fn mlknn_predict(model: &MlKnn, queries: &[Vec<f64>]) -> (LabelMatrix, ScoreMatrix) {
    let n_labels = model.train_labels.n_labels();
    let mut predictions = LabelMatrix::zeros(queries.len(), n_labels);
    let mut score_rows = Vec::with_capacity(queries.len());
    for (q, query) in queries.iter().enumerate() {
        let neighbors = nearest(&model.train_features, query, model.k, None);
        let mut row_scores = Vec::with_capacity(n_labels);
        for label in 0..n_labels {
            let r: usize = neighbors
                .iter()
                .map(|&j| model.train_labels.get(j, label) as usize)
                .sum();
            let p1 = model.prior_positive[label] * model.posterior_positive[label][r];
            let p0 = (1.0 - model.prior_positive[label]) * model.posterior_negative[label][r];
            if p1 > p0 {
                predictions.set(q, label, 1);
            }
            // with zero smoothing both sides can vanish; call that even odds
            let score = if p1 + p0 > 0.0 { p1 / (p1 + p0) } else { 0.5 };
            row_scores.push(score);
        }
        score_rows.push(row_scores);
    }
    let scores = ScoreMatrix::new(score_rows).expect("finite posterior scores");
    (predictions, scores)
}
