//! Command-level operations behind the CLI: load data, select, evaluate,
//! synthesize, and emit reports. The binary is a thin argument parser over
//! these functions.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{CamcfConfig, Dataset};
use crate::eval::{
    evaluate_predictions, mlknn_fit, mlknn_predict, EvalError, EvalReport, LabelMatrix,
};
use crate::io::{load_dataset, write_csv, IngestError, IngestOptions, LabelSelector};
use crate::pipeline::{select_features_with_threads, PipelineError, SelectionResult};
use crate::report::{
    category_reports, dataset_fingerprint, mean_eval_report, ConfigEcho, DatasetSummary,
    EvalProtocol, EvaluationSection, RunReport, SelectedFeatures, SkippedCategoryReport, Timings,
    REPORT_FORMAT,
};
use crate::synth::{
    forward_sample, generate_dag_styled, true_markov_blanket, CptStyle, SynthError,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    BadArgs(String),
}

#[derive(Debug, Clone)]
pub struct SelectOptions {
    pub data: PathBuf,
    pub labels: LabelSelector,
    pub config: CamcfConfig,
    pub bins: usize,
    pub threads: usize,
    pub include_timings: bool,
    pub out: Option<PathBuf>,
}

impl SelectOptions {
    pub fn new(data: impl Into<PathBuf>, labels: LabelSelector) -> Self {
        Self {
            data: data.into(),
            labels,
            config: CamcfConfig::default(),
            bins: 5,
            threads: 1,
            include_timings: true,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitProtocol {
    /// Seeded shuffle, first `fraction` of rows train, the rest test.
    HoldOut(f64),
    /// Seeded shuffle, `folds` contiguous chunks, each used as the test set
    /// once.
    CrossValidation(usize),
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub select: SelectOptions,
    pub protocol: SplitProtocol,
    pub knn_k: usize,
    pub smoothing: f64,
}

fn load(options: &SelectOptions) -> Result<Dataset, RunError> {
    let ingest = IngestOptions {
        labels: options.labels.clone(),
        bins: options.bins,
    };
    Ok(load_dataset(&options.data, &ingest)?)
}

fn base_report(
    command: &str,
    options: &SelectOptions,
    dataset: &Dataset,
    result: &SelectionResult,
) -> RunReport {
    RunReport {
        format: REPORT_FORMAT.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        dataset: DatasetSummary {
            path: options.data.display().to_string(),
            n_samples: dataset.n_samples(),
            n_features: dataset.n_features(),
            n_labels: dataset.n_labels(),
            fingerprint: dataset_fingerprint(dataset),
        },
        config: ConfigEcho {
            selection: options.config.clone(),
            bins: options.bins,
            threads: options.threads,
        },
        categories: category_reports(dataset, result, options.include_timings),
        skipped_categories: result
            .skipped
            .iter()
            .map(|s| SkippedCategoryReport {
                label_index: s.label_index,
                category_value: s.category_value,
                support: s.support,
            })
            .collect(),
        per_phase_union: result.per_phase_union(),
        selected: SelectedFeatures {
            indices: result.global_selected.clone(),
            names: result
                .global_selected
                .iter()
                .map(|&f| dataset.feature_names()[f].clone())
                .collect(),
        },
        evaluation: None,
        timings: None,
    }
}

fn write_report(report: &RunReport, out: Option<&Path>) -> Result<(), RunError> {
    if let Some(path) = out {
        fs::write(path, report.to_json() + "\n")?;
    }
    Ok(())
}

/// Runs selection and writes the report when an output path is set.
pub fn cmd_select(options: &SelectOptions) -> Result<RunReport, RunError> {
    let dataset = load(options)?;
    let started = Instant::now();
    let result = select_features_with_threads(&dataset, &options.config, options.threads)?;
    let selection_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut report = base_report("select", options, &dataset, &result);
    if options.include_timings {
        report.timings = Some(Timings {
            selection_ms,
            evaluation_ms: None,
            total_ms: selection_ms,
        });
    }
    write_report(&report, options.out.as_deref())?;
    Ok(report)
}

/// Binary truth matrix over the label columns; evaluation requires every
/// label to be binary.
fn label_matrix(dataset: &Dataset, rows: &[usize]) -> Result<LabelMatrix, RunError> {
    for (name, column) in dataset.label_names().iter().zip(dataset.labels()) {
        if column.arity() > 2 {
            return Err(RunError::BadArgs(format!(
                "label {name:?} has {} categories; evaluation requires binary labels",
                column.arity()
            )));
        }
    }
    let data: Vec<Vec<u8>> = rows
        .iter()
        .map(|&row| {
            (0..dataset.n_labels())
                .map(|l| dataset.label(l).codes()[row] as u8)
                .collect()
        })
        .collect();
    Ok(LabelMatrix::new(data)?)
}

fn feature_rows(dataset: &Dataset, selected: &[usize], rows: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|&row| {
            selected
                .iter()
                .map(|&f| dataset.feature(f).codes()[row] as f64)
                .collect()
        })
        .collect()
}

fn fold_assignments(n: usize, protocol: &SplitProtocol, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>, RunError> {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    match *protocol {
        SplitProtocol::HoldOut(fraction) => {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(RunError::BadArgs(format!(
                    "split fraction must lie in (0, 1), got {fraction}"
                )));
            }
            let train_len = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
            let (train, test) = indices.split_at(train_len);
            Ok(vec![(train.to_vec(), test.to_vec())])
        }
        SplitProtocol::CrossValidation(folds) => {
            if folds < 2 || folds > n {
                return Err(RunError::BadArgs(format!(
                    "fold count must lie in [2, {n}], got {folds}"
                )));
            }
            let base = n / folds;
            let extra = n % folds;
            let mut out = Vec::with_capacity(folds);
            let mut start = 0;
            for fold in 0..folds {
                let len = base + usize::from(fold < extra);
                let test: Vec<usize> = indices[start..start + len].to_vec();
                let train: Vec<usize> = indices[..start]
                    .iter()
                    .chain(&indices[start + len..])
                    .copied()
                    .collect();
                out.push((train, test));
                start += len;
            }
            Ok(out)
        }
    }
}

/// Fits ML-kNN on the selected features and scores every fold. Selection is
/// done once on the full dataset; the splits evaluate the classifier.
pub fn evaluate_selection(
    dataset: &Dataset,
    selected: &[usize],
    protocol: &SplitProtocol,
    seed: u64,
    knn_k: usize,
    smoothing: f64,
) -> Result<(Vec<EvalReport>, EvalReport), RunError> {
    let folds = fold_assignments(dataset.n_samples(), protocol, seed)?;
    let mut per_fold = Vec::with_capacity(folds.len());
    for (train, test) in &folds {
        let train_features = feature_rows(dataset, selected, train);
        let test_features = feature_rows(dataset, selected, test);
        let train_labels = label_matrix(dataset, train)?;
        let test_labels = label_matrix(dataset, test)?;
        let model = mlknn_fit(&train_features, &train_labels, knn_k, smoothing)?;
        let (pred, scores) = mlknn_predict(&model, &test_features);
        per_fold.push(evaluate_predictions(&test_labels, &pred, &scores)?);
    }
    let mean = mean_eval_report(&per_fold);
    Ok((per_fold, mean))
}

/// Selection followed by an ML-kNN evaluation of the selected subset.
pub fn cmd_eval(options: &EvalOptions) -> Result<RunReport, RunError> {
    let dataset = load(&options.select)?;
    let started = Instant::now();
    let result =
        select_features_with_threads(&dataset, &options.select.config, options.select.threads)?;
    let selection_ms = started.elapsed().as_secs_f64() * 1e3;

    let eval_started = Instant::now();
    let (per_fold, mean) = evaluate_selection(
        &dataset,
        &result.global_selected,
        &options.protocol,
        options.select.config.seed,
        options.knn_k,
        options.smoothing,
    )?;
    let evaluation_ms = eval_started.elapsed().as_secs_f64() * 1e3;

    let mut report = base_report("eval", &options.select, &dataset, &result);
    let (kind, split_fraction, folds) = match options.protocol {
        SplitProtocol::HoldOut(f) => ("split", Some(f), None),
        SplitProtocol::CrossValidation(k) => ("cv", None, Some(k)),
    };
    report.evaluation = Some(EvaluationSection {
        protocol: EvalProtocol {
            kind: kind.to_string(),
            split_fraction,
            folds,
            seed: options.select.config.seed,
            knn_k: options.knn_k,
            smoothing: options.smoothing,
        },
        per_fold,
        mean,
    });
    if options.select.include_timings {
        report.timings = Some(Timings {
            selection_ms,
            evaluation_ms: Some(evaluation_ms),
            total_ms: selection_ms + evaluation_ms,
        });
    }
    write_report(&report, options.select.out.as_deref())?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub n_features: usize,
    pub n_label_nodes: usize,
    pub edge_prob: f64,
    pub arity: u32,
    pub samples: usize,
    pub seed: u64,
    pub strong_edges: bool,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthBlanket {
    pub node_index: usize,
    pub name: String,
    pub mb_feature_indices: Vec<usize>,
    pub mb_feature_names: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SynthOutputs {
    pub network_path: PathBuf,
    pub data_path: PathBuf,
    pub blankets_path: PathBuf,
}

/// Generates a network, samples a dataset from it, and writes all three
/// artifacts (network JSON, data CSV, ground-truth blankets JSON).
pub fn cmd_synth(options: &SynthOptions) -> Result<SynthOutputs, RunError> {
    if options.edge_prob < 0.0 || options.edge_prob > 1.0 {
        return Err(RunError::BadArgs(format!(
            "edge probability must lie in [0, 1], got {}",
            options.edge_prob
        )));
    }
    let style = if options.strong_edges {
        CptStyle::StrongEdge
    } else {
        CptStyle::Dirichlet
    };
    let bn = generate_dag_styled(
        options.n_features,
        options.n_label_nodes,
        options.edge_prob,
        options.arity,
        options.seed,
        style,
    );
    let dataset = forward_sample(&bn, options.samples, options.seed)?;

    fs::create_dir_all(&options.out_dir)?;
    let network_path = options.out_dir.join("network.json");
    let data_path = options.out_dir.join("data.csv");
    let blankets_path = options.out_dir.join("blankets.json");

    fs::write(&network_path, bn.to_json() + "\n")?;
    write_csv(&dataset, &data_path)?;

    let blankets: Vec<GroundTruthBlanket> = bn
        .label_nodes()
        .into_iter()
        .map(|node| {
            let mb = true_markov_blanket(&bn, node);
            GroundTruthBlanket {
                node_index: node,
                name: bn.nodes[node].name.clone(),
                mb_feature_names: mb
                    .iter()
                    .map(|&f| dataset.feature_names()[f].clone())
                    .collect(),
                mb_feature_indices: mb,
            }
        })
        .collect();
    fs::write(
        &blankets_path,
        serde_json::to_string_pretty(&blankets)? + "\n",
    )?;

    Ok(SynthOutputs {
        network_path,
        data_path,
        blankets_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holdout_split_sizes() {
        let folds = fold_assignments(10, &SplitProtocol::HoldOut(0.7), 1).unwrap();
        assert_eq!(folds.len(), 1);
        assert_eq!(folds[0].0.len(), 7);
        assert_eq!(folds[0].1.len(), 3);
    }

    #[test]
    fn cv_folds_partition_the_rows() {
        let folds = fold_assignments(11, &SplitProtocol::CrossValidation(3), 5).unwrap();
        assert_eq!(folds.len(), 3);
        let mut all_test: Vec<usize> = folds.iter().flat_map(|(_, t)| t.clone()).collect();
        all_test.sort_unstable();
        assert_eq!(all_test, (0..11).collect::<Vec<_>>());
        for (train, test) in &folds {
            assert_eq!(train.len() + test.len(), 11);
        }
    }

    #[test]
    fn splits_are_seeded() {
        let a = fold_assignments(20, &SplitProtocol::HoldOut(0.5), 3).unwrap();
        let b = fold_assignments(20, &SplitProtocol::HoldOut(0.5), 3).unwrap();
        let c = fold_assignments(20, &SplitProtocol::HoldOut(0.5), 4).unwrap();
        assert_eq!(a[0].0, b[0].0);
        assert_ne!(a[0].0, c[0].0);
    }

    #[test]
    fn bad_protocol_arguments_are_rejected() {
        assert!(fold_assignments(10, &SplitProtocol::HoldOut(1.0), 0).is_err());
        assert!(fold_assignments(10, &SplitProtocol::CrossValidation(1), 0).is_err());
        assert!(fold_assignments(10, &SplitProtocol::CrossValidation(11), 0).is_err());
    }
}
