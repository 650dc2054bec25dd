//! The run report: a single versioned JSON document per run, echoing the
//! configuration, the per-category discoveries with their phase traces, the
//! global selection, and (for evaluation runs) the metric results. Unknown
//! fields are rejected on read so reports stay schema-exact.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{CamcfConfig, Dataset};
use crate::eval::EvalReport;
use crate::pipeline::SelectionResult;

pub const REPORT_FORMAT: &str = "camcf-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub format: String,
    pub tool_version: String,
    pub command: String,
    pub dataset: DatasetSummary,
    pub config: ConfigEcho,
    pub categories: Vec<CategoryReport>,
    pub skipped_categories: Vec<SkippedCategoryReport>,
    /// Sorted union of per-category feature sets after each phase.
    pub per_phase_union: [Vec<usize>; 4],
    pub selected: SelectedFeatures,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evaluation: Option<EvaluationSection>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSummary {
    pub path: String,
    pub n_samples: usize,
    pub n_features: usize,
    pub n_labels: usize,
    /// SHA-256 over a canonical encoding of dimensions, names, and codes.
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub selection: CamcfConfig,
    pub bins: usize,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonEntry {
    pub label_index: usize,
    pub category_value: u32,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryReport {
    pub label_index: usize,
    pub label_name: String,
    pub category_value: u32,
    pub support: usize,
    pub skeleton: Vec<SkeletonEntry>,
    pub pc: Vec<usize>,
    pub sp: Vec<usize>,
    pub recovered: Vec<usize>,
    pub final_cmb: Vec<usize>,
    pub final_cmb_names: Vec<String>,
    pub evicted: Vec<(usize, u32)>,
    pub effective_delta1: f64,
    pub ci_tests: [u64; 4],
    pub conditioning_caps: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub phase_millis: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedCategoryReport {
    pub label_index: usize,
    pub category_value: u32,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectedFeatures {
    pub indices: Vec<usize>,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalProtocol {
    /// "split" or "cv".
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub split_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub folds: Option<usize>,
    pub seed: u64,
    pub knn_k: usize,
    pub smoothing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSection {
    pub protocol: EvalProtocol,
    pub per_fold: Vec<EvalReport>,
    /// Arithmetic mean of the metric values; the exclusion counters are
    /// summed across folds.
    pub mean: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub selection_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evaluation_ms: Option<f64>,
    pub total_ms: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Content hash of a dataset: dimensions, names, arities, and codes.
pub fn dataset_fingerprint(dataset: &Dataset) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"camcf-dataset/1");
    hasher.update((dataset.n_samples() as u64).to_le_bytes());
    hasher.update((dataset.n_features() as u64).to_le_bytes());
    hasher.update((dataset.n_labels() as u64).to_le_bytes());
    for name in dataset.feature_names().iter().chain(dataset.label_names()) {
        hasher.update((name.len() as u64).to_le_bytes());
        hasher.update(name.as_bytes());
    }
    for column in dataset.features().iter().chain(dataset.labels().iter()) {
        hasher.update(column.arity().to_le_bytes());
        for &code in column.codes() {
            hasher.update(code.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Builds the per-category sections of a report from a selection result.
pub fn category_reports(
    dataset: &Dataset,
    result: &SelectionResult,
    include_timings: bool,
) -> Vec<CategoryReport> {
    result
        .per_category
        .values()
        .map(|outcome| {
            let hood = &outcome.neighborhood;
            let trace = &outcome.trace;
            let label_index = hood.target.label_index();
            CategoryReport {
                label_index,
                label_name: dataset.label_names()[label_index].clone(),
                category_value: hood.target.category_value(),
                support: hood.target.support(),
                skeleton: hood
                    .skeleton
                    .members
                    .iter()
                    .map(|(node, score)| SkeletonEntry {
                        label_index: node.label_index(),
                        category_value: node.category_value(),
                        score: *score,
                    })
                    .collect(),
                pc: hood.pc.clone(),
                sp: hood.sp.clone(),
                recovered: hood.recovered.clone(),
                final_cmb: hood.final_cmb.clone(),
                final_cmb_names: hood
                    .final_cmb
                    .iter()
                    .map(|&f| dataset.feature_names()[f].clone())
                    .collect(),
                evicted: trace.evicted.clone(),
                effective_delta1: trace.effective_delta1,
                ci_tests: trace.ci_tests,
                conditioning_caps: trace.conditioning_caps,
                phase_millis: include_timings.then(|| {
                    trace
                        .durations
                        .map(|d| d.as_secs_f64() * 1e3)
                }),
            }
        })
        .collect()
}

/// Mean of the metric values across folds; exclusion counters are summed.
pub fn mean_eval_report(reports: &[EvalReport]) -> EvalReport {
    let n = reports.len().max(1) as f64;
    let mean = |get: fn(&EvalReport) -> f64| reports.iter().map(get).sum::<f64>() / n;
    EvalReport {
        hamming_loss: mean(|r| r.hamming_loss),
        subset_accuracy: mean(|r| r.subset_accuracy),
        average_precision: mean(|r| r.average_precision),
        coverage_raw: mean(|r| r.coverage_raw),
        coverage_normalized: mean(|r| r.coverage_normalized),
        ranking_loss: mean(|r| r.ranking_loss),
        macro_f1: mean(|r| r.macro_f1),
        micro_f1: mean(|r| r.micro_f1),
        instances_without_relevant_labels: reports
            .iter()
            .map(|r| r.instances_without_relevant_labels)
            .sum(),
        ranking_loss_excluded_instances: reports
            .iter()
            .map(|r| r.ranking_loss_excluded_instances)
            .sum(),
        degenerate_labels: reports.iter().map(|r| r.degenerate_labels).sum(),
    }
}
