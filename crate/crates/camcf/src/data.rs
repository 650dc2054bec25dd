//! Dataset representation, label-category flattening, and run configuration.
//!
//! Everything downstream works on integer-coded discrete columns. A
//! [`Dataset`] is a rectangular table of feature columns plus multi-category
//! label columns; [`flatten_labels`] decomposes each label into one binary
//! [`CategoryNode`] per observed category value, which is the granularity at
//! which the selection pipeline operates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("column {name:?} has {len} entries, expected {expected}")]
    LengthMismatch {
        name: String,
        len: usize,
        expected: usize,
    },
    #[error("column {name:?} holds code {code} but arity is {arity}")]
    CodeOutOfRange { name: String, code: u32, arity: u32 },
    #[error("dataset must have at least one sample, one feature, and one label")]
    EmptyDimension,
    #[error("expected {expected} names, got {got}")]
    NameCountMismatch { expected: usize, got: usize },
    #[error("label index {index} out of range (dataset has {n_labels} labels)")]
    LabelIndexOutOfRange { index: usize, n_labels: usize },
    #[error("category {value} not present in label {label:?}")]
    CategoryNotPresent { label: String, value: u32 },
}

/// A length-N column of non-negative integer category codes.
///
/// Every code is strictly below `arity`. The arity is an alphabet bound, not
/// a promise that every code occurs; information measures only ever see the
/// empirical counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscreteColumn {
    codes: Vec<u32>,
    arity: u32,
}

impl DiscreteColumn {
    pub fn new(codes: Vec<u32>, arity: u32) -> Result<Self, DataError> {
        if let Some(&bad) = codes.iter().find(|&&c| c >= arity) {
            return Err(DataError::CodeOutOfRange {
                name: String::new(),
                code: bad,
                arity,
            });
        }
        Ok(Self { codes, arity })
    }

    /// Builds a column whose arity is inferred as `max(code) + 1`.
    pub fn from_codes(codes: Vec<u32>) -> Self {
        let arity = codes.iter().copied().max().map_or(1, |m| m + 1);
        Self { codes, arity }
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
}

/// Rectangular table of discrete feature columns and label columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_samples: usize,
    feature_columns: Vec<DiscreteColumn>,
    label_columns: Vec<DiscreteColumn>,
    feature_names: Vec<String>,
    label_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        feature_columns: Vec<DiscreteColumn>,
        label_columns: Vec<DiscreteColumn>,
        feature_names: Vec<String>,
        label_names: Vec<String>,
    ) -> Result<Self, DataError> {
        if feature_columns.is_empty() || label_columns.is_empty() {
            return Err(DataError::EmptyDimension);
        }
        let n_samples = feature_columns[0].len();
        if n_samples == 0 {
            return Err(DataError::EmptyDimension);
        }
        if feature_names.len() != feature_columns.len() {
            return Err(DataError::NameCountMismatch {
                expected: feature_columns.len(),
                got: feature_names.len(),
            });
        }
        if label_names.len() != label_columns.len() {
            return Err(DataError::NameCountMismatch {
                expected: label_columns.len(),
                got: label_names.len(),
            });
        }
        for (col, name) in feature_columns
            .iter()
            .zip(&feature_names)
            .chain(label_columns.iter().zip(&label_names))
        {
            if col.len() != n_samples {
                return Err(DataError::LengthMismatch {
                    name: name.clone(),
                    len: col.len(),
                    expected: n_samples,
                });
            }
        }
        Ok(Self {
            n_samples,
            feature_columns,
            label_columns,
            feature_names,
            label_names,
        })
    }

    /// Convenience constructor with generated `f{i}` / `l{j}` names.
    pub fn with_default_names(
        feature_columns: Vec<DiscreteColumn>,
        label_columns: Vec<DiscreteColumn>,
    ) -> Result<Self, DataError> {
        let feature_names = (0..feature_columns.len()).map(|i| format!("f{i}")).collect();
        let label_names = (0..label_columns.len()).map(|j| format!("l{j}")).collect();
        Self::new(feature_columns, label_columns, feature_names, label_names)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.feature_columns.len()
    }

    pub fn n_labels(&self) -> usize {
        self.label_columns.len()
    }

    pub fn feature(&self, index: usize) -> &DiscreteColumn {
        &self.feature_columns[index]
    }

    pub fn features(&self) -> &[DiscreteColumn] {
        &self.feature_columns
    }

    pub fn label(&self, index: usize) -> &DiscreteColumn {
        &self.label_columns[index]
    }

    pub fn labels(&self) -> &[DiscreteColumn] {
        &self.label_columns
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }
}

/// One flattened label category: the binary indicator of `label == value`.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryNode {
    label_index: usize,
    category_value: u32,
    indicator: DiscreteColumn,
}

impl CategoryNode {
    pub fn label_index(&self) -> usize {
        self.label_index
    }

    pub fn category_value(&self) -> u32 {
        self.category_value
    }

    /// Binary indicator column (arity 2) over the samples.
    pub fn indicator(&self) -> &DiscreteColumn {
        &self.indicator
    }

    /// Number of samples in the category.
    pub fn support(&self) -> usize {
        self.indicator.codes().iter().filter(|&&c| c == 1).count()
    }

    /// Sort/identity key: (label index, category value).
    pub fn key(&self) -> (usize, u32) {
        (self.label_index, self.category_value)
    }
}

/// Builds the binary indicator for one (label, category value) pair.
///
/// Errors when the value never occurs in the label column, since absent
/// categories are never valid targets.
pub fn category_indicator(
    dataset: &Dataset,
    label_index: usize,
    category_value: u32,
) -> Result<CategoryNode, DataError> {
    if label_index >= dataset.n_labels() {
        return Err(DataError::LabelIndexOutOfRange {
            index: label_index,
            n_labels: dataset.n_labels(),
        });
    }
    let column = dataset.label(label_index);
    if !column.codes().contains(&category_value) {
        return Err(DataError::CategoryNotPresent {
            label: dataset.label_names()[label_index].clone(),
            value: category_value,
        });
    }
    let codes = column
        .codes()
        .iter()
        .map(|&c| u32::from(c == category_value))
        .collect();
    Ok(CategoryNode {
        label_index,
        category_value,
        indicator: DiscreteColumn { codes, arity: 2 },
    })
}

/// Flattens every label column into one [`CategoryNode`] per observed
/// category value whose positive count reaches `min_support`.
///
/// Nodes come back in ascending `(label_index, category_value)` order, which
/// is the iteration order the pipeline uses everywhere.
pub fn flatten_labels(dataset: &Dataset, min_support: usize) -> Vec<CategoryNode> {
    let mut nodes = Vec::new();
    for label_index in 0..dataset.n_labels() {
        let column = dataset.label(label_index);
        let mut counts = vec![0usize; column.arity() as usize];
        for &c in column.codes() {
            counts[c as usize] += 1;
        }
        for (value, &count) in counts.iter().enumerate() {
            if count == 0 || count < min_support {
                continue;
            }
            let node = category_indicator(dataset, label_index, value as u32)
                .expect("observed category must be constructible");
            nodes.push(node);
        }
    }
    nodes
}

/// Threshold handling for the feature-target cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Compare raw scores in bits against the configured `delta1`.
    Absolute,
    /// Per category, set the feature-target threshold to the given quantile
    /// of the nonzero unconditional feature scores (falling back to the
    /// configured `delta1` when every score is zero).
    QuantileAdaptive { quantile: f64 },
}

impl ThresholdMode {
    pub const DEFAULT_QUANTILE: f64 = 0.75;
}

/// All tunables shared across the selection phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CamcfConfig {
    /// Feature-target dependence threshold, in bits.
    pub delta1: f64,
    /// Label-label dependence threshold, in bits.
    pub delta2: f64,
    /// Candidate cap for structure discovery, as a fraction of the feature count.
    pub k1_fraction: f64,
    /// Final-set cap for refinement, as a fraction of the feature count.
    pub k2_fraction: f64,
    /// Cross-dimensional redundancy margin.
    pub gamma: f64,
    pub threshold_mode: ThresholdMode,
    /// Minimum positive count for a category to become a selection target.
    pub min_category_support: usize,
    pub seed: u64,
    /// Optional cap on conditioning-set cardinality; unbounded when absent.
    pub max_conditioning_size: Option<usize>,
    /// When set, binary labels are processed through category 1 only. Both
    /// complements of a binary label carry identical information, so this
    /// halves the work without changing scores; off by default so that every
    /// category is walked literally.
    pub dedup_binary: bool,
}

impl Default for CamcfConfig {
    fn default() -> Self {
        Self {
            delta1: 0.01,
            delta2: 0.01,
            k1_fraction: 1.0,
            k2_fraction: 1.0,
            gamma: 1.2,
            threshold_mode: ThresholdMode::Absolute,
            min_category_support: 5,
            seed: 0,
            max_conditioning_size: None,
            dedup_binary: false,
        }
    }
}

impl CamcfConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.delta1 > 0.0) {
            return Err(format!("delta1 must be positive, got {}", self.delta1));
        }
        if !(self.delta2 > 0.0) {
            return Err(format!("delta2 must be positive, got {}", self.delta2));
        }
        if !(self.gamma >= 1.0) {
            return Err(format!("gamma must be at least 1, got {}", self.gamma));
        }
        for (name, value) in [("k1", self.k1_fraction), ("k2", self.k2_fraction)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(format!("{name} must lie in (0, 1], got {value}"));
            }
        }
        if let ThresholdMode::QuantileAdaptive { quantile } = self.threshold_mode {
            if !(0.0..=1.0).contains(&quantile) {
                return Err(format!("quantile must lie in [0, 1], got {quantile}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(codes: &[u32]) -> DiscreteColumn {
        DiscreteColumn::from_codes(codes.to_vec())
    }

    fn toy_dataset(label: &[u32]) -> Dataset {
        Dataset::with_default_names(vec![column(&[0; 4][..label.len()])], vec![column(label)])
            .unwrap()
    }

    #[test]
    fn flatten_binary_label_yields_both_complements() {
        let ds = toy_dataset(&[0, 1, 0, 1]);
        let nodes = flatten_labels(&ds, 1);
        assert_eq!(nodes.len(), 2);
        assert_eq!(nodes[0].key(), (0, 0));
        assert_eq!(nodes[0].indicator().codes(), &[1, 0, 1, 0]);
        assert_eq!(nodes[1].key(), (0, 1));
        assert_eq!(nodes[1].indicator().codes(), &[0, 1, 0, 1]);
    }

    #[test]
    fn flatten_single_category_label() {
        let ds = Dataset::with_default_names(vec![column(&[0, 0, 0])], vec![column(&[2, 2, 2])])
            .unwrap();
        let nodes = flatten_labels(&ds, 1);
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].key(), (0, 2));
        assert_eq!(nodes[0].indicator().codes(), &[1, 1, 1]);
    }

    #[test]
    fn flatten_respects_min_support() {
        let ds = toy_dataset(&[0, 0, 0, 1]);
        let nodes = flatten_labels(&ds, 2);
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].key(), (0, 0));
    }

    #[test]
    fn binary_indicators_are_complements() {
        let ds = toy_dataset(&[1, 0, 0, 1]);
        let nodes = flatten_labels(&ds, 1);
        let a = nodes[0].indicator().codes();
        let b = nodes[1].indicator().codes();
        assert!(a.iter().zip(b).all(|(x, y)| x + y == 1));
    }

    #[test]
    fn categories_partition_samples() {
        let ds = toy_dataset(&[0, 1, 2, 1]);
        let nodes = flatten_labels(&ds, 1);
        let mut total = vec![0u32; 4];
        for node in &nodes {
            for (t, &c) in total.iter_mut().zip(node.indicator().codes()) {
                *t += c;
            }
        }
        assert_eq!(total, vec![1, 1, 1, 1]);
    }

    #[test]
    fn indicator_examples() {
        let ds = toy_dataset(&[0, 1, 2, 1]);
        let node = category_indicator(&ds, 0, 1).unwrap();
        assert_eq!(node.indicator().codes(), &[0, 1, 0, 1]);

        let ds2 = Dataset::with_default_names(vec![column(&[0, 0])], vec![column(&[0, 0])])
            .unwrap();
        let node2 = category_indicator(&ds2, 0, 0).unwrap();
        assert_eq!(node2.indicator().codes(), &[1, 1]);
    }

    #[test]
    fn indicator_rejects_absent_category() {
        let ds = Dataset::with_default_names(vec![column(&[0, 0])], vec![column(&[0, 0])])
            .unwrap();
        let err = category_indicator(&ds, 0, 5).unwrap_err();
        assert_eq!(
            err,
            DataError::CategoryNotPresent {
                label: "l0".into(),
                value: 5
            }
        );
    }

    #[test]
    fn flatten_is_pointwise_in_sample_order() {
        let ds = toy_dataset(&[0, 1, 2, 1]);
        let permuted = toy_dataset(&[1, 2, 1, 0]);
        let nodes = flatten_labels(&ds, 1);
        let nodes_p = flatten_labels(&permuted, 1);
        // permuted[i] = original[perm[i]]
        let perm = [1usize, 2, 3, 0];
        for (n, np) in nodes.iter().zip(&nodes_p) {
            assert_eq!(n.key(), np.key());
            for (i, &p) in perm.iter().enumerate() {
                assert_eq!(np.indicator().codes()[i], n.indicator().codes()[p]);
            }
        }
    }

    #[test]
    fn dataset_rejects_ragged_columns() {
        let err = Dataset::with_default_names(
            vec![column(&[0, 1, 0])],
            vec![column(&[0, 1])],
        )
        .unwrap_err();
        assert!(matches!(err, DataError::LengthMismatch { .. }));
    }

    #[test]
    fn column_rejects_code_at_arity() {
        assert!(DiscreteColumn::new(vec![0, 2], 2).is_err());
        assert!(DiscreteColumn::new(vec![0, 1], 2).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(CamcfConfig::default().validate().is_ok());
        let mut bad = CamcfConfig::default();
        bad.k1_fraction = 0.0;
        assert!(bad.validate().is_err());
        bad = CamcfConfig::default();
        bad.gamma = 0.5;
        assert!(bad.validate().is_err());
    }
}
