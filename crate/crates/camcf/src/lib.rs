//! Category-level multi-label causal feature selection.
//!
//! camcf decomposes each label of a multi-label dataset into binary category
//! nodes and discovers, per category, a class-specific Markov blanket:
//! parents and children by conditional-independence testing under a label
//! skeleton, spouses by collider activation, suppressed features by an
//! explanatory competition against blocking label categories, and a final
//! symmetry/redundancy refinement. The union over categories is the selected
//! feature subset.
//!
//! The crate ships the full stack needed to use and verify that procedure:
//!
//! - [`data`]: discrete datasets, label-category flattening, configuration;
//! - [`info`]: exact plug-in entropy and (conditional) mutual information;
//! - [`pipeline`]: the four selection phases and the master loop;
//! - [`eval`]: seven multi-label metrics and an ML-kNN classifier;
//! - [`synth`]: synthetic Bayesian networks with known ground truth plus
//!   brute-force oracles;
//! - [`io`]: CSV/ARFF ingestion and equal-frequency discretization;
//! - [`report`] and [`run`]: the versioned run report and the command layer
//!   behind the `camcf` binary.
//!
//! The `examples/` directory holds one runnable program per capability; see
//! the README for the CLI.

pub mod data;
pub mod eval;
pub mod info;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod run;
pub mod synth;

pub use data::{
    category_indicator, flatten_labels, CamcfConfig, CategoryNode, DataError, Dataset,
    DiscreteColumn, ThresholdMode,
};
pub use info::{
    conditional_mutual_information, dcsmi, entropy, joint_encode, mutual_information, scsmi,
    InfoError,
};
pub use pipeline::{
    select_features, select_features_with_threads, CausalNeighborhood, LabelSkeleton, MiEngine,
    PhaseTrace, PipelineError, SelectionResult,
};
