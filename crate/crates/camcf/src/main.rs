use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use camcf::data::{CamcfConfig, ThresholdMode};
use camcf::io::LabelSelector;
use camcf::run::{
    cmd_eval, cmd_select, cmd_synth, EvalOptions, RunError, SelectOptions, SplitProtocol,
    SynthOptions,
};

#[derive(Parser)]
#[command(name = "camcf", version, about = "Category-level multi-label causal feature selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a feature subset and write a run report.
    Select(SelectArgs),
    /// Select, then evaluate the subset with ML-kNN and the seven metrics.
    Eval(EvalArgs),
    /// Generate a synthetic network, a sampled dataset, and its ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("label_spec").required(true).args(["labels", "label_prefix"])))]
struct DataArgs {
    /// Input dataset (.csv or .arff).
    #[arg(long)]
    data: PathBuf,
    /// Label columns: a count (last N columns) or comma-separated names.
    #[arg(long)]
    labels: Option<String>,
    /// Treat every column whose name starts with this prefix as a label.
    #[arg(long)]
    label_prefix: Option<String>,
    /// Bins for equal-frequency discretization of continuous columns.
    #[arg(long, default_value_t = 5)]
    bins: usize,
}

impl DataArgs {
    fn selector(&self) -> LabelSelector {
        if let Some(prefix) = &self.label_prefix {
            return LabelSelector::Prefix(prefix.clone());
        }
        let spec = self.labels.as_deref().expect("clap enforces the group");
        match spec.parse::<usize>() {
            Ok(n) => LabelSelector::LastColumns(n),
            Err(_) => LabelSelector::Names(
                spec.split(',').map(|s| s.trim().to_string()).collect(),
            ),
        }
    }
}

#[derive(Args)]
struct SelectionArgs {
    /// Feature-target dependence threshold, in bits.
    #[arg(long, default_value_t = 0.01)]
    delta1: f64,
    /// Label-label dependence threshold, in bits.
    #[arg(long, default_value_t = 0.01)]
    delta2: f64,
    /// Candidate cap as a fraction of the feature count.
    #[arg(long, default_value_t = 1.0)]
    k1: f64,
    /// Final-set cap as a fraction of the feature count.
    #[arg(long, default_value_t = 1.0)]
    k2: f64,
    /// Cross-dimensional redundancy margin.
    #[arg(long, default_value_t = 1.2)]
    gamma: f64,
    /// Per-category adaptive feature-target threshold (0.75 quantile of the
    /// nonzero marginal scores) instead of the absolute delta1.
    #[arg(long)]
    adaptive_thresholds: bool,
    /// Process only category 1 of binary labels.
    #[arg(long)]
    dedup_binary: bool,
    /// Minimum positive count for a category to become a target.
    #[arg(long, default_value_t = 5)]
    min_support: usize,
    /// Cap on conditioning-set cardinality (unbounded when omitted).
    #[arg(long)]
    max_conditioning: Option<usize>,
    /// Worker threads for per-category selection.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave wall-clock timings out of the report (reports become
    /// byte-identical across runs).
    #[arg(long)]
    omit_timings: bool,
    /// Report output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SelectionArgs {
    fn config(&self) -> CamcfConfig {
        CamcfConfig {
            delta1: self.delta1,
            delta2: self.delta2,
            k1_fraction: self.k1,
            k2_fraction: self.k2,
            gamma: self.gamma,
            threshold_mode: if self.adaptive_thresholds {
                ThresholdMode::QuantileAdaptive {
                    quantile: ThresholdMode::DEFAULT_QUANTILE,
                }
            } else {
                ThresholdMode::Absolute
            },
            min_category_support: self.min_support,
            seed: self.seed,
            max_conditioning_size: self.max_conditioning,
            dedup_binary: self.dedup_binary,
        }
    }

    fn select_options(&self, data: &DataArgs) -> SelectOptions {
        SelectOptions {
            data: data.data.clone(),
            labels: data.selector(),
            config: self.config(),
            bins: data.bins,
            threads: self.threads,
            include_timings: !self.omit_timings,
            out: self.out.clone(),
        }
    }
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Args)]
#[command(group(ArgGroup::new("protocol").args(["split", "cv"])))]
struct EvalArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    selection: SelectionArgs,
    /// Train fraction for a single seeded hold-out split.
    #[arg(long)]
    split: Option<f64>,
    /// Fold count for seeded cross-validation.
    #[arg(long)]
    cv: Option<usize>,
    /// Neighbor count for ML-kNN.
    #[arg(long, default_value_t = 10)]
    knn: usize,
    /// Laplace smoothing for ML-kNN.
    #[arg(long, default_value_t = 1.0)]
    smoothing: f64,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    features: usize,
    #[arg(long)]
    label_nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    #[arg(long, default_value_t = 3)]
    arity: u32,
    #[arg(long)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concentrate CPT rows (0.9 on one outcome) so dependencies are strong.
    #[arg(long)]
    strong_edges: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

fn run() -> Result<(), RunError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Select(args) => {
            let options = args.selection.select_options(&args.data);
            let report = cmd_select(&options)?;
            eprintln!(
                "selected {} of {} features over {} categories",
                report.selected.indices.len(),
                report.dataset.n_features,
                report.categories.len()
            );
            if options.out.is_none() {
                println!("{}", report.to_json());
            }
        }
        Command::Eval(args) => {
            let protocol = match (args.split, args.cv) {
                (Some(fraction), None) => SplitProtocol::HoldOut(fraction),
                (None, Some(folds)) => SplitProtocol::CrossValidation(folds),
                (None, None) => SplitProtocol::HoldOut(0.7),
                (Some(_), Some(_)) => unreachable!("clap group forbids both"),
            };
            let options = EvalOptions {
                select: args.selection.select_options(&args.data),
                protocol,
                knn_k: args.knn,
                smoothing: args.smoothing,
            };
            let report = cmd_eval(&options)?;
            if let Some(eval) = &report.evaluation {
                eprintln!(
                    "hamming loss {:.4}, macro-F1 {:.4} over {} fold(s); {} features",
                    eval.mean.hamming_loss,
                    eval.mean.macro_f1,
                    eval.per_fold.len(),
                    report.selected.indices.len()
                );
            }
            if options.select.out.is_none() {
                println!("{}", report.to_json());
            }
        }
        Command::Synth(args) => {
            let outputs = cmd_synth(&SynthOptions {
                n_features: args.features,
                n_label_nodes: args.label_nodes,
                edge_prob: args.edge_prob,
                arity: args.arity,
                samples: args.samples,
                seed: args.seed,
                strong_edges: args.strong_edges,
                out_dir: args.out_dir,
            })?;
            eprintln!(
                "wrote {}, {}, {}",
                outputs.network_path.display(),
                outputs.data_path.display(),
                outputs.blankets_path.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
