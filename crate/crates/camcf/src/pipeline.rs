//! The per-category selection pipeline and the master loop over all
//! flattened label categories.
//!
//! Each eligible category runs four sequential phases:
//!
//! 1. dependency modeling over the other labels' categories, producing the
//!    label skeleton that conditions every later test;
//! 2. local structure discovery: a relevance-filtered candidate pool,
//!    conditional elimination down to the PC set, then spouse detection
//!    through collider activation;
//! 3. recovery of features whose signal a skeleton category suppressed,
//!    decided by an explanatory competition between the feature and the
//!    blocking category;
//! 4. refinement: score truncation, a marginal-dependence symmetry check,
//!    and cross-dimensional redundancy removal against all other labels.
//!
//! The union of the per-category results, deduplicated and sorted, is the
//! globally selected feature subset. Every conditional-independence test is
//! counted per phase so the cost profile can be audited.

use std::cell::Cell;
use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::data::{
    flatten_labels, CamcfConfig, CategoryNode, Dataset, DiscreteColumn, ThresholdMode,
};
use crate::info;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Counted access to the information measures for one category run.
///
/// All columns come from one dataset, so lengths always agree and the
/// underlying calls cannot fail. The engine records how many tests ran and
/// how often the optional conditioning-size cap truncated a set.
pub struct MiEngine<'a> {
    features: &'a [DiscreteColumn],
    max_conditioning: Option<usize>,
    tests: Cell<u64>,
    caps: Cell<u64>,
}

impl<'a> MiEngine<'a> {
    pub fn new(features: &'a [DiscreteColumn]) -> Self {
        Self::with_conditioning_cap(features, None)
    }

    pub fn with_conditioning_cap(
        features: &'a [DiscreteColumn],
        max_conditioning: Option<usize>,
    ) -> Self {
        Self {
            features,
            max_conditioning,
            tests: Cell::new(0),
            caps: Cell::new(0),
        }
    }

    pub fn tests_run(&self) -> u64 {
        self.tests.get()
    }

    pub fn caps_applied(&self) -> u64 {
        self.caps.get()
    }

    /// Conditioning columns in call-site order: feature columns first, then
    /// indicator columns, truncated to the configured cap if one is set.
    fn assemble<'b>(
        &'b self,
        cond_features: &[usize],
        cond_indicators: &[&'b DiscreteColumn],
    ) -> Vec<&'b DiscreteColumn> {
        let mut columns: Vec<&DiscreteColumn> = cond_features
            .iter()
            .map(|&i| &self.features[i])
            .chain(cond_indicators.iter().copied())
            .collect();
        if let Some(cap) = self.max_conditioning {
            if columns.len() > cap {
                columns.truncate(cap);
                self.caps.set(self.caps.get() + 1);
            }
        }
        columns
    }

    /// Feature-target dependence given feature and indicator conditioners.
    pub fn scsmi(
        &self,
        feature_index: usize,
        target: &CategoryNode,
        cond_features: &[usize],
        cond_indicators: &[&DiscreteColumn],
    ) -> f64 {
        let columns = self.assemble(cond_features, cond_indicators);
        self.tests.set(self.tests.get() + 1);
        info::scsmi(&self.features[feature_index], target, &columns)
            .expect("dataset columns share one length")
    }

    /// Category-category dependence given feature and indicator conditioners.
    pub fn dcsmi(
        &self,
        a: &CategoryNode,
        b: &CategoryNode,
        cond_features: &[usize],
        cond_indicators: &[&DiscreteColumn],
    ) -> f64 {
        let columns = self.assemble(cond_features, cond_indicators);
        self.tests.set(self.tests.get() + 1);
        info::dcsmi(a, b, &columns).expect("dataset columns share one length")
    }
}

/// A feature index carrying its unconditional dependence with the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredFeature {
    pub index: usize,
    pub score: f64,
}

fn sort_scored(items: &mut [ScoredFeature]) {
    items.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then(a.index.cmp(&b.index))
    });
}

/// Other-label categories retained as conditioning context for one target,
/// in admission order with their unconditional dependence scores.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSkeleton {
    pub members: Vec<(CategoryNode, f64)>,
}

impl LabelSkeleton {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn keys(&self) -> Vec<(usize, u32)> {
        self.members.iter().map(|(node, _)| node.key()).collect()
    }

    fn indicators(&self) -> Vec<&DiscreteColumn> {
        self.members.iter().map(|(node, _)| node.indicator()).collect()
    }

    /// Indicators of every member except the one at `skip`.
    fn indicators_without(&self, skip: usize) -> Vec<&DiscreteColumn> {
        self.members
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, (node, _))| node.indicator())
            .collect()
    }
}

/// Phase 1: marginal filter over the other labels' categories, then a greedy
/// conditional pass that admits a candidate only while it still carries
/// information given the members already admitted.
pub fn build_label_skeleton(
    target: &CategoryNode,
    others: &[&CategoryNode],
    delta2: f64,
    engine: &MiEngine,
) -> LabelSkeleton {
    debug_assert!(others.iter().all(|o| o.label_index() != target.label_index()));
    let mut candidates: Vec<(&CategoryNode, f64)> = others
        .iter()
        .filter_map(|&node| {
            let score = engine.dcsmi(target, node, &[], &[]);
            (score > delta2).then_some((node, score))
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then(a.0.key().cmp(&b.0.key()))
    });

    let mut members: Vec<(CategoryNode, f64)> = Vec::new();
    for (candidate, score) in candidates {
        let admit = members.is_empty() || {
            let indicators: Vec<&DiscreteColumn> =
                members.iter().map(|(node, _)| node.indicator()).collect();
            engine.dcsmi(target, candidate, &[], &indicators) > delta2
        };
        if admit {
            members.push((candidate.clone(), score));
        }
    }
    LabelSkeleton { members }
}

/// Output of PC discovery: the truncated relevance pool that entered
/// elimination, and the surviving PC set with scores.
#[derive(Debug, Clone)]
pub struct PcDiscovery {
    pub candidate_pool: Vec<usize>,
    pub pc: Vec<ScoredFeature>,
}

/// Phase 2a: relevance filter, cap to the top `k1` fraction, then sequential
/// conditional elimination where each candidate is tested against all other
/// remaining candidates plus the label skeleton. Removals take effect
/// immediately for subsequent tests.
pub fn discover_pc(
    target: &CategoryNode,
    skeleton: &LabelSkeleton,
    delta1: f64,
    k1_fraction: f64,
    engine: &MiEngine,
    marginals: &[f64],
) -> PcDiscovery {
    let m = marginals.len();
    let mut candidates: Vec<ScoredFeature> = marginals
        .iter()
        .enumerate()
        .filter(|&(_, &score)| score > delta1)
        .map(|(index, &score)| ScoredFeature { index, score })
        .collect();
    sort_scored(&mut candidates);
    if !candidates.is_empty() {
        let cap = ((k1_fraction * m as f64).ceil() as usize).max(1);
        candidates.truncate(cap);
    }
    let candidate_pool: Vec<usize> = candidates.iter().map(|sf| sf.index).collect();

    let skeleton_indicators = skeleton.indicators();
    let mut i = 0;
    while i < candidates.len() {
        let cond_features: Vec<usize> = candidates
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, sf)| sf.index)
            .collect();
        let value = engine.scsmi(
            candidates[i].index,
            target,
            &cond_features,
            &skeleton_indicators,
        );
        if value <= delta1 {
            candidates.remove(i);
        } else {
            i += 1;
        }
    }
    PcDiscovery {
        candidate_pool,
        pc: candidates,
    }
}

/// Phase 2b: a non-PC feature is a spouse when it is independent of the
/// target given the skeleton but becomes dependent once some PC member is
/// added to the conditioning set (collider activation). Output keeps
/// first-admission order with duplicates removed.
pub fn discover_spouses(
    target: &CategoryNode,
    pc: &[ScoredFeature],
    skeleton: &LabelSkeleton,
    delta1: f64,
    engine: &MiEngine,
    n_features: usize,
) -> Vec<usize> {
    if pc.is_empty() {
        return Vec::new();
    }
    let pc_set: HashSet<usize> = pc.iter().map(|sf| sf.index).collect();
    let skeleton_indicators = skeleton.indicators();

    // the independence half of the test does not depend on the PC member
    let mut independent: Vec<Option<bool>> = vec![None; n_features];
    let mut is_independent = |z: usize| -> bool {
        if independent[z].is_none() {
            let value = engine.scsmi(z, target, &[], &skeleton_indicators);
            independent[z] = Some(value <= delta1);
        }
        independent[z].unwrap()
    };

    let mut spouses = Vec::new();
    let mut admitted: HashSet<usize> = HashSet::new();
    for x in pc {
        for z in 0..n_features {
            if pc_set.contains(&z) || admitted.contains(&z) {
                continue;
            }
            if !is_independent(z) {
                continue;
            }
            let activated = engine.scsmi(z, target, &[x.index], &skeleton_indicators);
            if activated > delta1 {
                spouses.push(z);
                admitted.insert(z);
            }
        }
    }
    spouses
}

/// Phase 3: walk the features outside the current blanket in ascending
/// order; each one that clears the half-threshold relevance gate competes
/// against the skeleton members. If the feature explains the target better
/// than a blocking category does (both conditioned on the PC set plus the
/// rest of the skeleton), the feature is restored and the blocker is evicted
/// for the remainder of this category's run.
pub fn recover_features(
    target: &CategoryNode,
    cmb: Vec<usize>,
    skeleton: &mut LabelSkeleton,
    pc: &[usize],
    delta1: f64,
    engine: &MiEngine,
    marginals: &[f64],
) -> Vec<usize> {
    let mut cmb = cmb;
    let mut in_cmb: HashSet<usize> = cmb.iter().copied().collect();
    for f_miss in 0..marginals.len() {
        if in_cmb.contains(&f_miss) {
            continue;
        }
        if marginals[f_miss] < delta1 / 2.0 {
            continue;
        }
        let mut evict = None;
        for (block_idx, (blocker, _)) in skeleton.members.iter().enumerate() {
            let base_indicators = skeleton.indicators_without(block_idx);
            let feature_side = engine.scsmi(f_miss, target, pc, &base_indicators);
            let blocker_side = engine.dcsmi(blocker, target, pc, &base_indicators);
            if feature_side > blocker_side {
                evict = Some(block_idx);
                break;
            }
        }
        if let Some(block_idx) = evict {
            cmb.push(f_miss);
            in_cmb.insert(f_miss);
            skeleton.members.remove(block_idx);
        }
    }
    cmb
}

/// Phase 4: keep the top `k2` fraction by unconditional score, drop anything
/// failing the marginal symmetry threshold, then drop features whose
/// dependence with some other label's category exceeds `gamma` times their
/// dependence with the target. Survivors stay in score order.
pub fn refine_cmb(
    cmb: &[usize],
    target: &CategoryNode,
    all_other_categories: &[&CategoryNode],
    delta1: f64,
    k2_fraction: f64,
    gamma: f64,
    engine: &MiEngine,
    n_features: usize,
) -> Vec<ScoredFeature> {
    let m = n_features;
    let mut scored: Vec<ScoredFeature> = cmb
        .iter()
        .map(|&index| ScoredFeature {
            index,
            score: engine.scsmi(index, target, &[], &[]),
        })
        .collect();
    sort_scored(&mut scored);
    if !scored.is_empty() {
        let cap = ((k2_fraction * m as f64).ceil() as usize).max(1);
        scored.truncate(cap);
    }
    scored.retain(|sf| sf.score > delta1);

    scored
        .into_iter()
        .filter(|sf| {
            for other in all_other_categories {
                let cross = engine.scsmi(sf.index, other, &[], &[]);
                if cross > gamma * sf.score {
                    return false;
                }
            }
            true
        })
        .collect()
}

/// The per-phase audit trail for one category.
#[derive(Debug, Clone)]
pub struct PhaseTrace {
    /// Relevance pool that entered conditional elimination.
    pub candidate_pool: Vec<usize>,
    /// PC plus spouses, after phase 2.
    pub after_structure: Vec<usize>,
    /// Blanket after recovery, phase 3.
    pub after_recovery: Vec<usize>,
    /// Final refined set, phase 4.
    pub final_set: Vec<usize>,
    pub ci_tests: [u64; 4],
    /// Wall-clock measurements; excluded from equality, which compares the
    /// deterministic content only.
    pub durations: [Duration; 4],
    /// Feature-target threshold actually applied (differs from the
    /// configured value under quantile-adaptive thresholds).
    pub effective_delta1: f64,
    /// Skeleton members evicted during recovery.
    pub evicted: Vec<(usize, u32)>,
    pub conditioning_caps: u64,
}

impl PartialEq for PhaseTrace {
    fn eq(&self, other: &Self) -> bool {
        self.candidate_pool == other.candidate_pool
            && self.after_structure == other.after_structure
            && self.after_recovery == other.after_recovery
            && self.final_set == other.final_set
            && self.ci_tests == other.ci_tests
            && self.effective_delta1 == other.effective_delta1
            && self.evicted == other.evicted
            && self.conditioning_caps == other.conditioning_caps
    }
}

/// Everything discovered for one category.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalNeighborhood {
    pub target: CategoryNode,
    pub pc: Vec<usize>,
    pub sp: Vec<usize>,
    pub recovered: Vec<usize>,
    pub final_cmb: Vec<usize>,
    /// Skeleton as built in phase 1, before any recovery evictions.
    pub skeleton: LabelSkeleton,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryOutcome {
    pub neighborhood: CausalNeighborhood,
    pub trace: PhaseTrace,
}

/// A category that was never processed as a target, with its positive count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkippedCategory {
    pub label_index: usize,
    pub category_value: u32,
    pub support: usize,
}

/// Result of the full run: per-category neighborhoods keyed by
/// `(label_index, category_value)` plus the deduplicated global union.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub per_category: BTreeMap<(usize, u32), CategoryOutcome>,
    pub global_selected: Vec<usize>,
    pub skipped: Vec<SkippedCategory>,
}

impl SelectionResult {
    /// Union of the per-category feature sets after each phase, sorted and
    /// deduplicated; feeds per-phase ablation reporting.
    pub fn per_phase_union(&self) -> [Vec<usize>; 4] {
        let mut unions: [HashSet<usize>; 4] = Default::default();
        for outcome in self.per_category.values() {
            let trace = &outcome.trace;
            for (bucket, set) in unions.iter_mut().zip([
                &trace.candidate_pool,
                &trace.after_structure,
                &trace.after_recovery,
                &trace.final_set,
            ]) {
                bucket.extend(set.iter().copied());
            }
        }
        unions.map(|set| {
            let mut v: Vec<usize> = set.into_iter().collect();
            v.sort_unstable();
            v
        })
    }

    /// Total conditional-independence tests per category, keyed like
    /// `per_category`.
    pub fn ci_tests_per_category(&self) -> BTreeMap<(usize, u32), u64> {
        self.per_category
            .iter()
            .map(|(&key, outcome)| (key, outcome.trace.ci_tests.iter().sum()))
            .collect()
    }
}

fn effective_delta1(config: &CamcfConfig, marginals: &[f64]) -> f64 {
    match config.threshold_mode {
        ThresholdMode::Absolute => config.delta1,
        ThresholdMode::QuantileAdaptive { quantile } => {
            let mut nonzero: Vec<f64> = marginals.iter().copied().filter(|&s| s > 0.0).collect();
            if nonzero.is_empty() {
                return config.delta1;
            }
            nonzero.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
            // linear-interpolation quantile over the sorted scores
            let h = quantile * (nonzero.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            nonzero[lo] + (nonzero[hi] - nonzero[lo]) * (h - lo as f64)
        }
    }
}

fn run_category(
    dataset: &Dataset,
    target: &CategoryNode,
    all_nodes: &[CategoryNode],
    config: &CamcfConfig,
) -> CategoryOutcome {
    let engine = MiEngine::with_conditioning_cap(dataset.features(), config.max_conditioning_size);
    let others: Vec<&CategoryNode> = all_nodes
        .iter()
        .filter(|node| node.label_index() != target.label_index())
        .collect();

    let mut tests_before = 0u64;
    let mut phase_tests = [0u64; 4];
    let mut phase_durations = [Duration::ZERO; 4];
    let mut phase = |engine: &MiEngine, slot: usize, start: Instant, tests_before: &mut u64| {
        phase_durations[slot] = start.elapsed();
        phase_tests[slot] = engine.tests_run() - *tests_before;
        *tests_before = engine.tests_run();
    };

    // Phase 1: label skeleton
    let start = Instant::now();
    let skeleton = build_label_skeleton(target, &others, config.delta2, &engine);
    phase(&engine, 0, start, &mut tests_before);

    // Phase 2: structure discovery (marginal scores are computed here and
    // reused by every later phase)
    let start = Instant::now();
    let marginals: Vec<f64> = (0..dataset.n_features())
        .map(|f| engine.scsmi(f, target, &[], &[]))
        .collect();
    let delta1 = effective_delta1(config, &marginals);
    let discovery = discover_pc(target, &skeleton, delta1, config.k1_fraction, &engine, &marginals);
    let spouses = discover_spouses(
        target,
        &discovery.pc,
        &skeleton,
        delta1,
        &engine,
        dataset.n_features(),
    );
    let pc: Vec<usize> = discovery.pc.iter().map(|sf| sf.index).collect();
    let mut cmb: Vec<usize> = pc.iter().chain(spouses.iter()).copied().collect();
    let after_structure = cmb.clone();
    phase(&engine, 1, start, &mut tests_before);

    // Phase 3: recovery
    let start = Instant::now();
    let mut working_skeleton = skeleton.clone();
    cmb = recover_features(
        target,
        cmb,
        &mut working_skeleton,
        &pc,
        delta1,
        &engine,
        &marginals,
    );
    let after_recovery = cmb.clone();
    let surviving: HashSet<(usize, u32)> = working_skeleton.keys().into_iter().collect();
    let evicted: Vec<(usize, u32)> = skeleton
        .keys()
        .into_iter()
        .filter(|key| !surviving.contains(key))
        .collect();
    phase(&engine, 2, start, &mut tests_before);

    // Phase 4: refinement against every other label's categories
    let start = Instant::now();
    let final_scored = refine_cmb(
        &cmb,
        target,
        &others,
        delta1,
        config.k2_fraction,
        config.gamma,
        &engine,
        dataset.n_features(),
    );
    let final_set: Vec<usize> = final_scored.iter().map(|sf| sf.index).collect();
    phase(&engine, 3, start, &mut tests_before);

    let recovered: Vec<usize> = after_recovery
        .iter()
        .copied()
        .filter(|f| !after_structure.contains(f))
        .collect();
    CategoryOutcome {
        neighborhood: CausalNeighborhood {
            target: target.clone(),
            pc,
            sp: spouses,
            recovered,
            final_cmb: final_set.clone(),
            skeleton,
        },
        trace: PhaseTrace {
            candidate_pool: discovery.candidate_pool,
            after_structure,
            after_recovery,
            final_set,
            ci_tests: phase_tests,
            durations: phase_durations,
            effective_delta1: delta1,
            evicted,
            conditioning_caps: engine.caps_applied(),
        },
    }
}

fn eligible_targets<'a>(
    all_nodes: &'a [CategoryNode],
    config: &CamcfConfig,
) -> (Vec<&'a CategoryNode>, Vec<SkippedCategory>) {
    let mut targets = Vec::new();
    let mut skipped = Vec::new();
    for node in all_nodes {
        let support = node.support();
        if support < config.min_category_support {
            skipped.push(SkippedCategory {
                label_index: node.label_index(),
                category_value: node.category_value(),
                support,
            });
            continue;
        }
        if config.dedup_binary {
            let siblings: Vec<u32> = all_nodes
                .iter()
                .filter(|n| n.label_index() == node.label_index())
                .map(|n| n.category_value())
                .collect();
            // complements of a binary label carry identical information
            if siblings.len() == 2 && node.category_value() == siblings[0] {
                skipped.push(SkippedCategory {
                    label_index: node.label_index(),
                    category_value: node.category_value(),
                    support,
                });
                continue;
            }
        }
        targets.push(node);
    }
    (targets, skipped)
}

/// Runs the full pipeline over every eligible category and unions the
/// per-category results. Deterministic given the dataset and configuration.
pub fn select_features(
    dataset: &Dataset,
    config: &CamcfConfig,
) -> Result<SelectionResult, PipelineError> {
    select_features_with_threads(dataset, config, 1)
}

/// Same as [`select_features`], with per-category work spread over a thread
/// pool when `threads > 1`. Results are assembled in category order, so the
/// outcome does not depend on scheduling.
pub fn select_features_with_threads(
    dataset: &Dataset,
    config: &CamcfConfig,
    threads: usize,
) -> Result<SelectionResult, PipelineError> {
    config.validate().map_err(PipelineError::Config)?;
    let all_nodes = flatten_labels(dataset, 1);
    let (targets, skipped) = eligible_targets(&all_nodes, config);

    let outcomes: Vec<((usize, u32), CategoryOutcome)> = if threads > 1 && targets.len() > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction");
        pool.install(|| {
            targets
                .par_iter()
                .map(|target| (target.key(), run_category(dataset, target, &all_nodes, config)))
                .collect()
        })
    } else {
        targets
            .iter()
            .map(|target| (target.key(), run_category(dataset, target, &all_nodes, config)))
            .collect()
    };

    let mut per_category = BTreeMap::new();
    let mut union: HashSet<usize> = HashSet::new();
    for (key, outcome) in outcomes {
        union.extend(outcome.neighborhood.final_cmb.iter().copied());
        per_category.insert(key, outcome);
    }
    let mut global_selected: Vec<usize> = union.into_iter().collect();
    global_selected.sort_unstable();

    Ok(SelectionResult {
        per_category,
        global_selected,
        skipped,
    })
}
