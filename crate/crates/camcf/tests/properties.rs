//! Determinism, invariance, estimator-oracle agreement, and the
//! conditional-independence test budget on randomized fixtures.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use camcf::data::{CamcfConfig, Dataset, DiscreteColumn};
use camcf::pipeline::{select_features, SelectionResult};
use camcf::synth::oracle;

fn random_dataset(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(30..120);
    let m = rng.random_range(4..10);
    let l = rng.random_range(2..4);
    let features: Vec<DiscreteColumn> = (0..m)
        .map(|_| {
            let arity = rng.random_range(2..5);
            DiscreteColumn::new((0..n).map(|_| rng.random_range(0..arity)).collect(), arity)
                .unwrap()
        })
        .collect();
    // labels loosely coupled to the first feature so selection has work to do
    let labels: Vec<DiscreteColumn> = (0..l)
        .map(|_| {
            let codes: Vec<u32> = features[0]
                .codes()
                .iter()
                .map(|&c| {
                    let base = u32::from(c % 2 == 1);
                    if rng.random::<f64>() < 0.25 {
                        1 - base
                    } else {
                        base
                    }
                })
                .collect();
            DiscreteColumn::new(codes, 2).unwrap()
        })
        .collect();
    Dataset::with_default_names(features, labels).unwrap()
}

fn test_config() -> CamcfConfig {
    CamcfConfig {
        min_category_support: 3,
        ..CamcfConfig::default()
    }
}

/// Scheduling- and representation-independent view of a result.
fn summarize(result: &SelectionResult) -> (Vec<usize>, BTreeMap<(usize, u32), Vec<Vec<usize>>>) {
    let per_category = result
        .per_category
        .iter()
        .map(|(&key, outcome)| {
            (
                key,
                vec![
                    outcome.neighborhood.pc.clone(),
                    outcome.neighborhood.sp.clone(),
                    outcome.neighborhood.recovered.clone(),
                    outcome.neighborhood.final_cmb.clone(),
                ],
            )
        })
        .collect();
    (result.global_selected.clone(), per_category)
}

#[test]
fn repeated_runs_are_identical() {
    for seed in 0..10 {
        let ds = random_dataset(seed);
        let config = test_config();
        let a = select_features(&ds, &config).unwrap();
        let b = select_features(&ds, &config).unwrap();
        assert_eq!(a, b, "seed {seed}");
    }
}

#[test]
fn thread_count_does_not_change_the_result() {
    for seed in 0..5 {
        let ds = random_dataset(seed);
        let config = test_config();
        let sequential = select_features(&ds, &config).unwrap();
        let parallel =
            camcf::pipeline::select_features_with_threads(&ds, &config, 4).unwrap();
        assert_eq!(summarize(&sequential), summarize(&parallel), "seed {seed}");
    }
}

#[test]
fn row_permutation_leaves_the_selection_unchanged() {
    for seed in 0..10 {
        let ds = random_dataset(seed);
        let n = ds.n_samples();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0xABCD));

        let permute = |col: &DiscreteColumn| {
            DiscreteColumn::new(perm.iter().map(|&i| col.codes()[i]).collect(), col.arity())
                .unwrap()
        };
        let permuted = Dataset::new(
            ds.features().iter().map(&permute).collect(),
            ds.labels().iter().map(&permute).collect(),
            ds.feature_names().to_vec(),
            ds.label_names().to_vec(),
        )
        .unwrap();

        let config = test_config();
        let original = select_features(&ds, &config).unwrap();
        let shuffled = select_features(&permuted, &config).unwrap();
        assert_eq!(summarize(&original), summarize(&shuffled), "seed {seed}");
    }
}

#[test]
fn code_relabeling_leaves_the_selection_unchanged() {
    for seed in 0..10 {
        let ds = random_dataset(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234);
        let victim = rng.random_range(0..ds.n_features());

        let features: Vec<DiscreteColumn> = ds
            .features()
            .iter()
            .enumerate()
            .map(|(f, col)| {
                if f == victim {
                    let arity = col.arity();
                    DiscreteColumn::new(
                        col.codes().iter().map(|&c| arity - 1 - c).collect(),
                        arity,
                    )
                    .unwrap()
                } else {
                    col.clone()
                }
            })
            .collect();
        let relabeled = Dataset::new(
            features,
            ds.labels().to_vec(),
            ds.feature_names().to_vec(),
            ds.label_names().to_vec(),
        )
        .unwrap();

        let config = test_config();
        let original = select_features(&ds, &config).unwrap();
        let recoded = select_features(&relabeled, &config).unwrap();
        assert_eq!(
            original.global_selected, recoded.global_selected,
            "seed {seed}, feature {victim}"
        );
    }
}

#[test]
fn ci_test_budget_stays_within_the_quadratic_bound() {
    for seed in 0..8 {
        let ds = random_dataset(seed);
        let m = ds.n_features() as u64;
        let result = select_features(&ds, &test_config()).unwrap();
        let l = ds
            .labels()
            .iter()
            .map(|c| {
                let mut values: Vec<u32> = c.codes().to_vec();
                values.sort_unstable();
                values.dedup();
                values.len() as u64
            })
            .sum::<u64>();
        for (key, tests) in result.ci_tests_per_category() {
            let bound = 5 * (m * m + m * l) + 10;
            assert!(
                tests <= bound,
                "seed {seed}, category {key:?}: {tests} tests > bound {bound}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimators_match_the_enumeration_oracle(
        seed in 0u64..10_000,
        n in 2usize..10,
        arity in 2u32..4,
        cond_size in 0usize..3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut column = || {
            DiscreteColumn::new((0..n).map(|_| rng.random_range(0..arity)).collect(), arity)
                .unwrap()
        };
        let x = column();
        let y = column();
        let cond: Vec<DiscreteColumn> = (0..cond_size).map(|_| column()).collect();
        let cond_refs: Vec<&DiscreteColumn> = cond.iter().collect();

        let h = camcf::entropy(&x).unwrap();
        prop_assert!((h - oracle::entropy_direct(&x)).abs() <= 1e-12);

        let cmi = camcf::conditional_mutual_information(&x, &y, &cond_refs).unwrap();
        let direct = oracle::cmi_direct(&x, &y, &cond_refs);
        prop_assert!(
            (cmi - direct).abs() <= 1e-12,
            "cmi {} vs direct {}",
            cmi,
            direct
        );
    }
}
