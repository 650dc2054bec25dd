//! Shared fixtures for the integration and acceptance suites.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use camcf::data::{Dataset, DiscreteColumn};
use camcf::synth::{BnNode, BnSpec, NodeKind};

/// Chain X -> C with `n_noise` independent binary noise features.
/// Node order: X, C, noise...
pub fn chain_network(n_noise: usize) -> BnSpec {
    let mut nodes = vec![
        BnNode {
            name: "x".into(),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        },
        BnNode {
            name: "c".into(),
            kind: NodeKind::LabelCategory,
            arity: 2,
            parents: vec![0],
            cpt: vec![vec![0.85, 0.15], vec![0.15, 0.85]],
        },
    ];
    for i in 0..n_noise {
        nodes.push(BnNode {
            name: format!("noise{i}"),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        });
    }
    BnSpec::new(nodes).unwrap()
}

/// Collider C -> W <- Z with noisy-OR rows, plus independent noise features.
/// Node order: C, Z, W, noise...; dataset feature indices: Z=0, W=1,
/// noise=2...
pub fn collider_network(n_noise: usize) -> BnSpec {
    let mut nodes = vec![
        BnNode {
            name: "c".into(),
            kind: NodeKind::LabelCategory,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        },
        BnNode {
            name: "z".into(),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        },
        BnNode {
            name: "w".into(),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![0, 1],
            cpt: vec![
                vec![0.95, 0.05],
                vec![0.4, 0.6],
                vec![0.4, 0.6],
                vec![0.05, 0.95],
            ],
        },
    ];
    for i in 0..n_noise {
        nodes.push(BnNode {
            name: format!("noise{i}"),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        });
    }
    BnSpec::new(nodes).unwrap()
}

/// Two label nodes driven by a shared feature: X -> C_a, X -> C_b. The near
/// copy C_b blocks X's conditional signal toward C_a while X keeps the
/// larger marginal dependence, so structure discovery drops X and the
/// recovery competition must restore it.
///
/// Node order: X, C_a, C_b, 3 noise features. Dataset: X = feature 0,
/// target label = 0, blocker label = 1.
pub fn blocking_network() -> BnSpec {
    let mut nodes = vec![
        BnNode {
            name: "x".into(),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        },
        BnNode {
            name: "c_target".into(),
            kind: NodeKind::LabelCategory,
            arity: 2,
            parents: vec![0],
            cpt: vec![vec![0.75, 0.25], vec![0.25, 0.75]],
        },
        BnNode {
            name: "c_blocker".into(),
            kind: NodeKind::LabelCategory,
            arity: 2,
            parents: vec![0],
            cpt: vec![vec![0.97, 0.03], vec![0.03, 0.97]],
        },
    ];
    for i in 0..3 {
        nodes.push(BnNode {
            name: format!("noise{i}"),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        });
    }
    BnSpec::new(nodes).unwrap()
}

/// A hand diamond plus isolated node, used for d-separation checks:
/// f0 -> c0, f0 -> f1, (c0, f1) -> f2, f3 isolated.
pub fn diamond_network() -> BnSpec {
    let nodes = vec![
        BnNode {
            name: "f0".into(),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        },
        BnNode {
            name: "c0".into(),
            kind: NodeKind::LabelCategory,
            arity: 2,
            parents: vec![0],
            cpt: vec![vec![0.85, 0.15], vec![0.15, 0.85]],
        },
        BnNode {
            name: "f1".into(),
            kind: NodeKind::Feature,
            arity: 3,
            parents: vec![0],
            cpt: vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.2, 0.7]],
        },
        BnNode {
            name: "f2".into(),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![1, 2],
            cpt: vec![
                vec![0.9, 0.1],
                vec![0.6, 0.4],
                vec![0.35, 0.65],
                vec![0.65, 0.35],
                vec![0.4, 0.6],
                vec![0.1, 0.9],
            ],
        },
        BnNode {
            name: "f3".into(),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.5, 0.5]],
        },
    ];
    BnSpec::new(nodes).unwrap()
}

/// The column sampled for a node, whichever side of the dataset it landed on.
pub fn node_column<'a>(bn: &BnSpec, dataset: &'a Dataset, node: usize) -> &'a DiscreteColumn {
    if let Some(f) = bn.feature_index_of(node) {
        return dataset.feature(f);
    }
    let l = bn
        .label_nodes()
        .iter()
        .position(|&n| n == node)
        .expect("node is a label");
    dataset.label(l)
}

/// F1 between a predicted and a true index set; two empty sets count as a
/// perfect match.
pub fn set_f1(predicted: &[usize], truth: &[usize]) -> f64 {
    if predicted.is_empty() && truth.is_empty() {
        return 1.0;
    }
    let truth_set: std::collections::HashSet<usize> = truth.iter().copied().collect();
    let tp = predicted.iter().filter(|f| truth_set.contains(f)).count() as f64;
    let denom = predicted.len() as f64 + truth.len() as f64;
    2.0 * tp / denom
}

pub const FLAGS_LIKE_SAMPLES: usize = 194;
pub const FLAGS_LIKE_FEATURES: usize = 19;
pub const FLAGS_LIKE_LABELS: usize = 7;

/// Deterministic stand-in for the 194x19, 7-label benchmark table: integer
/// features with assorted arities, binary labels driven by two feature
/// "causes" each, label cardinality around 3.4. Rows are resampled until at
/// least one label is positive so ranking metrics never degenerate.
pub fn flags_like_dataset() -> Dataset {
    let arities: [u32; FLAGS_LIKE_FEATURES] =
        [6, 4, 8, 3, 2, 2, 2, 2, 5, 3, 2, 2, 4, 2, 2, 3, 2, 4, 2];
    // three drivers per label, drawn from a shared six-feature pool so the
    // selected subset stays informative for every label
    let drivers: [[usize; 3]; FLAGS_LIKE_LABELS] = [
        [0, 1, 2],
        [1, 8, 12],
        [2, 12, 15],
        [0, 8, 15],
        [1, 2, 8],
        [0, 12, 15],
        [2, 8, 15],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(943);

    let mut features = vec![Vec::with_capacity(FLAGS_LIKE_SAMPLES); FLAGS_LIKE_FEATURES];
    let mut labels = vec![Vec::with_capacity(FLAGS_LIKE_SAMPLES); FLAGS_LIKE_LABELS];
    for _ in 0..FLAGS_LIKE_SAMPLES {
        loop {
            let row: Vec<u32> = arities.iter().map(|&a| rng.random_range(0..a)).collect();
            let mut label_row = [0u32; FLAGS_LIKE_LABELS];
            for (j, driver) in drivers.iter().enumerate() {
                let norm = |f: usize| row[f] as f64 / (arities[f] - 1) as f64;
                let signal = driver.iter().map(|&f| norm(f)).sum::<f64>() / 3.0;
                // steep response keeps the labels predictable from their
                // drivers instead of hovering near even odds
                let response = 1.0 / (1.0 + (-12.0 * (signal - 0.5)).exp());
                let mut p = 0.04 + 0.92 * response;
                if rng.random::<f64>() < 0.02 {
                    p = 1.0 - p;
                }
                label_row[j] = u32::from(rng.random::<f64>() < p);
            }
            if label_row.iter().sum::<u32>() == 0 {
                continue;
            }
            for (column, &code) in features.iter_mut().zip(&row) {
                column.push(code);
            }
            for (column, &code) in labels.iter_mut().zip(&label_row) {
                column.push(code);
            }
            break;
        }
    }

    let feature_columns: Vec<DiscreteColumn> = features
        .into_iter()
        .zip(arities)
        .map(|(codes, arity)| DiscreteColumn::new(codes, arity).unwrap())
        .collect();
    let label_columns: Vec<DiscreteColumn> = labels
        .into_iter()
        .map(|codes| DiscreteColumn::new(codes, 2).unwrap())
        .collect();
    let feature_names = (0..FLAGS_LIKE_FEATURES).map(|i| format!("attr{i}")).collect();
    let label_names = (0..FLAGS_LIKE_LABELS).map(|j| format!("color{j}")).collect();
    Dataset::new(feature_columns, label_columns, feature_names, label_names).unwrap()
}

/// Path of the committed CSV fixture for the stand-in benchmark table.
pub fn flags_like_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join("flags_like.csv")
}
