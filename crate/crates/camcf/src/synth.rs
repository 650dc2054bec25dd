//! Synthetic discrete Bayesian networks with known ground truth.
//!
//! Networks are generated (or hand-built) with nodes tagged as features or
//! binary label categories, forward-sampled into a [`Dataset`], and queried
//! for ground-truth structure: [`true_markov_blanket`] reads the answer off
//! the DAG, [`d_separated`] decides graphical independence, and
//! [`brute_force_mb`] recovers a blanket from data by exhaustive
//! conditional-independence testing. The `oracle` submodule evaluates
//! information measures by direct summation over the explicit joint table,
//! deliberately sharing no code with the estimators in [`crate::info`].

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{CategoryNode, Dataset, DiscreteColumn};
use crate::info;

pub const BN_FORMAT: &str = "camcf-bn/1";

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("node {index} lists parent {parent}, which does not precede it")]
    ParentOrder { index: usize, parent: usize },
    #[error("node {index} has {rows} CPT rows, expected {expected}")]
    CptShape {
        index: usize,
        rows: usize,
        expected: usize,
    },
    #[error("node {index} CPT row {row} sums to {sum}, expected 1")]
    CptRowSum { index: usize, row: usize, sum: f64 },
    #[error("node {index} has arity 0")]
    ZeroArity { index: usize },
    #[error("network has no {0} nodes")]
    MissingNodeKind(&'static str),
    #[error("unsupported format {0:?}, expected {BN_FORMAT:?}")]
    Format(String),
    #[error("exhaustive blanket search is limited to 12 features, got {0}")]
    TooManyFeatures(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Feature,
    /// Becomes a binary label column when sampled.
    LabelCategory,
}

/// One node of the network: its parents (which must precede it in the node
/// list, making the list a topological order) and a CPT with one row per
/// combination of parent states, in mixed-radix order over the parent list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BnNode {
    pub name: String,
    pub kind: NodeKind,
    pub arity: u32,
    pub parents: Vec<usize>,
    pub cpt: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BnSpec {
    pub format: String,
    pub nodes: Vec<BnNode>,
}

impl BnSpec {
    pub fn new(nodes: Vec<BnNode>) -> Result<Self, SynthError> {
        let spec = Self {
            format: BN_FORMAT.to_string(),
            nodes,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        if self.format != BN_FORMAT {
            return Err(SynthError::Format(self.format.clone()));
        }
        for (index, node) in self.nodes.iter().enumerate() {
            if node.arity == 0 {
                return Err(SynthError::ZeroArity { index });
            }
            if let Some(&parent) = node.parents.iter().find(|&&p| p >= index) {
                return Err(SynthError::ParentOrder { index, parent });
            }
            let expected: usize = node
                .parents
                .iter()
                .map(|&p| self.nodes[p].arity as usize)
                .product();
            if node.cpt.len() != expected {
                return Err(SynthError::CptShape {
                    index,
                    rows: node.cpt.len(),
                    expected,
                });
            }
            for (row, dist) in node.cpt.iter().enumerate() {
                if dist.len() != node.arity as usize {
                    return Err(SynthError::CptShape {
                        index,
                        rows: dist.len(),
                        expected: node.arity as usize,
                    });
                }
                let sum: f64 = dist.iter().sum();
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(SynthError::CptRowSum { index, row, sum });
                }
            }
        }
        Ok(())
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Node indices tagged as features, in node order.
    pub fn feature_nodes(&self) -> Vec<usize> {
        self.node_indices(NodeKind::Feature)
    }

    /// Node indices tagged as label categories, in node order.
    pub fn label_nodes(&self) -> Vec<usize> {
        self.node_indices(NodeKind::LabelCategory)
    }

    fn node_indices(&self, kind: NodeKind) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// Position of `node` among the feature nodes, i.e. its column index in
    /// a sampled dataset.
    pub fn feature_index_of(&self, node: usize) -> Option<usize> {
        self.feature_nodes().iter().position(|&i| i == node)
    }

    pub fn children(&self, node: usize) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.parents.contains(&node))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SynthError> {
        let spec: BnSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// CPT generation style.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CptStyle {
    /// Rows drawn from a flat Dirichlet; dependencies may be weak.
    Dirichlet,
    /// Monotone rows concentrated (roughly 0.87/0.13 in the binary
    /// single-parent case) around the normalized mean of the parent codes.
    /// Synthetic recovery tests need effects that clear finite-sample
    /// thresholds; flat-Dirichlet rows do not guarantee that, and rows with
    /// independently chosen peaks can cancel an edge outright.
    StrongEdge,
}

/// Random DAG over `n_features + n_label_nodes` nodes.
///
/// Label positions are chosen at random, then each ordered pair gets an edge
/// with probability `edge_prob`, so the node list itself is the (random)
/// topological order. Label nodes are binary; features use `arity`.
/// Deterministic given the seed.
pub fn generate_dag(
    n_features: usize,
    n_label_nodes: usize,
    edge_prob: f64,
    arity: u32,
    seed: u64,
) -> BnSpec {
    generate_dag_styled(
        n_features,
        n_label_nodes,
        edge_prob,
        arity,
        seed,
        CptStyle::Dirichlet,
    )
}

pub fn generate_dag_styled(
    n_features: usize,
    n_label_nodes: usize,
    edge_prob: f64,
    arity: u32,
    seed: u64,
    style: CptStyle,
) -> BnSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n_features + n_label_nodes;

    // choose which positions in the topological order are label nodes
    let mut positions: Vec<usize> = (0..total).collect();
    for i in (1..total).rev() {
        let j = rng.random_range(0..=i);
        positions.swap(i, j);
    }
    let mut is_label = vec![false; total];
    for &p in positions.iter().take(n_label_nodes) {
        is_label[p] = true;
    }

    let mut nodes: Vec<BnNode> = Vec::with_capacity(total);
    let mut feature_count = 0usize;
    let mut label_count = 0usize;
    for index in 0..total {
        let (kind, node_arity, name) = if is_label[index] {
            let name = format!("c{label_count}");
            label_count += 1;
            (NodeKind::LabelCategory, 2, name)
        } else {
            let name = format!("f{feature_count}");
            feature_count += 1;
            (NodeKind::Feature, arity, name)
        };
        let parents: Vec<usize> = (0..index)
            .filter(|_| rng.random::<f64>() < edge_prob)
            .collect();
        let parent_arities: Vec<u32> = parents.iter().map(|&p| nodes[p].arity).collect();
        let cpt = build_cpt(node_arity, &parent_arities, style, &mut rng);
        nodes.push(BnNode {
            name,
            kind,
            arity: node_arity,
            parents,
            cpt,
        });
    }
    BnSpec::new(nodes).expect("generated spec is valid")
}

fn dirichlet_row(arity: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // flat Dirichlet via normalized unit exponentials
    let draws: Vec<f64> = (0..arity)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let sum: f64 = draws.iter().sum();
    draws.iter().map(|d| d / sum).collect()
}

fn build_cpt(
    node_arity: u32,
    parent_arities: &[u32],
    style: CptStyle,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let rows: usize = parent_arities.iter().map(|&a| a as usize).product();
    match style {
        CptStyle::Dirichlet => (0..rows)
            .map(|_| dirichlet_row(node_arity as usize, rng))
            .collect(),
        CptStyle::StrongEdge => {
            if parent_arities.is_empty() {
                // mildly perturbed uniform keeps root entropy high
                let weights: Vec<f64> = (0..node_arity)
                    .map(|_| 1.0 + 0.5 * rng.random::<f64>())
                    .collect();
                let sum: f64 = weights.iter().sum();
                return vec![weights.iter().map(|w| w / sum).collect()];
            }
            (0..rows)
                .map(|row| {
                    // decode the mixed-radix row back into parent codes
                    let mut remaining = row;
                    let mut codes = vec![0usize; parent_arities.len()];
                    for (slot, &arity) in parent_arities.iter().enumerate().rev() {
                        codes[slot] = remaining % arity as usize;
                        remaining /= arity as usize;
                    }
                    let mean: f64 = codes
                        .iter()
                        .zip(parent_arities)
                        .map(|(&c, &a)| {
                            if a > 1 {
                                c as f64 / (a - 1) as f64
                            } else {
                                0.5
                            }
                        })
                        .sum::<f64>()
                        / parent_arities.len() as f64;
                    let target = mean * (node_arity - 1) as f64;
                    let weights: Vec<f64> = (0..node_arity)
                        .map(|v| 0.15f64.powf((v as f64 - target).abs()))
                        .collect();
                    let sum: f64 = weights.iter().sum();
                    weights.iter().map(|w| w / sum).collect()
                })
                .collect()
        }
    }
}

/// Ancestral sampling in node order. Label-category nodes become binary
/// label columns, features become feature columns. Deterministic given the
/// seed.
pub fn forward_sample(bn: &BnSpec, n_samples: usize, seed: u64) -> Result<Dataset, SynthError> {
    if bn.feature_nodes().is_empty() {
        return Err(SynthError::MissingNodeKind("feature"));
    }
    if bn.label_nodes().is_empty() {
        return Err(SynthError::MissingNodeKind("label-category"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = bn.n_nodes();
    let mut sampled: Vec<Vec<u32>> = vec![Vec::with_capacity(n_samples); total];
    let mut state = vec![0u32; total];
    for _ in 0..n_samples {
        for (index, node) in bn.nodes.iter().enumerate() {
            // mixed-radix row index over parent states, parent-list order
            let mut row = 0usize;
            for &p in &node.parents {
                row = row * bn.nodes[p].arity as usize + state[p] as usize;
            }
            let dist = &node.cpt[row];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut value = node.arity - 1;
            for (v, &p) in dist.iter().enumerate() {
                acc += p;
                if u < acc {
                    value = v as u32;
                    break;
                }
            }
            state[index] = value;
            sampled[index].push(value);
        }
    }

    let mut feature_columns = Vec::new();
    let mut feature_names = Vec::new();
    let mut label_columns = Vec::new();
    let mut label_names = Vec::new();
    for (index, node) in bn.nodes.iter().enumerate() {
        let column = DiscreteColumn::new(std::mem::take(&mut sampled[index]), node.arity)?;
        match node.kind {
            NodeKind::Feature => {
                feature_columns.push(column);
                feature_names.push(node.name.clone());
            }
            NodeKind::LabelCategory => {
                label_columns.push(column);
                label_names.push(node.name.clone());
            }
        }
    }
    Ok(Dataset::new(
        feature_columns,
        label_columns,
        feature_names,
        label_names,
    )?)
}

/// Markov blanket of `node` over all node indices: parents, children, and
/// co-parents of children.
pub fn markov_blanket_nodes(bn: &BnSpec, node: usize) -> Vec<usize> {
    let mut blanket: Vec<usize> = bn.nodes[node].parents.clone();
    for child in bn.children(node) {
        blanket.push(child);
        for &co_parent in &bn.nodes[child].parents {
            if co_parent != node {
                blanket.push(co_parent);
            }
        }
    }
    blanket.sort_unstable();
    blanket.dedup();
    blanket
}

/// Ground-truth Markov blanket of `node`, restricted to feature nodes and
/// reported as dataset feature-column indices.
pub fn true_markov_blanket(bn: &BnSpec, node: usize) -> Vec<usize> {
    markov_blanket_nodes(bn, node)
        .into_iter()
        .filter_map(|n| bn.feature_index_of(n))
        .collect()
}

/// Graphical d-separation of `x` and `y` given `z`, by reachability over
/// active trails.
pub fn d_separated(bn: &BnSpec, x: usize, y: usize, z: &[usize]) -> bool {
    let total = bn.n_nodes();
    let in_z = {
        let mut set = vec![false; total];
        for &i in z {
            set[i] = true;
        }
        set
    };
    // ancestors of the conditioning set, including the set itself
    let mut anc = in_z.clone();
    let mut stack: Vec<usize> = z.to_vec();
    while let Some(node) = stack.pop() {
        for &p in &bn.nodes[node].parents {
            if !anc[p] {
                anc[p] = true;
                stack.push(p);
            }
        }
    }

    let children: Vec<Vec<usize>> = (0..total).map(|i| bn.children(i)).collect();
    // states: (node, entered-from-child)
    let mut visited = vec![[false; 2]; total];
    let mut queue = vec![(x, true)];
    while let Some((node, from_child)) = queue.pop() {
        let dir = usize::from(from_child);
        if visited[node][dir] {
            continue;
        }
        visited[node][dir] = true;
        if node == y && !in_z[node] {
            return false;
        }
        if from_child && !in_z[node] {
            for &p in &bn.nodes[node].parents {
                queue.push((p, true));
            }
            for &c in &children[node] {
                queue.push((c, false));
            }
        } else if !from_child {
            if !in_z[node] {
                for &c in &children[node] {
                    queue.push((c, false));
                }
            }
            if anc[node] {
                for &p in &bn.nodes[node].parents {
                    queue.push((p, true));
                }
            }
        }
    }
    true
}

/// Exhaustive conditional-independence blanket search, usable only at small
/// feature counts. A feature is kept when no conditioning subset of the
/// other features (size at most 3) drives its dependence with the target to
/// or below `delta`; marginally independent features are then rescued as
/// spouses when a single kept feature re-activates them.
pub fn brute_force_mb(
    dataset: &Dataset,
    target: &CategoryNode,
    delta: f64,
) -> Result<Vec<usize>, SynthError> {
    let m = dataset.n_features();
    if m > 12 {
        return Err(SynthError::TooManyFeatures(m));
    }
    let features = dataset.features();
    let mut direct = Vec::new();
    for f in 0..m {
        let others: Vec<usize> = (0..m).filter(|&o| o != f).collect();
        let mut separated = false;
        'subsets: for size in 0..=3.min(others.len()) {
            for subset in combinations(&others, size) {
                let cols: Vec<&DiscreteColumn> =
                    subset.iter().map(|&i| &features[i]).collect();
                let value = info::scsmi(&features[f], target, &cols)
                    .expect("columns share the dataset length");
                if value <= delta {
                    separated = true;
                    break 'subsets;
                }
            }
        }
        if !separated {
            direct.push(f);
        }
    }

    let mut blanket = direct.clone();
    for z in 0..m {
        if direct.contains(&z) {
            continue;
        }
        let marginal = info::scsmi(&features[z], target, &[]).expect("same length");
        if marginal > delta {
            continue;
        }
        let rescued = direct.iter().any(|&x| {
            info::scsmi(&features[z], target, &[&features[x]]).expect("same length") > delta
        });
        if rescued {
            blanket.push(z);
        }
    }
    blanket.sort_unstable();
    Ok(blanket)
}

fn combinations(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if size > items.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut indices: Vec<usize> = (0..size).collect();
    loop {
        out.push(indices.iter().map(|&i| items[i]).collect());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if indices[i] != i + items.len() - size {
                break;
            }
        }
        indices[i] += 1;
        for j in i + 1..size {
            indices[j] = indices[j - 1] + 1;
        }
    }
}

/// Information measures evaluated by direct summation over the explicit
/// joint table. These share no code with [`crate::info`] and exist to check
/// it: strata are keyed by the raw tuple of conditioning codes and every
/// term of the defining sum is accumulated explicitly.
pub mod oracle {
    use std::collections::HashMap;

    use crate::data::DiscreteColumn;

    /// H(X) from explicit value counts.
    pub fn entropy_direct(x: &DiscreteColumn) -> f64 {
        let n = x.len() as f64;
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for &c in x.codes() {
            *counts.entry(c).or_insert(0) += 1;
        }
        counts
            .values()
            .map(|&count| {
                let p = count as f64 / n;
                -p * p.log2()
            })
            .sum()
    }

    /// I(X; Y | S) as the termwise sum over p(x, y, s) of
    /// log2( p(x, y | s) / (p(x | s) p(y | s)) ).
    pub fn cmi_direct(x: &DiscreteColumn, y: &DiscreteColumn, s: &[&DiscreteColumn]) -> f64 {
        let n = x.len();
        let mut strata: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for row in 0..n {
            let key: Vec<u32> = s.iter().map(|col| col.codes()[row]).collect();
            strata.entry(key).or_default().push(row);
        }
        let mut total = 0.0;
        for rows in strata.values() {
            let m = rows.len() as f64;
            let weight = m / n as f64;
            let mut joint: HashMap<(u32, u32), usize> = HashMap::new();
            let mut px: HashMap<u32, usize> = HashMap::new();
            let mut py: HashMap<u32, usize> = HashMap::new();
            for &row in rows {
                let (a, b) = (x.codes()[row], y.codes()[row]);
                *joint.entry((a, b)).or_insert(0) += 1;
                *px.entry(a).or_insert(0) += 1;
                *py.entry(b).or_insert(0) += 1;
            }
            for (&(a, b), &count) in &joint {
                let p_ab = count as f64 / m;
                let p_a = px[&a] as f64 / m;
                let p_b = py[&b] as f64 / m;
                total += weight * p_ab * (p_ab / (p_a * p_b)).log2();
            }
        }
        total
    }

    /// I(X; Y) by direct summation.
    pub fn mi_direct(x: &DiscreteColumn, y: &DiscreteColumn) -> f64 {
        cmi_direct(x, y, &[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_edge_probability_gives_isolated_nodes() {
        let bn = generate_dag(4, 2, 0.0, 3, 7);
        assert!(bn.nodes.iter().all(|n| n.parents.is_empty()));
    }

    #[test]
    fn full_edge_probability_chains_every_pair() {
        let bn = generate_dag(2, 1, 1.0, 2, 7);
        let edges: usize = bn.nodes.iter().map(|n| n.parents.len()).sum();
        assert_eq!(edges, 3); // C(3,2) ordered pairs under the topological order
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_dag(5, 2, 0.4, 3, 11);
        let b = generate_dag(5, 2, 0.4, 3, 11);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn sampling_is_deterministic() {
        let bn = generate_dag_styled(4, 2, 0.4, 3, 3, CptStyle::StrongEdge);
        let a = forward_sample(&bn, 50, 9).unwrap();
        let b = forward_sample(&bn, 50, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_cpts_give_constant_columns() {
        let nodes = vec![
            BnNode {
                name: "f0".into(),
                kind: NodeKind::Feature,
                arity: 3,
                parents: vec![],
                cpt: vec![vec![0.0, 1.0, 0.0]],
            },
            BnNode {
                name: "c0".into(),
                kind: NodeKind::LabelCategory,
                arity: 2,
                parents: vec![],
                cpt: vec![vec![1.0, 0.0]],
            },
        ];
        let bn = BnSpec::new(nodes).unwrap();
        let ds = forward_sample(&bn, 20, 1).unwrap();
        assert!(ds.feature(0).codes().iter().all(|&c| c == 1));
        assert!(ds.label(0).codes().iter().all(|&c| c == 0));
    }

    #[test]
    fn fair_binary_mean_approaches_half() {
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
                parents: vec![],
                cpt: vec![vec![0.5, 0.5]],
            },
        ];
        let bn = BnSpec::new(nodes).unwrap();
        let ds = forward_sample(&bn, 10_000, 5).unwrap();
        let mean = ds.feature(0).codes().iter().map(|&c| c as f64).sum::<f64>() / 10_000.0;
        // binomial 3-sigma at this sample size is about 0.015
        assert!((mean - 0.5).abs() < 0.02, "mean was {mean}");
    }

    fn three_node_chain() -> BnSpec {
        // f0 -> c0 -> f1
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
                cpt: vec![vec![0.9, 0.1], vec![0.1, 0.9]],
            },
            BnNode {
                name: "f1".into(),
                kind: NodeKind::Feature,
                arity: 2,
                parents: vec![1],
                cpt: vec![vec![0.8, 0.2], vec![0.2, 0.8]],
            },
        ];
        BnSpec::new(nodes).unwrap()
    }

    fn collider() -> BnSpec {
        // c0 -> f0 <- f1 (label and spouse share the child); noisy-OR rows
        // keep the child marginally dependent on both parents
        let nodes = vec![
            BnNode {
                name: "c0".into(),
                kind: NodeKind::LabelCategory,
                arity: 2,
                parents: vec![],
                cpt: vec![vec![0.5, 0.5]],
            },
            BnNode {
                name: "f1".into(),
                kind: NodeKind::Feature,
                arity: 2,
                parents: vec![],
                cpt: vec![vec![0.5, 0.5]],
            },
            BnNode {
                name: "f0".into(),
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
        BnSpec::new(nodes).unwrap()
    }

    #[test]
    fn blanket_of_isolated_node_is_empty() {
        let bn = generate_dag(3, 1, 0.0, 2, 1);
        let label = bn.label_nodes()[0];
        assert!(true_markov_blanket(&bn, label).is_empty());
    }

    #[test]
    fn blanket_of_chain_is_parent_and_child() {
        let bn = three_node_chain();
        assert_eq!(true_markov_blanket(&bn, 1), vec![0, 1]);
    }

    #[test]
    fn blanket_of_collider_is_child_and_spouse() {
        let bn = collider();
        // child f0 sits at dataset feature index 1, spouse f1 at index 0
        assert_eq!(true_markov_blanket(&bn, 0), vec![0, 1]);
    }

    #[test]
    fn blanket_symmetry_across_spouses() {
        let bn = collider();
        let node_blanket_of_label = markov_blanket_nodes(&bn, 0);
        assert!(node_blanket_of_label.contains(&1));
        let node_blanket_of_spouse = markov_blanket_nodes(&bn, 1);
        assert!(node_blanket_of_spouse.contains(&0));
    }

    #[test]
    fn d_separation_on_hand_graphs() {
        let chain = three_node_chain();
        assert!(!d_separated(&chain, 0, 2, &[]));
        assert!(d_separated(&chain, 0, 2, &[1]));

        let coll = collider();
        assert!(d_separated(&coll, 0, 1, &[]));
        assert!(!d_separated(&coll, 0, 1, &[2]));
    }

    #[test]
    fn spec_json_round_trips() {
        let bn = generate_dag(4, 2, 0.5, 3, 2);
        let restored = BnSpec::from_json(&bn.to_json()).unwrap();
        assert_eq!(bn.to_json(), restored.to_json());
    }

    #[test]
    fn spec_rejects_bad_row_sum() {
        let nodes = vec![BnNode {
            name: "f0".into(),
            kind: NodeKind::Feature,
            arity: 2,
            parents: vec![],
            cpt: vec![vec![0.6, 0.6]],
        }];
        assert!(matches!(
            BnSpec::new(nodes),
            Err(SynthError::CptRowSum { .. })
        ));
    }

    #[test]
    fn brute_force_blanket_on_small_networks() {
        let bn = collider();
        let ds = forward_sample(&bn, 5000, 13).unwrap();
        let target = crate::data::category_indicator(&ds, 0, 1).unwrap();
        let blanket = brute_force_mb(&ds, &target, 0.01).unwrap();
        assert_eq!(blanket, vec![0, 1]);
    }

    #[test]
    fn brute_force_ignores_independent_features() {
        let bn = generate_dag(4, 1, 0.0, 2, 3);
        let ds = forward_sample(&bn, 2000, 17).unwrap();
        let target = crate::data::category_indicator(&ds, 0, 1).unwrap();
        let blanket = brute_force_mb(&ds, &target, 0.01).unwrap();
        assert!(blanket.is_empty(), "got {blanket:?}");
    }

    #[test]
    fn brute_force_refuses_large_feature_counts() {
        let bn = generate_dag(13, 1, 0.0, 2, 3);
        let ds = forward_sample(&bn, 100, 3).unwrap();
        let target = crate::data::category_indicator(&ds, 0, 1).unwrap();
        assert!(matches!(
            brute_force_mb(&ds, &target, 0.01),
            Err(SynthError::TooManyFeatures(13))
        ));
    }

    #[test]
    fn oracle_matches_frozen_values() {
        use super::oracle;
        let x = DiscreteColumn::from_codes(vec![0, 0, 1, 1]);
        let y = DiscreteColumn::from_codes(vec![0, 1, 1, 1]);
        assert!((oracle::mi_direct(&x, &y) - 0.311_278_124_459_133).abs() < 1e-12);
        let xor = DiscreteColumn::from_codes(vec![0, 1, 1, 0]);
        let cond = DiscreteColumn::from_codes(vec![0, 1, 0, 1]);
        assert!(oracle::mi_direct(&x, &xor).abs() < 1e-12);
        assert!((oracle::cmi_direct(&x, &xor, &[&cond]) - 1.0).abs() < 1e-12);
    }
}
