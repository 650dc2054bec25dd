//! Plug-in information measures over discrete columns.
//!
//! Everything here is the exact maximum-likelihood estimate computed from
//! empirical frequencies, in bits, with `0 log 0 = 0`. Conditioning sets of
//! any size are realized by composing their columns into a single joint
//! column over *observed* states only, so memory stays proportional to the
//! number of distinct joint states actually present in the data.
//!
//! The two class-specific forms, [`scsmi`] (feature vs. target category) and
//! [`dcsmi`] (category vs. category), are thin semantic wrappers over
//! [`conditional_mutual_information`]; they exist so call sites read like the
//! selection procedure they implement.

use std::collections::HashMap;

use thiserror::Error;

use crate::data::{CategoryNode, DiscreteColumn};

#[derive(Debug, Error, PartialEq)]
pub enum InfoError {
    #[error("column lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("information measures need at least one sample")]
    EmptyColumn,
}

/// Rounding slop clamped away from MI-style quantities, which are
/// non-negative for the plug-in estimator.
fn clamp_non_negative(value: f64) -> f64 {
    if value < 0.0 {
        debug_assert!(value > -1e-9, "plug-in estimate far below zero: {value}");
        0.0
    } else {
        value
    }
}

/// Marginal entropy H(X) in bits.
pub fn entropy(x: &DiscreteColumn) -> Result<f64, InfoError> {
    if x.is_empty() {
        return Err(InfoError::EmptyColumn);
    }
    let mut counts = vec![0usize; x.arity() as usize];
    for &c in x.codes() {
        counts[c as usize] += 1;
    }
    let n = x.len() as f64;
    let mut h = 0.0;
    for &count in &counts {
        if count > 0 {
            let p = count as f64 / n;
            h -= p * p.log2();
        }
    }
    Ok(clamp_non_negative(h))
}

/// Composes two columns into one whose codes distinguish joint states.
///
/// Codes are assigned by first appearance, so the result is deterministic
/// and its arity equals the number of distinct observed pairs.
fn encode_pair(a: &DiscreteColumn, b: &DiscreteColumn) -> Result<DiscreteColumn, InfoError> {
    if a.len() != b.len() {
        return Err(InfoError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    let product = a.arity() as usize * b.arity() as usize;
    let mut codes = Vec::with_capacity(n);
    let mut next = 0u32;
    if product <= 4 * n.max(256) {
        let mut map = vec![u32::MAX; product];
        for (&ca, &cb) in a.codes().iter().zip(b.codes()) {
            let key = ca as usize * b.arity() as usize + cb as usize;
            if map[key] == u32::MAX {
                map[key] = next;
                next += 1;
            }
            codes.push(map[key]);
        }
    } else {
        let mut map: HashMap<u64, u32> = HashMap::new();
        for (&ca, &cb) in a.codes().iter().zip(b.codes()) {
            let key = u64::from(ca) * u64::from(b.arity()) + u64::from(cb);
            let code = *map.entry(key).or_insert_with(|| {
                let c = next;
                next += 1;
                c
            });
            codes.push(code);
        }
    }
    Ok(DiscreteColumn::new(codes, next.max(1)).expect("codes below arity by construction"))
}

/// Composes a sequence of columns into one column over observed joint states.
///
/// The empty sequence encodes to the constant column of length `n_samples`,
/// which is what conditioning on nothing means.
pub fn joint_encode(
    columns: &[&DiscreteColumn],
    n_samples: usize,
) -> Result<DiscreteColumn, InfoError> {
    if n_samples == 0 {
        return Err(InfoError::EmptyColumn);
    }
    match columns {
        [] => Ok(DiscreteColumn::new(vec![0; n_samples], 1).expect("constant column")),
        [single] => {
            if single.len() != n_samples {
                return Err(InfoError::LengthMismatch(single.len(), n_samples));
            }
            Ok((*single).clone())
        }
        [first, rest @ ..] => {
            if first.len() != n_samples {
                return Err(InfoError::LengthMismatch(first.len(), n_samples));
            }
            let mut acc = (*first).clone();
            for col in rest {
                acc = encode_pair(&acc, col)?;
            }
            Ok(acc)
        }
    }
}

/// Plug-in mutual information I(X; Y) in bits.
pub fn mutual_information(x: &DiscreteColumn, y: &DiscreteColumn) -> Result<f64, InfoError> {
    if x.len() != y.len() {
        return Err(InfoError::LengthMismatch(x.len(), y.len()));
    }
    let joint = encode_pair(x, y)?;
    Ok(clamp_non_negative(entropy(x)? + entropy(y)? - entropy(&joint)?))
}

/// Plug-in conditional mutual information I(X; Y | S) in bits.
///
/// Computed through the entropy identity
/// `H(X,S) + H(Y,S) - H(S) - H(X,Y,S)`, which equals the stratified sum over
/// observed states of S. With an empty conditioning set this reduces to
/// [`mutual_information`].
pub fn conditional_mutual_information(
    x: &DiscreteColumn,
    y: &DiscreteColumn,
    s: &[&DiscreteColumn],
) -> Result<f64, InfoError> {
    if x.len() != y.len() {
        return Err(InfoError::LengthMismatch(x.len(), y.len()));
    }
    if s.is_empty() {
        return mutual_information(x, y);
    }
    let s_col = joint_encode(s, x.len())?;
    let xs = encode_pair(x, &s_col)?;
    let ys = encode_pair(y, &s_col)?;
    let xys = encode_pair(x, &ys)?;
    Ok(clamp_non_negative(
        entropy(&xs)? + entropy(&ys)? - entropy(&s_col)? - entropy(&xys)?,
    ))
}

/// Feature-to-category dependence: I(X; C | S) against the target's
/// binary indicator.
pub fn scsmi(
    feature: &DiscreteColumn,
    target: &CategoryNode,
    s: &[&DiscreteColumn],
) -> Result<f64, InfoError> {
    conditional_mutual_information(feature, target.indicator(), s)
}

/// Category-to-category dependence: I(C_a; C_b | S) between two indicator
/// columns. Symmetric in its first two arguments.
pub fn dcsmi(a: &CategoryNode, b: &CategoryNode, s: &[&DiscreteColumn]) -> Result<f64, InfoError> {
    conditional_mutual_information(a.indicator(), b.indicator(), s)
}
