//! Induced subtrees, agreement predicates, common-subtree counting, and the
//! maximum-agreement dynamic program for binary trees.
//!
//! The induced subtree of a leaf set S is the union of paths from the lowest
//! common ancestor of S down to S, with every non-root vertex that has a
//! single child on those paths suppressed. A retained vertex additionally
//! "meets the degree condition" when its out-degree in the host equals its
//! out-degree in the induced shape; the branching-process probability
//! formulas count exactly the hosts where that holds everywhere.

use std::collections::BTreeSet;

use itertools::Itertools;
use thiserror::Error;

use crate::trees::{LabelledTree, PlaneTree, TreeBuilder, UnrootedBinaryTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AgreementError {
    #[error("a leaf subset must be nonempty")]
    EmptySubset,
    #[error("label {0} does not occur in the tree")]
    UnknownLabel(usize),
    #[error("inducing in an unrooted tree needs at least one leaf outside the subset")]
    NeedOutsideLeaf,
    #[error("the two trees carry different label sets")]
    LabelSetMismatch,
    #[error("both input trees must be binary")]
    NonBinaryInput,
    #[error("{subsets} subsets of size {a} exceed the counting budget of {budget}")]
    SubsetSpaceTooLarge { subsets: u128, a: usize, budget: u64 },
    #[error("refusing to enumerate shapes with {0} leaves")]
    ShapeEnumerationTooLarge(usize),
    #[error("argument out of range: {0}")]
    Domain(String),
}

/// The induced subtree of a leaf subset, together with where and how it sits
/// in the host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedResult {
    /// The induced shape, leaf-labelled by the subset.
    pub shape: LabelledTree,
    /// Host vertex at which the induced shape is rooted (the LCA of the
    /// subset; for the unrooted variant, a vertex id of the unrooted host).
    pub lca: usize,
    /// True when every retained vertex keeps its host out-degree.
    pub degree_condition_met: bool,
}

/// Extracts the subtree of `host` induced by `subset`, preserving child
/// order. The root of the result is the LCA of the subset and is never
/// suppressed; other path vertices with a single child on the paths are.
pub fn induce_rooted(host: &LabelledTree, subset: &BTreeSet<usize>) -> Result<InducedResult, AgreementError> {
    if subset.is_empty() {
        return Err(AgreementError::EmptySubset);
    }
    let shape = host.shape();
    let mut member = vec![false; shape.vertex_count()];
    for &label in subset {
        let v = host.leaf_with_label(label).ok_or(AgreementError::UnknownLabel(label))?;
        member[v] = true;
    }

    // How many subset leaves sit below each vertex. Children have larger ids
    // than their parent, so one descending sweep suffices.
    let mut below = vec![0usize; shape.vertex_count()];
    for v in shape.vertices().rev() {
        if member[v] {
            below[v] += 1;
        }
        if let Some(p) = shape.parent(v) {
            below[p] += below[v];
        }
    }

    // Descend from the root to the LCA: the deepest vertex still holding the
    // whole subset.
    let a = subset.len();
    let mut lca = PlaneTree::ROOT;
    while let Some(&child) = shape.children(lca).iter().find(|&&c| below[c] == a) {
        lca = child;
    }

    // Rebuild the induced shape, walking past suppressed chain vertices
    // (those with exactly one child subtree meeting the subset).
    let mut builder = TreeBuilder::new();
    let root_label = host.label_of(lca).filter(|_| shape.is_leaf(lca));
    let root = builder.add(None, root_label);
    let mut retained = vec![(lca, root)];
    let mut stack = vec![(lca, root)];
    while let Some((hv, iv)) = stack.pop() {
        for &child in shape.children(hv) {
            if below[child] == 0 {
                continue;
            }
            let mut cur = child;
            loop {
                let live: Vec<usize> =
                    shape.children(cur).iter().copied().filter(|&c| below[c] > 0).collect();
                if live.len() == 1 {
                    cur = live[0];
                } else {
                    break;
                }
            }
            let label = host.label_of(cur).filter(|_| shape.is_leaf(cur));
            let id = builder.add(Some(iv), label);
            retained.push((cur, id));
            if !shape.is_leaf(cur) {
                stack.push((cur, id));
            }
        }
    }
    let induced = builder.finish_labelled();
    let degree_condition_met = retained
        .iter()
        .all(|&(hv, iv)| shape.out_degree(hv) == induced.shape().out_degree(iv));
    Ok(InducedResult { shape: induced, lca, degree_condition_met })
}

/// Induced subtree of a subset in an unrooted binary tree: root the host at
/// a leaf outside the subset, induce, and canonicalize child order. The
/// smallest label outside the subset is always used, so the result is
/// deterministic. The rooted shape depends on that choice only through
/// where the root path attaches to the subset's spanning subtree: its
/// unrooted topology (set of leaf splits) is choice-independent, and for a
/// uniform host every rooted shape is equally likely under any fixed rule.
/// The reported `lca` is the attachment vertex, as an id of the unrooted
/// host.
pub fn induce_unrooted(host: &UnrootedBinaryTree, subset: &BTreeSet<usize>) -> Result<InducedResult, AgreementError> {
    let labels = host.labels();
    if let Some(&missing) = subset.iter().find(|l| !labels.contains(l)) {
        return Err(AgreementError::UnknownLabel(missing));
    }
    let outside = labels
        .into_iter()
        .find(|l| !subset.contains(l))
        .ok_or(AgreementError::NeedOutsideLeaf)?;
    induce_unrooted_via(host, subset, outside)
}

/// As [`induce_unrooted`], but with the outside leaf chosen explicitly.
pub(crate) fn induce_unrooted_via(
    host: &UnrootedBinaryTree,
    subset: &BTreeSet<usize>,
    outside: usize,
) -> Result<InducedResult, AgreementError> {
    if subset.is_empty() {
        return Err(AgreementError::EmptySubset);
    }
    if subset.contains(&outside) {
        return Err(AgreementError::Domain(format!("outside leaf {outside} lies in the subset")));
    }
    let (rooted, to_host) =
        host.rooted_at_leaf(outside).ok_or(AgreementError::UnknownLabel(outside))?;
    let result = induce_rooted(&rooted, subset)?;
    Ok(InducedResult {
        shape: result.shape.canonical_unordered(),
        lca: to_host[result.lca],
        degree_condition_met: result.degree_condition_met,
    })
}

/// How two induced shapes are compared when counting agreements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// Child order matters (the branching-process model of plane trees).
    Ordered,
    /// Shapes are compared after canonical reordering (the uniform unrooted
    /// model, where trees carry no child order).
    Unordered,
}

/// Default cap on the number of subsets [`common_count`] will scan.
pub const DEFAULT_SUBSET_BUDGET: u64 = 10_000_000;

/// Number of size-`a` leaf subsets on which the two trees induce the same
/// subtree with the degree condition holding in both. Brute force over all
/// C(n,a) subsets.
pub fn common_count(
    t1: &LabelledTree,
    t2: &LabelledTree,
    a: usize,
    mode: Comparison,
) -> Result<u64, AgreementError> {
    common_count_budgeted(t1, t2, a, mode, DEFAULT_SUBSET_BUDGET)
}

pub fn common_count_budgeted(
    t1: &LabelledTree,
    t2: &LabelledTree,
    a: usize,
    mode: Comparison,
    budget: u64,
) -> Result<u64, AgreementError> {
    let labels = t1.label_set();
    if labels != t2.label_set() {
        return Err(AgreementError::LabelSetMismatch);
    }
    let n = labels.len();
    if a < 1 || a > n {
        return Err(AgreementError::Domain(format!("subset size must satisfy 1 <= a <= {n}, got {a}")));
    }
    let subsets = subset_count(n, a);
    if subsets > u128::from(budget) {
        return Err(AgreementError::SubsetSpaceTooLarge { subsets, a, budget });
    }
    let mut count = 0u64;
    for combo in labels.iter().copied().combinations(a) {
        let subset: BTreeSet<usize> = combo.into_iter().collect();
        let r1 = induce_rooted(t1, &subset)?;
        if !r1.degree_condition_met {
            continue;
        }
        let r2 = induce_rooted(t2, &subset)?;
        if !r2.degree_condition_met {
            continue;
        }
        let same = match mode {
            Comparison::Ordered => r1.shape == r2.shape,
            Comparison::Unordered => r1.shape.canonical_unordered() == r2.shape.canonical_unordered(),
        };
        if same {
            count += 1;
        }
    }
    Ok(count)
}

fn subset_count(n: usize, a: usize) -> u128 {
    let a = a.min(n - a);
    let mut acc: u128 = 1;
    for i in 0..a {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Size of the largest leaf set inducing the same unordered subtree in both
/// binary trees, by the classic quadratic dynamic program over vertex pairs.
pub fn mast_binary(t1: &LabelledTree, t2: &LabelledTree) -> Result<usize, AgreementError> {
    for t in [t1, t2] {
        let s = t.shape();
        if !s.vertices().all(|v| s.is_leaf(v) || s.out_degree(v) == 2) {
            return Err(AgreementError::NonBinaryInput);
        }
    }
    let labels = t1.label_set();
    if labels != t2.label_set() {
        return Err(AgreementError::LabelSetMismatch);
    }
    let bit_of: std::collections::BTreeMap<usize, usize> =
        labels.iter().copied().enumerate().map(|(i, l)| (l, i)).collect();
    let words = labels.len().div_ceil(64);

    // Bitset of labels below each vertex, built in one descending sweep.
    let label_sets = |t: &LabelledTree| -> Vec<Vec<u64>> {
        let s = t.shape();
        let mut below = vec![vec![0u64; words]; s.vertex_count()];
        for v in s.vertices().rev() {
            if let Some(l) = t.label_of(v) {
                let b = bit_of[&l];
                below[v][b / 64] |= 1u64 << (b % 64);
            }
            if let Some(p) = s.parent(v) {
                let row = below[v].clone();
                for (word, bits) in below[p].iter_mut().zip(row) {
                    *word |= bits;
                }
            }
        }
        below
    };
    let below1 = label_sets(t1);
    let below2 = label_sets(t2);
    let contains = |set: &[u64], label: usize| -> bool {
        let b = bit_of[&label];
        set[b / 64] >> (b % 64) & 1 == 1
    };

    let (s1, s2) = (t1.shape(), t2.shape());
    let (v1, v2) = (s1.vertex_count(), s2.vertex_count());
    let mut dp = vec![vec![0usize; v2]; v1];
    for u in s1.vertices().rev() {
        for v in s2.vertices().rev() {
            dp[u][v] = if let Some(l) = t1.label_of(u) {
                usize::from(contains(&below2[v], l))
            } else if let Some(l) = t2.label_of(v) {
                usize::from(contains(&below1[u], l))
            } else {
                let (ul, ur) = (s1.children(u)[0], s1.children(u)[1]);
                let (vl, vr) = (s2.children(v)[0], s2.children(v)[1]);
                // Either the match splits across both roots (two pairings),
                // or one side's root is dropped into a single subtree.
                (dp[ul][vl] + dp[ur][vr])
                    .max(dp[ul][vr] + dp[ur][vl])
                    .max(dp[ul][v].max(dp[ur][v]))
                    .max(dp[u][vl].max(dp[u][vr]))
            };
        }
    }
    Ok(dp[PlaneTree::ROOT][PlaneTree::ROOT])
}

/// Largest leaf count for which [`enumerate_shapes`] will run; the number of
/// shapes grows super-exponentially.
pub const MAX_SHAPE_LEAVES: usize = 10;

/// All plane trees with exactly `leaves` leaves whose internal out-degrees
/// lie in 2..=max_degree.
pub fn enumerate_shapes(leaves: usize, max_degree: usize) -> Result<Vec<PlaneTree>, AgreementError> {
    if leaves == 0 || max_degree < 2 {
        return Err(AgreementError::Domain(format!(
            "shape enumeration needs leaves >= 1 and max degree >= 2, got {leaves} and {max_degree}"
        )));
    }
    if leaves > MAX_SHAPE_LEAVES {
        return Err(AgreementError::ShapeEnumerationTooLarge(leaves));
    }
    let degrees: Vec<usize> = (2..=max_degree).collect();
    Ok(shapes_with_degrees(leaves, &degrees, u64::MAX).expect("u64::MAX budget cannot be exceeded"))
}

/// All plane trees with exactly `leaves` leaves and internal out-degrees
/// drawn from `degrees`; `None` when more than `max_objects` trees (counting
/// the smaller-leaf tables built along the way) would be materialized.
pub(crate) fn shapes_with_degrees(
    leaves: usize,
    degrees: &[usize],
    max_objects: u64,
) -> Option<Vec<PlaneTree>> {
    let mut made: u64 = 0;
    let mut table: Vec<Vec<PlaneTree>> = Vec::with_capacity(leaves + 1);
    table.push(Vec::new()); // no tree has zero leaves
    table.push(vec![PlaneTree::leaf()]);
    for k in 2..=leaves {
        let mut shapes = Vec::new();
        for &degree in degrees {
            if degree > k {
                continue;
            }
            for split in compositions(k, degree) {
                let pools: Vec<&[PlaneTree]> = split.iter().map(|&c| table[c].as_slice()).collect();
                for parts in pools.iter().map(|p| p.iter()).multi_cartesian_product() {
                    made += 1;
                    if made > max_objects {
                        return None;
                    }
                    shapes.push(PlaneTree::node(parts.into_iter().cloned().collect()));
                }
            }
        }
        table.push(shapes);
    }
    table.pop()
}

/// All ways to write `total` as an ordered sum of `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn extend(remaining: usize, parts_left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts_left == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 1..=(remaining - parts_left + 1) {
            prefix.push(first);
            extend(remaining - first, parts_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    debug_assert!(parts >= 1 && total >= parts);
    extend(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}
