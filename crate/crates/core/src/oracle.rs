//! Exhaustive enumeration oracles: slow, obviously-correct ground truth that
//! the closed forms are tested against at small sizes.
//!
//! Every generator takes an [`EnumerationBudget`] and fails loudly instead of
//! silently grinding when asked for more objects than the budget allows.

use std::collections::BTreeSet;

use itertools::Itertools;
use num::Zero;
use thiserror::Error;

use crate::agreement;
use crate::ratio::Rat;
use crate::trees::{LabelledTree, OffspringDistribution, PlaneTree, TreeBuilder, UnrootedBinaryTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} would exceed the enumeration budget of {budget} objects")]
    BudgetExceeded { what: String, budget: u64 },
    #[error("argument out of range: {0}")]
    Domain(String),
    #[error("every tree in the class has probability zero")]
    ZeroProbability,
}

/// Cap on how many objects an enumeration may materialize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_objects: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_objects: 2_000_000 }
    }
}

fn domain(msg: impl Into<String>) -> OracleError {
    OracleError::Domain(msg.into())
}

/// Every unrooted binary leaf-labelled tree on {1,…,n}, each exactly once,
/// by sequential leaf insertion: leaf k+1 subdivides one of the 2k−3 edges.
/// The count is (2n−5)!!.
pub fn all_unrooted_binary(n: usize, budget: &EnumerationBudget) -> Result<Vec<UnrootedBinaryTree>, OracleError> {
    if n < 3 {
        return Err(domain(format!("unrooted binary trees need n >= 3, got {n}")));
    }
    let mut trees = vec![UnrootedBinaryTree::star3([1, 2, 3])];
    for label in 4..=n {
        let mut grown = Vec::with_capacity(trees.len() * (2 * (label - 1) - 3));
        for tree in &trees {
            for edge in tree.edges() {
                if grown.len() as u64 >= budget.max_objects {
                    return Err(OracleError::BudgetExceeded {
                        what: format!("unrooted binary trees on {n} leaves"),
                        budget: budget.max_objects,
                    });
                }
                grown.push(tree.with_leaf_on_edge(edge, label).expect("edges() lists real edges"));
            }
        }
        trees = grown;
    }
    Ok(trees)
}

/// Every rooted binary tree leaf-labelled by `labels` (unordered children,
/// so each tree appears once), by inserting each new leaf above one of the
/// 2m−1 vertices of the current tree. The count is (2·len−3)!!.
pub fn all_rooted_binary_labelled(
    labels: &[usize],
    budget: &EnumerationBudget,
) -> Result<Vec<LabelledTree>, OracleError> {
    if labels.is_empty() {
        return Err(domain("need at least one label".to_string()));
    }
    let distinct: BTreeSet<usize> = labels.iter().copied().collect();
    if distinct.len() != labels.len() {
        return Err(domain("labels must be distinct".to_string()));
    }
    let mut trees = vec![LabelledTree::single(labels[0])];
    for &label in &labels[1..] {
        let positions = trees.first().map_or(0, |t| t.shape().vertex_count());
        let mut grown = Vec::with_capacity(trees.len() * positions);
        for tree in &trees {
            for target in tree.shape().vertices() {
                if grown.len() as u64 >= budget.max_objects {
                    return Err(OracleError::BudgetExceeded {
                        what: format!("rooted binary trees on {} leaves", labels.len()),
                        budget: budget.max_objects,
                    });
                }
                grown.push(insert_above(tree, target, label));
            }
        }
        trees = grown;
    }
    Ok(trees)
}

/// A copy of `tree` with `target` replaced by a new internal vertex whose
/// children are the old subtree at `target` and a fresh leaf.
pub(crate) fn insert_above(tree: &LabelledTree, target: usize, label: usize) -> LabelledTree {
    fn copy_subtree(tree: &LabelledTree, v: usize, parent: Option<usize>, out: &mut TreeBuilder) {
        let id = out.add(parent, tree.label_of(v));
        for &child in tree.shape().children(v) {
            copy_subtree(tree, child, Some(id), out);
        }
    }
    fn copy_inserting(tree: &LabelledTree, v: usize, target: usize, label: usize, parent: Option<usize>, out: &mut TreeBuilder) {
        if v == target {
            let junction = out.add(parent, None);
            copy_subtree(tree, v, Some(junction), out);
            out.add(Some(junction), Some(label));
        } else {
            let id = out.add(parent, tree.label_of(v));
            for &child in tree.shape().children(v) {
                copy_inserting(tree, child, target, label, Some(id), out);
            }
        }
    }
    let mut out = TreeBuilder::new();
    copy_inserting(tree, PlaneTree::ROOT, target, label, None, &mut out);
    out.finish_labelled()
}

/// Every plane tree with exactly `leaves` leaves whose internal out-degrees
/// lie in `degrees` (duplicates in `degrees` are ignored).
pub fn all_plane_trees_with_leaves(
    leaves: usize,
    degrees: &[usize],
    budget: &EnumerationBudget,
) -> Result<Vec<PlaneTree>, OracleError> {
    if leaves == 0 {
        return Err(domain("plane trees need at least one leaf".to_string()));
    }
    let degrees: Vec<usize> = degrees.iter().copied().filter(|&d| d >= 2).collect::<BTreeSet<_>>().into_iter().collect();
    agreement::shapes_with_degrees(leaves, &degrees, budget.max_objects).ok_or(OracleError::BudgetExceeded {
        what: format!("plane trees with {leaves} leaves"),
        budget: budget.max_objects,
    })
}

/// Every ordered forest of `k` rooted binary leaf-labelled trees whose label
/// sets partition {1,…,b}. The count is F(b,k).
pub fn all_ordered_forests(
    b: usize,
    k: usize,
    budget: &EnumerationBudget,
) -> Result<Vec<Vec<LabelledTree>>, OracleError> {
    if k < 1 || k > b {
        return Err(domain(format!("forests need 1 <= trees <= leaves, got {k} trees, {b} leaves")));
    }
    let mut forests = Vec::new();
    for blocks in ordered_set_partitions(b, k) {
        let pools = blocks
            .iter()
            .map(|block| all_rooted_binary_labelled(block, budget))
            .collect::<Result<Vec<_>, _>>()?;
        for forest in pools.iter().map(|p| p.iter()).multi_cartesian_product() {
            if forests.len() as u64 >= budget.max_objects {
                return Err(OracleError::BudgetExceeded {
                    what: format!("ordered forests of {k} trees on {b} leaves"),
                    budget: budget.max_objects,
                });
            }
            forests.push(forest.into_iter().cloned().collect());
        }
    }
    Ok(forests)
}

/// All ways to distribute {1,…,b} over `k` ordered nonempty blocks,
/// preserving element order within each block.
fn ordered_set_partitions(b: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    fn assign(next: usize, b: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if next > b {
            if blocks.iter().all(|block| !block.is_empty()) {
                out.push(blocks.clone());
            }
            return;
        }
        let empty = blocks.iter().filter(|block| block.is_empty()).count();
        if empty > b - next + 1 {
            return; // not enough labels left to fill the empty blocks
        }
        for i in 0..blocks.len() {
            blocks[i].push(next);
            assign(next + 1, b, blocks, out);
            blocks[i].pop();
        }
    }
    let mut out = Vec::new();
    assign(1, b, &mut vec![Vec::new(); k], &mut out);
    out
}

/// Counts, by scanning every unrooted binary tree on {1,…,n}, how many of
/// them induce the given subtree on its label set (unordered comparison,
/// which is automatic for binary hosts).
pub fn brute_host_count(shape: &LabelledTree, n: usize, budget: &EnumerationBudget) -> Result<u64, OracleError> {
    let subset = shape.label_set();
    let a = subset.len();
    if a < 2 || a >= n {
        return Err(domain(format!("host scan needs 2 <= a < n, got a={a}, n={n}")));
    }
    if let Some(&label) = subset.iter().find(|&&l| l < 1 || l > n) {
        return Err(domain(format!("label {label} outside the host range 1..={n}")));
    }
    let s = shape.shape();
    if !s.vertices().all(|v| s.is_leaf(v) || s.out_degree(v) == 2) {
        return Err(domain("host scan needs a binary subtree shape".to_string()));
    }
    let target = shape.canonical_unordered();
    let mut count = 0;
    for host in all_unrooted_binary(n, budget)? {
        let result = agreement::induce_unrooted(&host, &subset).expect("subset labels lie in 1..=n");
        if result.shape == target {
            count += 1;
        }
    }
    Ok(count)
}

/// Conditional probability that a fixed leaf set induces `target` (with the
/// degree condition) in a terminal tree conditioned on `n` leaves, computed
/// by enumerating every plane tree with `n` leaves and every leaf labelling:
///   Σ_T weight(T)·#{labellings inducing target} / (n!·Σ_T weight(T)).
pub fn brute_conditional_induced(
    dist: &OffspringDistribution,
    target: &LabelledTree,
    n: usize,
    budget: &EnumerationBudget,
) -> Result<Rat, OracleError> {
    let subset = target.label_set();
    let a = subset.len();
    if a >= n {
        return Err(domain(format!("need a < n, got a={a}, n={n}")));
    }
    if let Some(&label) = subset.iter().find(|&&l| l < 1 || l > n) {
        return Err(domain(format!("label {label} outside the host range 1..={n}")));
    }
    let trees = all_plane_trees_with_leaves(n, &dist.internal_degrees(), budget)?;
    let labellings: u64 = (1..=n as u64).product();
    if trees.len() as u64 > budget.max_objects / labellings.max(1) {
        return Err(OracleError::BudgetExceeded {
            what: format!("{} trees times {n}! labellings", trees.len()),
            budget: budget.max_objects,
        });
    }
    let mut hit_weight = Rat::zero();
    let mut total_weight = Rat::zero();
    let labels: Vec<usize> = (1..=n).collect();
    for tree in &trees {
        let weight = dist.tree_weight(tree);
        if weight.is_zero() {
            continue;
        }
        let mut hits = 0u64;
        for labelling in labels.iter().copied().permutations(n) {
            let host = LabelledTree::new(tree.clone(), &labelling).expect("distinct labels");
            let result = agreement::induce_rooted(&host, &subset).expect("subset labels lie in 1..=n");
            if result.degree_condition_met && result.shape == *target {
                hits += 1;
            }
        }
        hit_weight += &weight * Rat::new(hits.into(), labellings.into());
        total_weight += weight;
    }
    if total_weight.is_zero() {
        return Err(OracleError::ZeroProbability);
    }
    Ok(hit_weight / total_weight)
}
