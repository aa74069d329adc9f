//! Tree types shared by every model: critical offspring distributions,
//! ordered rooted trees, leaf labellings, and unrooted binary trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::{Integer, One, Signed, Zero};
use thiserror::Error;

use crate::ratio::Rat;

/// Error raised when an offspring distribution fails validation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistributionError {
    #[error("probabilities must be non-negative and sum to one")]
    NotProbability,
    #[error("out-degree one must carry no mass")]
    DegreeOneMass,
    #[error("out-degree zero must carry positive mass")]
    NoExtinctionMass,
    #[error("mean out-degree must be one, got {0}")]
    NotCritical(String),
}

/// Critical offspring distribution with finite rational support.
///
/// Construction guarantees: entries are non-negative rationals summing to
/// one, `prob(0) > 0`, `prob(1) = 0`, and the mean out-degree is exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffspringDistribution {
    probs: BTreeMap<usize, Rat>,
    variance: Rat,
    period: usize,
}

impl OffspringDistribution {
    pub fn new<I>(entries: I) -> Result<Self, DistributionError>
    where
        I: IntoIterator<Item = (usize, Rat)>,
    {
        let mut probs: BTreeMap<usize, Rat> = BTreeMap::new();
        for (degree, p) in entries {
            if p.is_negative() {
                return Err(DistributionError::NotProbability);
            }
            if !p.is_zero() {
                *probs.entry(degree).or_insert_with(Rat::zero) += p;
            }
        }
        let total: Rat = probs.values().sum();
        if !total.is_one() {
            return Err(DistributionError::NotProbability);
        }
        if probs.contains_key(&1) {
            return Err(DistributionError::DegreeOneMass);
        }
        if !probs.contains_key(&0) {
            return Err(DistributionError::NoExtinctionMass);
        }
        let mean: Rat = probs
            .iter()
            .map(|(&j, p)| p * Rat::from_integer(j.into()))
            .sum();
        if !mean.is_one() {
            return Err(DistributionError::NotCritical(mean.to_string()));
        }
        let variance: Rat = probs
            .iter()
            .map(|(&j, p)| p * Rat::from_integer((j * j.saturating_sub(1)).into()))
            .sum();
        let period = probs
            .keys()
            .filter(|&&j| j >= 2)
            .fold(0usize, |g, &j| g.gcd(&(j - 1)));
        Ok(OffspringDistribution { probs, variance, period })
    }

    /// The benchmark case `prob(0) = prob(2) = 1/2`.
    pub fn binary() -> Self {
        OffspringDistribution::new([(0, Rat::new(1.into(), 2.into())), (2, Rat::new(1.into(), 2.into()))])
            .expect("the binary distribution is valid")
    }

    /// Probability of out-degree `degree`; zero off the support.
    pub fn prob(&self, degree: usize) -> Rat {
        self.probs.get(&degree).cloned().unwrap_or_else(Rat::zero)
    }

    /// Support entries in increasing degree order.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.probs.iter().map(|(&j, p)| (j, p))
    }

    /// Degrees `>= 2` carrying positive mass, increasing.
    pub fn internal_degrees(&self) -> Vec<usize> {
        self.probs.keys().copied().filter(|&j| j >= 2).collect()
    }

    pub fn max_degree(&self) -> usize {
        *self.probs.keys().last().expect("support is non-empty")
    }

    /// Offspring variance `sum_j j (j - 1) prob(j)` (the mean is one).
    pub fn variance(&self) -> &Rat {
        &self.variance
    }

    /// Gcd of `{j - 1 : prob(j) > 0, j >= 2}`; leaf counts live in
    /// `1 + period * Z` and asymptotics require period one.
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn is_aperiodic(&self) -> bool {
        self.period == 1
    }

    /// Product over all vertices of `prob(out-degree)`: the probability that
    /// the branching process realises exactly this ordered tree.
    pub fn tree_weight(&self, tree: &PlaneTree) -> Rat {
        let mut weight = Rat::one();
        for v in tree.vertices() {
            let p = self.prob(tree.out_degree(v));
            if p.is_zero() {
                return Rat::zero();
            }
            weight *= p;
        }
        weight
    }
}

/// Rooted tree with ordered children, stored as an arena.
///
/// The root is vertex `0` and every child id is larger than its parent id;
/// all sweeps in the crate rely on that ordering. Every constructor
/// (builders, parsing, sampling) maintains it.
#[derive(Debug, Clone)]
pub struct PlaneTree {
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
}

pub(crate) struct TreeBuilder {
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    label: Vec<Option<usize>>,
}

impl TreeBuilder {
    pub(crate) fn new() -> Self {
        TreeBuilder { children: Vec::new(), parent: Vec::new(), label: Vec::new() }
    }

    /// Appends a vertex; the first added vertex must be the root.
    pub(crate) fn add(&mut self, parent: Option<usize>, label: Option<usize>) -> usize {
        let id = self.children.len();
        debug_assert_eq!(parent.is_none(), id == 0);
        self.children.push(Vec::new());
        self.parent.push(parent);
        self.label.push(label);
        if let Some(p) = parent {
            debug_assert!(p < id);
            self.children[p].push(id);
        }
        id
    }

    pub(crate) fn len(&self) -> usize {
        self.children.len()
    }

    pub(crate) fn finish_shape(self) -> PlaneTree {
        debug_assert!(!self.children.is_empty());
        PlaneTree { children: self.children, parent: self.parent }
    }

    pub(crate) fn finish_labelled(self) -> LabelledTree {
        let TreeBuilder { children, parent, label } = self;
        let shape = PlaneTree { children, parent };
        debug_assert!(!label.is_empty());
        debug_assert!(shape.vertices().all(|v| shape.is_leaf(v) || label[v].is_none()));
        LabelledTree { shape, label }
    }
}

impl PlaneTree {
    /// Single-vertex tree.
    pub fn leaf() -> Self {
        PlaneTree { children: vec![Vec::new()], parent: vec![None] }
    }

    /// Grafts the given subtrees, in order, under a fresh root.
    pub fn node(subtrees: Vec<PlaneTree>) -> Self {
        let mut children = vec![Vec::with_capacity(subtrees.len())];
        let mut parent = vec![None];
        for sub in subtrees {
            let offset = children.len();
            children[0].push(offset);
            for (v, kids) in sub.children.iter().enumerate() {
                children.push(kids.iter().map(|c| c + offset).collect());
                parent.push(match sub.parent[v] {
                    Some(p) => Some(p + offset),
                    None => Some(0),
                });
            }
        }
        PlaneTree { children, parent }
    }

    pub const ROOT: usize = 0;

    pub fn vertex_count(&self) -> usize {
        self.children.len()
    }

    pub fn edge_count(&self) -> usize {
        self.vertex_count() - 1
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.vertex_count()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.children[v].len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn leaf_count(&self) -> usize {
        self.vertices().filter(|&v| self.is_leaf(v)).count()
    }

    /// Vertices in depth-first order, children left to right.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.vertex_count());
        let mut stack = vec![Self::ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        order
    }

    /// Leaves in depth-first, left-to-right order; labellings attach here.
    pub fn leaves(&self) -> Vec<usize> {
        self.preorder().into_iter().filter(|&v| self.is_leaf(v)).collect()
    }

    /// Out-degree sequence in preorder; equal sequences characterise equal
    /// ordered trees.
    pub fn preorder_degrees(&self) -> Vec<usize> {
        self.preorder().into_iter().map(|v| self.out_degree(v)).collect()
    }

    /// True when every internal vertex has out-degree at least two, the form
    /// suppression always produces.
    pub fn is_induced_shape(&self) -> bool {
        self.vertices().all(|v| self.is_leaf(v) || self.out_degree(v) >= 2)
    }
}

impl PartialEq for PlaneTree {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count() == other.vertex_count()
            && self.preorder_degrees() == other.preorder_degrees()
    }
}

impl Eq for PlaneTree {}

/// Error raised when leaf labels do not fit a shape.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("expected {expected} labels, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("label {0} appears more than once")]
    Duplicate(usize),
}

/// Ordered rooted tree whose leaves carry distinct non-negative labels.
#[derive(Debug, Clone)]
pub struct LabelledTree {
    shape: PlaneTree,
    label: Vec<Option<usize>>,
}

impl LabelledTree {
    /// Attaches `labels` to the leaves of `shape` in depth-first order.
    pub fn new(shape: PlaneTree, labels: &[usize]) -> Result<Self, LabelError> {
        let leaves = shape.leaves();
        if leaves.len() != labels.len() {
            return Err(LabelError::WrongCount { expected: leaves.len(), got: labels.len() });
        }
        let mut seen = BTreeSet::new();
        for &l in labels {
            if !seen.insert(l) {
                return Err(LabelError::Duplicate(l));
            }
        }
        let mut label = vec![None; shape.vertex_count()];
        for (&v, &l) in leaves.iter().zip(labels) {
            label[v] = Some(l);
        }
        Ok(LabelledTree { shape, label })
    }

    /// One leaf carrying `label`.
    pub fn single(label: usize) -> Self {
        LabelledTree { shape: PlaneTree::leaf(), label: vec![Some(label)] }
    }

    pub fn shape(&self) -> &PlaneTree {
        &self.shape
    }

    pub fn leaf_count(&self) -> usize {
        self.shape.leaf_count()
    }

    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.label[v]
    }

    /// Labels in depth-first leaf order.
    pub fn leaf_labels(&self) -> Vec<usize> {
        self.shape
            .leaves()
            .into_iter()
            .map(|v| self.label[v].expect("leaves are labelled"))
            .collect()
    }

    pub fn label_set(&self) -> BTreeSet<usize> {
        self.leaf_labels().into_iter().collect()
    }

    pub fn leaf_with_label(&self, label: usize) -> Option<usize> {
        self.shape.vertices().find(|&v| self.label[v] == Some(label))
    }

    /// Same tree with the children of every vertex ordered by the smallest
    /// label below them: the canonical representative for unordered
    /// comparisons.
    pub fn canonical_unordered(&self) -> LabelledTree {
        let count = self.shape.vertex_count();
        let mut min_label = vec![usize::MAX; count];
        for v in (0..count).rev() {
            min_label[v] = match self.label[v] {
                Some(l) => l,
                None => self.shape.children(v).iter().map(|&c| min_label[c]).min().unwrap(),
            };
        }
        let mut builder = TreeBuilder::new();
        let mut stack = Vec::new();
        let root = builder.add(None, self.label[PlaneTree::ROOT]);
        stack.push((PlaneTree::ROOT, root));
        while let Some((old, new)) = stack.pop() {
            let mut kids = self.shape.children(old).to_vec();
            kids.sort_by_key(|&c| min_label[c]);
            for c in kids {
                let id = builder.add(Some(new), self.label[c]);
                stack.push((c, id));
            }
        }
        builder.finish_labelled()
    }

    fn preorder_signature(&self) -> Vec<(usize, Option<usize>)> {
        self.shape
            .preorder()
            .into_iter()
            .map(|v| (self.shape.out_degree(v), self.label[v]))
            .collect()
    }
}

impl PartialEq for LabelledTree {
    fn eq(&self, other: &Self) -> bool {
        self.shape.vertex_count() == other.shape.vertex_count()
            && self.preorder_signature() == other.preorder_signature()
    }
}

impl Eq for LabelledTree {}

impl fmt::Display for LabelledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        enum Tok {
            Visit(usize),
            Comma,
            Close,
        }
        let mut stack = vec![Tok::Visit(PlaneTree::ROOT)];
        while let Some(tok) = stack.pop() {
            match tok {
                Tok::Visit(v) if self.shape.is_leaf(v) => {
                    write!(f, "{}", self.label[v].expect("leaves are labelled"))?;
                }
                Tok::Visit(v) => {
                    write!(f, "(")?;
                    stack.push(Tok::Close);
                    for (i, &c) in self.shape.children(v).iter().enumerate().rev() {
                        stack.push(Tok::Visit(c));
                        if i > 0 {
                            stack.push(Tok::Comma);
                        }
                    }
                }
                Tok::Comma => write!(f, ",")?,
                Tok::Close => write!(f, ")")?,
            }
        }
        Ok(())
    }
}

/// Error raised by the tree grammar parser, with the byte offset of the
/// offending input.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected a leaf label or '('")]
    ExpectedTree,
    #[error("expected ',' or ')'")]
    ExpectedSeparator,
    #[error("a node needs at least two children")]
    TooFewChildren,
    #[error("unbalanced '('")]
    Unbalanced,
    #[error("unexpected trailing input")]
    TrailingInput,
    #[error("label {0} appears more than once")]
    DuplicateLabel(usize),
    #[error("label does not fit the label type")]
    LabelOverflow,
}

impl FromStr for LabelledTree {
    type Err = ParseError;

    /// Parses `tree := leaf | "(" tree ("," tree)+ ")"` with integer leaf
    /// labels; ASCII whitespace between tokens is ignored.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let err = |kind, offset| Err(ParseError { kind, offset });

        let mut builder = TreeBuilder::new();
        let mut seen = BTreeSet::new();
        // Open internal vertices, outermost first.
        let mut open: Vec<usize> = Vec::new();
        let mut expecting_tree = true;
        loop {
            skip_ws(&mut pos);
            if expecting_tree {
                match bytes.get(pos) {
                    Some(b'(') => {
                        open.push(builder.add(open.last().copied(), None));
                        pos += 1;
                    }
                    Some(c) if c.is_ascii_digit() => {
                        let start = pos;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                        let label: usize = s[start..pos]
                            .parse()
                            .map_err(|_| ParseError { kind: ParseErrorKind::LabelOverflow, offset: start })?;
                        if !seen.insert(label) {
                            return err(ParseErrorKind::DuplicateLabel(label), start);
                        }
                        builder.add(open.last().copied(), Some(label));
                        expecting_tree = false;
                    }
                    _ => return err(ParseErrorKind::ExpectedTree, pos),
                }
            } else if let Some(&v) = open.last() {
                match bytes.get(pos) {
                    Some(b',') => {
                        pos += 1;
                        expecting_tree = true;
                    }
                    Some(b')') => {
                        if builder.children[v].len() < 2 {
                            return err(ParseErrorKind::TooFewChildren, pos);
                        }
                        open.pop();
                        pos += 1;
                    }
                    Some(_) => return err(ParseErrorKind::ExpectedSeparator, pos),
                    None => return err(ParseErrorKind::Unbalanced, pos),
                }
            } else {
                break;
            }
        }
        skip_ws(&mut pos);
        if pos < bytes.len() {
            return err(ParseErrorKind::TrailingInput, pos);
        }
        Ok(builder.finish_labelled())
    }
}

/// Unrooted tree whose leaves carry distinct labels and whose internal
/// vertices all have degree three. Defined for three or more leaves.
/// Equality is representational (same vertex ids); use edge partitions or
/// rooted canonical forms to compare trees structurally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnrootedBinaryTree {
    adj: Vec<Vec<usize>>,
    label: Vec<Option<usize>>,
}

impl UnrootedBinaryTree {
    /// Smallest case: three labelled leaves around one internal vertex.
    pub fn star3(labels: [usize; 3]) -> Self {
        UnrootedBinaryTree {
            adj: vec![vec![3], vec![3], vec![3], vec![0, 1, 2]],
            label: vec![Some(labels[0]), Some(labels[1]), Some(labels[2]), None],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.degree(v) == 1
    }

    pub fn leaf_count(&self) -> usize {
        (0..self.vertex_count()).filter(|&v| self.is_leaf(v)).count()
    }

    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.label[v]
    }

    pub fn labels(&self) -> BTreeSet<usize> {
        self.label.iter().flatten().copied().collect()
    }

    pub fn leaf_with_label(&self, label: usize) -> Option<usize> {
        (0..self.vertex_count()).find(|&v| self.label[v] == Some(label))
    }

    /// Undirected edges as `(u, v)` with `u < v`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.vertex_count().saturating_sub(1));
        for u in 0..self.vertex_count() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// New tree with edge `(u, v)` subdivided and a fresh leaf labelled
    /// `label` attached to the subdividing vertex. Returns `None` when
    /// `(u, v)` is not an edge.
    pub fn with_leaf_on_edge(&self, edge: (usize, usize), label: usize) -> Option<Self> {
        let (u, v) = edge;
        let iu = self.adj[u].iter().position(|&x| x == v)?;
        let iv = self.adj[v].iter().position(|&x| x == u)?;
        let mut next = self.clone();
        let mid = next.adj.len();
        let leaf = mid + 1;
        next.adj[u][iu] = mid;
        next.adj[v][iv] = mid;
        next.adj.push(vec![u, v, leaf]);
        next.adj.push(vec![mid]);
        next.label.push(None);
        next.label.push(Some(label));
        Some(next)
    }

    /// Rooted view obtained by rooting at the leaf carrying `label`; that
    /// leaf becomes an unlabelled out-degree-one root. Also returns the map
    /// from rooted-view vertex ids back to ids in `self`.
    pub fn rooted_at_leaf(&self, label: usize) -> Option<(LabelledTree, Vec<usize>)> {
        let start = self.leaf_with_label(label)?;
        let mut builder = TreeBuilder::new();
        let mut to_old = Vec::with_capacity(self.vertex_count());
        let root = builder.add(None, None);
        to_old.push(start);
        let mut stack = vec![(start, usize::MAX, root)];
        while let Some((old, from, new)) = stack.pop() {
            for &nb in &self.adj[old] {
                if nb == from {
                    continue;
                }
                let l = if self.is_leaf(nb) { self.label[nb] } else { None };
                let id = builder.add(Some(new), l);
                to_old.push(nb);
                stack.push((nb, old, id));
            }
        }
        Some((builder.finish_labelled(), to_old))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    fn dist(entries: &[(usize, (i64, i64))]) -> Result<OffspringDistribution, DistributionError> {
        OffspringDistribution::new(entries.iter().map(|&(j, (n, d))| (j, rat(n, d))))
    }

    #[test]
    fn binary_distribution_is_valid() {
        let d = OffspringDistribution::binary();
        assert_eq!(d.variance(), &rat(1, 1));
        assert_eq!(d.period(), 1);
        assert!(d.is_aperiodic());
        assert_eq!(d.max_degree(), 2);
    }

    #[test]
    fn ternary_distribution_is_periodic() {
        let d = dist(&[(0, (2, 3)), (3, (1, 3))]).unwrap();
        assert_eq!(d.variance(), &rat(2, 1));
        assert_eq!(d.period(), 2);
        assert!(!d.is_aperiodic());
    }

    #[test]
    fn mixed_distribution_summary() {
        let d = dist(&[(0, (7, 12)), (2, (1, 4)), (3, (1, 6))]).unwrap();
        assert_eq!(d.variance(), &rat(3, 2));
        assert_eq!(d.period(), 1);
        assert_eq!(d.internal_degrees(), vec![2, 3]);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        assert_eq!(
            dist(&[(0, (1, 2)), (1, (1, 4)), (2, (1, 4))]),
            Err(DistributionError::DegreeOneMass)
        );
        assert_eq!(dist(&[(0, (1, 2)), (2, (1, 4))]), Err(DistributionError::NotProbability));
        assert_eq!(dist(&[(0, (-1, 2)), (2, (3, 2))]), Err(DistributionError::NotProbability));
        assert_eq!(dist(&[(2, (1, 2)), (3, (1, 2))]), Err(DistributionError::NoExtinctionMass));
        assert_eq!(
            dist(&[(0, (1, 4)), (2, (3, 4))]),
            Err(DistributionError::NotCritical("3/2".into()))
        );
        // Explicit zero entries are dropped, not rejected.
        assert!(dist(&[(0, (1, 2)), (1, (0, 1)), (2, (1, 2))]).is_ok());
    }

    #[test]
    fn tree_weights_multiply_over_vertices() {
        let d = OffspringDistribution::binary();
        assert_eq!(d.tree_weight(&PlaneTree::leaf()), rat(1, 2));
        let cherry = PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf()]);
        assert_eq!(d.tree_weight(&cherry), rat(1, 8));
        let t = dist(&[(0, (2, 3)), (3, (1, 3))]).unwrap();
        let star3 = PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf(), PlaneTree::leaf()]);
        assert_eq!(t.tree_weight(&star3), rat(8, 81));
        // Off-support out-degree kills the weight.
        assert_eq!(t.tree_weight(&cherry), rat(0, 1));
    }

    #[test]
    fn plane_tree_structure() {
        let t = PlaneTree::node(vec![
            PlaneTree::leaf(),
            PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf()]),
        ]);
        assert_eq!(t.vertex_count(), 5);
        assert_eq!(t.edge_count(), 4);
        assert_eq!(t.leaf_count(), 3);
        assert!(t.is_induced_shape());
        assert_eq!(t.preorder_degrees(), vec![2, 0, 2, 0, 0]);
        for v in t.vertices() {
            if let Some(p) = t.parent(v) {
                assert!(p < v);
            }
        }
        let sum: usize = t.vertices().map(|v| t.out_degree(v)).sum();
        assert_eq!(sum, t.edge_count());
    }

    #[test]
    fn ordered_equality_distinguishes_mirror_shapes() {
        let l = || PlaneTree::leaf();
        let a = PlaneTree::node(vec![l(), PlaneTree::node(vec![l(), l()])]);
        let b = PlaneTree::node(vec![PlaneTree::node(vec![l(), l()]), l()]);
        assert_ne!(a, b);
        assert_eq!(a, a.clone());
    }

    #[test]
    fn labelled_tree_round_trips_through_text() {
        let text = "(1,(2,3))";
        let t: LabelledTree = text.parse().unwrap();
        assert_eq!(t.to_string(), text);
        assert_eq!(t.leaf_labels(), vec![1, 2, 3]);
        let deep: LabelledTree = "((4,1),(2,(3,5)),6)".parse().unwrap();
        assert_eq!(deep.to_string(), "((4,1),(2,(3,5)),6)");
        let single: LabelledTree = " 7 ".parse().unwrap();
        assert_eq!(single.to_string(), "7");
    }

    #[test]
    fn parse_errors_report_byte_offsets() {
        let unbalanced = "(1,(2,3)".parse::<LabelledTree>().unwrap_err();
        assert_eq!(unbalanced, ParseError { kind: ParseErrorKind::Unbalanced, offset: 8 });
        let lonely = "(1)".parse::<LabelledTree>().unwrap_err();
        assert_eq!(lonely, ParseError { kind: ParseErrorKind::TooFewChildren, offset: 2 });
        let empty = "".parse::<LabelledTree>().unwrap_err();
        assert_eq!(empty.kind, ParseErrorKind::ExpectedTree);
        let trailing = "(1,2)x".parse::<LabelledTree>().unwrap_err();
        assert_eq!(trailing, ParseError { kind: ParseErrorKind::TrailingInput, offset: 5 });
        let dup = "(1,(2,1))".parse::<LabelledTree>().unwrap_err();
        assert_eq!(dup, ParseError { kind: ParseErrorKind::DuplicateLabel(1), offset: 6 });
        let junk = "(1,,2)".parse::<LabelledTree>().unwrap_err();
        assert_eq!(junk.kind, ParseErrorKind::ExpectedTree);
    }

    #[test]
    fn duplicate_labels_rejected_by_constructor() {
        let shape = PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf()]);
        assert_eq!(LabelledTree::new(shape.clone(), &[4, 4]), Err(LabelError::Duplicate(4)));
        assert_eq!(
            LabelledTree::new(shape, &[1, 2, 3]),
            Err(LabelError::WrongCount { expected: 2, got: 3 })
        );
    }

    #[test]
    fn canonical_order_sorts_by_minimum_label() {
        let t: LabelledTree = "((5,3),(4,1))".parse().unwrap();
        assert_eq!(t.canonical_unordered().to_string(), "((1,4),(3,5))");
        let u: LabelledTree = "(9,(2,7),(1,8))".parse().unwrap();
        assert_eq!(u.canonical_unordered().to_string(), "((1,8),(2,7),9)");
        // Canonicalisation is idempotent and preserves unordered identity.
        let c = t.canonical_unordered();
        assert_eq!(c.canonical_unordered(), c);
    }

    #[test]
    fn unrooted_star_and_insertions() {
        let star = UnrootedBinaryTree::star3([1, 2, 3]);
        assert_eq!(star.leaf_count(), 3);
        assert_eq!(star.edges(), vec![(0, 3), (1, 3), (2, 3)]);
        let bigger = star.with_leaf_on_edge((0, 3), 4).unwrap();
        assert_eq!(bigger.leaf_count(), 4);
        assert_eq!(bigger.vertex_count(), 6);
        assert!(bigger.with_leaf_on_edge((0, 3), 5).is_none());
        for v in 0..bigger.vertex_count() {
            assert!(bigger.degree(v) == 1 || bigger.degree(v) == 3);
        }
    }

    #[test]
    fn rooting_at_a_leaf_keeps_the_rest_labelled() {
        let star = UnrootedBinaryTree::star3([1, 2, 3]);
        let (rooted, to_old) = star.rooted_at_leaf(2).unwrap();
        assert_eq!(rooted.shape().out_degree(PlaneTree::ROOT), 1);
        assert_eq!(rooted.leaf_count(), 2);
        assert_eq!(rooted.label_set(), [1, 3].into_iter().collect());
        assert_eq!(to_old.len(), star.vertex_count());
        assert_eq!(to_old[0], 1);
    }
}
