//! Exact and Monte Carlo statistics for common induced subtrees of random
//! leaf-labelled trees.
//!
//! Two random models are covered:
//!
//! * uniform unrooted binary trees on `n` labelled leaves, and
//! * terminal trees of a critical branching process (offspring distribution
//!   with finite rational support, no out-degree one) conditioned on the
//!   number of leaves.
//!
//! The crate computes exact rational probabilities, expectations, and counts
//! from generating functions and closed forms ([`series`], [`formulas`]),
//! draws conditioned samples and runs Monte Carlo estimates ([`sim`]),
//! manipulates induced subtrees and maximum agreement subtrees
//! ([`agreement`]), and cross-checks every closed form against exhaustive
//! enumeration ([`oracle`], [`verify`]).

pub mod agreement;
pub mod config;
pub mod formulas;
pub mod oracle;
pub mod ratio;
pub mod series;
pub mod sim;
pub mod trees;
pub mod verify;

pub use ratio::Rat;
pub use trees::{LabelledTree, OffspringDistribution, PlaneTree, UnrootedBinaryTree};
