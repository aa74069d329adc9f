//! Seeded sampling of critical branching-process terminal trees, rejection
//! conditioning on leaf count, uniform leaf labelling, and Monte Carlo
//! estimators for the quantities the exact formulas predict.
//!
//! Reproducibility contract: the generator is ChaCha8 and trial `i` of a run
//! with seed `s` always uses the stream derived from `(s, i)`, so reports are
//! identical across thread counts and across runs.

use std::collections::VecDeque;

use num::integer::Integer;
use num::{BigInt, One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::agreement::{self, Comparison};
use crate::ratio::Rat;
use crate::series;
use crate::trees::{LabelledTree, OffspringDistribution, PlaneTree, TreeBuilder};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid sampler configuration: {0}")]
    Config(String),
    #[error("exact sampling needs offspring probabilities with a common denominator below 2^63")]
    DenominatorTooLarge,
    #[error("no tree has exactly {0} leaves under this distribution")]
    ImpossibleLeafCount(usize),
    #[error("size cap {cap} cannot hold a tree with {n} leaves; raise it to at least 2n")]
    SizeCapTooSmall { cap: usize, n: usize },
    #[error("an attempt exceeded the size cap of {0} vertices")]
    CapExceeded(usize),
    #[error("rejection sampling exhausted its budget of {0} attempts")]
    AttemptsExhausted(u64),
    #[error("agreement counting failed: {0}")]
    Agreement(String),
}

/// Everything a sampling run needs: the offspring law, safety caps, and the
/// seed that makes the run reproducible.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    pub dist: OffspringDistribution,
    /// Abort an attempt once the tree holds this many vertices.
    pub size_cap: usize,
    /// Give up on a conditioned draw after this many rejected attempts.
    pub max_attempts: u64,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn new(dist: OffspringDistribution, seed: u64) -> Self {
        SamplerConfig { dist, size_cap: 1_000_000, max_attempts: 1_000_000, seed }
    }
}

/// The RNG for one trial: one ChaCha8 stream per (seed, trial) pair.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws offspring counts exactly: probabilities are scaled by their common
/// denominator to integer weights and a uniform integer picks the degree.
#[derive(Debug, Clone)]
pub(crate) struct DegreeSampler {
    /// (cumulative weight, degree), in increasing weight order.
    thresholds: Vec<(u64, usize)>,
    total: u64,
}

impl DegreeSampler {
    pub(crate) fn new(dist: &OffspringDistribution) -> Result<Self, SimError> {
        let common = dist
            .support()
            .map(|(_, p)| p.denom().clone())
            .fold(BigInt::one(), |acc, d| acc.lcm(&d));
        let total = common.to_u64().ok_or(SimError::DenominatorTooLarge)?;
        let mut acc = 0u64;
        let mut thresholds = Vec::new();
        for (degree, p) in dist.support() {
            let weight = (p * Rat::new(common.clone(), BigInt::one()))
                .to_integer()
                .to_u64()
                .expect("weight fits once the denominator does");
            acc += weight;
            thresholds.push((acc, degree));
        }
        debug_assert_eq!(acc, total, "probabilities sum to one");
        Ok(DegreeSampler { thresholds, total })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let ticket = rng.random_range(0..self.total);
        self.thresholds
            .iter()
            .find(|(cum, _)| ticket < *cum)
            .expect("ticket below total weight")
            .1
    }
}

/// Grows one terminal tree breadth-first, aborting (`None`) as soon as the
/// vertex count would exceed `vertex_cap` or the leaf count exceeds
/// `leaf_cap`; aborted attempts are rejected without biasing the law of the
/// surviving trees.
fn grow(
    degrees: &DegreeSampler,
    rng: &mut ChaCha8Rng,
    vertex_cap: usize,
    leaf_cap: usize,
) -> Option<PlaneTree> {
    let mut builder = TreeBuilder::new();
    let mut frontier = VecDeque::new();
    frontier.push_back(builder.add(None, None));
    let mut leaves = 0usize;
    while let Some(v) = frontier.pop_front() {
        let degree = degrees.draw(rng);
        if degree == 0 {
            leaves += 1;
            if leaves > leaf_cap {
                return None;
            }
            continue;
        }
        for _ in 0..degree {
            if builder.len() >= vertex_cap {
                return None;
            }
            frontier.push_back(builder.add(Some(v), None));
        }
    }
    Some(builder.finish_shape())
}

/// One unconditioned terminal tree (the family tree of the branching process
/// run to extinction), or [`SimError::CapExceeded`] for this attempt.
pub fn sample_terminal(cfg: &SamplerConfig, rng: &mut ChaCha8Rng) -> Result<PlaneTree, SimError> {
    TerminalSampler::new(cfg)?.draw(rng)
}

/// Reusable unconditioned sampler: build once, draw many.
#[derive(Debug, Clone)]
pub struct TerminalSampler {
    degrees: DegreeSampler,
    size_cap: usize,
}

impl TerminalSampler {
    pub fn new(cfg: &SamplerConfig) -> Result<Self, SimError> {
        if cfg.size_cap < 2 {
            return Err(SimError::Config("size cap below 2 cannot hold any tree".to_string()));
        }
        Ok(TerminalSampler { degrees: DegreeSampler::new(&cfg.dist)?, size_cap: cfg.size_cap })
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<PlaneTree, SimError> {
        grow(&self.degrees, rng, self.size_cap, usize::MAX).ok_or(SimError::CapExceeded(self.size_cap))
    }
}

/// A conditioned draw: the labelled tree plus how many attempts it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionedSample {
    pub tree: LabelledTree,
    pub attempts: u64,
}

/// Reusable rejection sampler for terminal trees conditioned on having
/// exactly `n` leaves, with leaves labelled by a uniform bijection to
/// {1,…,n}.
#[derive(Debug, Clone)]
pub struct ConditionedSampler {
    degrees: DegreeSampler,
    n: usize,
    vertex_cap: usize,
    max_attempts: u64,
}

impl ConditionedSampler {
    pub fn new(cfg: &SamplerConfig, n: usize) -> Result<Self, SimError> {
        if n == 0 {
            return Err(SimError::Config("cannot condition on zero leaves".to_string()));
        }
        if cfg.max_attempts == 0 {
            return Err(SimError::Config("need at least one attempt".to_string()));
        }
        if cfg.size_cap < 2 * n {
            return Err(SimError::SizeCapTooSmall { cap: cfg.size_cap, n });
        }
        if series::leaf_count_gf(&cfg.dist, n).coeff(n).is_zero() {
            return Err(SimError::ImpossibleLeafCount(n));
        }
        Ok(ConditionedSampler {
            degrees: DegreeSampler::new(&cfg.dist)?,
            n,
            // A tree with at most n leaves has at most 2n−1 vertices, so any
            // attempt growing past that bound is doomed and can stop early.
            vertex_cap: cfg.size_cap.min(2 * n - 1),
            max_attempts: cfg.max_attempts,
        })
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<ConditionedSample, SimError> {
        for attempt in 1..=self.max_attempts {
            let Some(shape) = grow(&self.degrees, rng, self.vertex_cap, self.n) else {
                continue;
            };
            if shape.leaf_count() != self.n {
                continue;
            }
            let mut labels: Vec<usize> = (1..=self.n).collect();
            labels.shuffle(rng);
            let tree = LabelledTree::new(shape, &labels).expect("labels are distinct");
            return Ok(ConditionedSample { tree, attempts: attempt });
        }
        Err(SimError::AttemptsExhausted(self.max_attempts))
    }
}

/// One conditioned terminal tree with `n` labelled leaves.
pub fn sample_conditioned(cfg: &SamplerConfig, n: usize, rng: &mut ChaCha8Rng) -> Result<ConditionedSample, SimError> {
    ConditionedSampler::new(cfg, n)?.draw(rng)
}

/// Outcome of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub estimate: f64,
    /// Standard error: sqrt(p̂(1−p̂)/trials) for indicator estimands, sample
    /// standard error of the mean otherwise.
    pub stderr: f64,
    pub trials: u64,
    /// Sum of the per-trial values (the hit count for indicator estimands).
    pub weight: f64,
    pub seed: u64,
}

/// Estimates the probability that the label set of `target` induces exactly
/// `target` (ordered comparison, degree condition required) in a terminal
/// tree conditioned on `n` leaves.
pub fn mc_induced_probability(
    cfg: &SamplerConfig,
    target: &LabelledTree,
    n: usize,
    trials: u64,
) -> Result<McReport, SimError> {
    if trials == 0 {
        return Err(SimError::Config("need at least one trial".to_string()));
    }
    let subset = target.label_set();
    if subset.is_empty() || subset.len() >= n {
        return Err(SimError::Config(format!(
            "target must use a nonempty proper subset of the {n} host labels"
        )));
    }
    if let Some(&label) = subset.iter().find(|&&l| l < 1 || l > n) {
        return Err(SimError::Config(format!("target label {label} outside 1..={n}")));
    }
    let sampler = ConditionedSampler::new(cfg, n)?;
    let outcomes: Result<Vec<bool>, SimError> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let sample = sampler.draw(&mut rng)?;
            let result = agreement::induce_rooted(&sample.tree, &subset)
                .expect("host carries every label in 1..=n");
            Ok(result.degree_condition_met && result.shape == *target)
        })
        .collect();
    let hits = outcomes?.into_iter().filter(|&hit| hit).count() as f64;
    let estimate = hits / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(McReport { estimate, stderr, trials, weight: hits, seed: cfg.seed })
}

/// Estimates the expected number of size-`a` leaf sets on which two
/// independent conditioned terminal trees agree, by drawing a pair per trial
/// and brute-force counting.
pub fn mc_expected_common(
    cfg: &SamplerConfig,
    n: usize,
    a: usize,
    trials: u64,
    mode: Comparison,
) -> Result<McReport, SimError> {
    if trials == 0 {
        return Err(SimError::Config("need at least one trial".to_string()));
    }
    if a < 1 || a > n {
        return Err(SimError::Config(format!("subset size must satisfy 1 <= a <= {n}, got {a}")));
    }
    let sampler = ConditionedSampler::new(cfg, n)?;
    let counts: Result<Vec<f64>, SimError> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let first = sampler.draw(&mut rng)?.tree;
            let second = sampler.draw(&mut rng)?.tree;
            let count = agreement::common_count(&first, &second, a, mode)
                .map_err(|e| SimError::Agreement(e.to_string()))?;
            Ok(count as f64)
        })
        .collect();
    let counts = counts?;
    let weight: f64 = counts.iter().sum();
    let estimate = weight / trials as f64;
    let variance = if trials > 1 {
        counts.iter().map(|x| (x - estimate).powi(2)).sum::<f64>() / (trials as f64 - 1.0)
    } else {
        0.0
    };
    let stderr = (variance / trials as f64).sqrt();
    Ok(McReport { estimate, stderr, trials, weight, seed: cfg.seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use std::str::FromStr;

    fn binary_cfg(seed: u64) -> SamplerConfig {
        SamplerConfig::new(OffspringDistribution::binary(), seed)
    }

    fn d2test() -> OffspringDistribution {
        OffspringDistribution::new([(0, rat(7, 12)), (2, rat(1, 4)), (3, rat(1, 6))]).unwrap()
    }

    #[test]
    fn degree_sampler_thresholds_are_exact() {
        let sampler = DegreeSampler::new(&d2test()).unwrap();
        assert_eq!(sampler.total, 12);
        assert_eq!(sampler.thresholds, vec![(7, 0), (10, 2), (12, 3)]);
    }

    #[test]
    fn terminal_samples_respect_the_support() {
        let cfg = binary_cfg(7);
        let sampler = TerminalSampler::new(&cfg).unwrap();
        let mut rng = trial_rng(cfg.seed, 0);
        for _ in 0..200 {
            let tree = sampler.draw(&mut rng).unwrap();
            assert!(tree.vertices().all(|v| matches!(tree.out_degree(v), 0 | 2)));
            assert_eq!(tree.vertex_count(), 2 * tree.leaf_count() - 1);
        }
    }

    #[test]
    fn terminal_leaf_count_frequencies_match_series() {
        // P(1 leaf) = p₀ = 1/2 and P(2 leaves) = 1/8 for the binary law.
        let cfg = binary_cfg(11);
        let sampler = TerminalSampler::new(&cfg).unwrap();
        let mut rng = trial_rng(cfg.seed, 0);
        let trials = 40_000;
        let mut one = 0u32;
        let mut two = 0u32;
        for _ in 0..trials {
            match sampler.draw(&mut rng) {
                Ok(tree) => match tree.leaf_count() {
                    1 => one += 1,
                    2 => two += 1,
                    _ => {}
                },
                Err(SimError::CapExceeded(_)) => {}
                Err(other) => panic!("unexpected error {other}"),
            }
        }
        let f1 = f64::from(one) / f64::from(trials);
        let f2 = f64::from(two) / f64::from(trials);
        assert!((f1 - 0.5).abs() < 4.0 * (0.5 * 0.5 / f64::from(trials)).sqrt(), "f1={f1}");
        assert!((f2 - 0.125).abs() < 4.0 * (0.125 * 0.875 / f64::from(trials)).sqrt(), "f2={f2}");
    }

    #[test]
    fn conditioned_samples_have_exact_leaf_count_and_labels() {
        let cfg = SamplerConfig::new(d2test(), 3);
        let sampler = ConditionedSampler::new(&cfg, 5).unwrap();
        let mut rng = trial_rng(cfg.seed, 1);
        for _ in 0..50 {
            let sample = sampler.draw(&mut rng).unwrap();
            assert_eq!(sample.tree.leaf_count(), 5);
            assert_eq!(sample.tree.label_set(), (1..=5).collect());
            assert!(sample.attempts >= 1);
        }
    }

    #[test]
    fn single_leaf_conditioning_is_immediate_among_single_leaf_trees() {
        let cfg = binary_cfg(5);
        let mut rng = trial_rng(cfg.seed, 0);
        let sample = sample_conditioned(&cfg, 1, &mut rng).unwrap();
        assert_eq!(sample.tree.to_string(), "1");
    }

    #[test]
    fn conditioning_errors() {
        let ternary = OffspringDistribution::new([(0, rat(2, 3)), (3, rat(1, 3))]).unwrap();
        let cfg = SamplerConfig::new(ternary, 0);
        let mut rng = trial_rng(0, 0);
        assert_eq!(
            sample_conditioned(&cfg, 2, &mut rng).unwrap_err(),
            SimError::ImpossibleLeafCount(2)
        );
        let mut tight = binary_cfg(0);
        tight.size_cap = 5;
        assert_eq!(
            sample_conditioned(&tight, 3, &mut rng).unwrap_err(),
            SimError::SizeCapTooSmall { cap: 5, n: 3 }
        );
        let mut hopeless = binary_cfg(0);
        hopeless.max_attempts = 1;
        // A single attempt almost never yields 12 leaves; retry determinism
        // aside, the error must be AttemptsExhausted when it fails.
        match ConditionedSampler::new(&hopeless, 12).unwrap().draw(&mut rng) {
            Ok(sample) => assert_eq!(sample.attempts, 1),
            Err(e) => assert_eq!(e, SimError::AttemptsExhausted(1)),
        }
    }

    #[test]
    fn identical_seeds_reproduce_samples_exactly() {
        let cfg = SamplerConfig::new(d2test(), 42);
        let draw_all = || -> Vec<String> {
            let sampler = ConditionedSampler::new(&cfg, 4).unwrap();
            (0..20)
                .map(|trial| {
                    let mut rng = trial_rng(cfg.seed, trial);
                    sampler.draw(&mut rng).unwrap().tree.to_string()
                })
                .collect()
        };
        assert_eq!(draw_all(), draw_all());
        let other = SamplerConfig::new(d2test(), 43);
        let sampler = ConditionedSampler::new(&other, 4).unwrap();
        let mut rng = trial_rng(other.seed, 0);
        let differs = (0..20).any(|trial| {
            let mut mine = trial_rng(cfg.seed, trial);
            let sampler_mine = ConditionedSampler::new(&cfg, 4).unwrap();
            let a = sampler_mine.draw(&mut mine).unwrap().tree.to_string();
            let b = sampler.draw(&mut rng).unwrap().tree.to_string();
            a != b
        });
        assert!(differs, "different seeds should not replay the same stream");
    }

    #[test]
    fn mc_induced_probability_matches_exact_value_at_small_n() {
        let cfg = binary_cfg(1234);
        let cherry = LabelledTree::from_str("(1,2)").unwrap();
        let report = mc_induced_probability(&cfg, &cherry, 3, 20_000).unwrap();
        assert_eq!(report.trials, 20_000);
        assert!((report.estimate - 0.5).abs() <= 4.0 * report.stderr, "estimate {}", report.estimate);
    }

    #[test]
    fn mc_expected_common_matches_exact_value_at_small_n() {
        let cfg = binary_cfg(99);
        let report = mc_expected_common(&cfg, 4, 2, 20_000, Comparison::Ordered).unwrap();
        assert!((report.estimate - 3.0).abs() <= 4.0 * report.stderr, "estimate {}", report.estimate);
        // Singleton subsets always agree, so every trial counts exactly n.
        let ones = mc_expected_common(&cfg, 4, 1, 50, Comparison::Ordered).unwrap();
        assert_eq!(ones.estimate, 4.0);
        assert_eq!(ones.stderr, 0.0);
    }

    #[test]
    fn mc_validation_errors() {
        let cfg = binary_cfg(0);
        let cherry = LabelledTree::from_str("(1,2)").unwrap();
        assert!(matches!(mc_induced_probability(&cfg, &cherry, 3, 0), Err(SimError::Config(_))));
        assert!(matches!(mc_induced_probability(&cfg, &cherry, 2, 10), Err(SimError::Config(_))));
        let off = LabelledTree::from_str("(1,9)").unwrap();
        assert!(matches!(mc_induced_probability(&cfg, &off, 3, 10), Err(SimError::Config(_))));
        assert!(matches!(mc_expected_common(&cfg, 4, 0, 10, Comparison::Ordered), Err(SimError::Config(_))));
    }
}
