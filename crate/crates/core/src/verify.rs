//! Cross-verification suites: every headline formula checked against an
//! independent route (exhaustive enumeration, a second closed form, or a
//! seeded Monte Carlo run). The `verify` CLI subcommand and the acceptance
//! test target both drive these.
//!
//! Each suite returns one [`Check`] row per claim, aggregating the many
//! individual comparisons behind it; a failed row carries the first few
//! offending cases in its detail string.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::agreement::{self, Comparison};
use crate::config;
use crate::formulas;
use crate::oracle::{self, EnumerationBudget};
use crate::ratio::{self, Rat};
use crate::series;
use crate::sim::{self, ConditionedSampler, SamplerConfig};
use crate::trees::{LabelledTree, OffspringDistribution};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("unknown verification suite {0:?}; available: gf, hosts, forests, weights, induced, expect, mc, asymptotic, bounds, tail, mast")]
    UnknownSuite(String),
}

/// One verified claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// All suites, in the order the acceptance criteria list them.
pub const SUITE_NAMES: [&str; 11] = [
    "gf",         // leaf-count series vs the binary closed form
    "hosts",      // host counts vs exhaustive unrooted enumeration
    "forests",    // forest counts: product formula vs series vs enumeration
    "weights",    // tree-weight sums vs leaf-count coefficients
    "induced",    // induced-subtree law vs closed form and enumeration
    "expect",     // expected common-subtree counts, both routes
    "mc",         // Monte Carlo estimates vs exact values (fixed seeds)
    "asymptotic", // exact leaf-count probabilities vs the n^(-3/2) law
    "bounds",     // tail-bound constants
    "tail",       // the tail inequality itself at desk scale
    "mast",       // agreement DP vs brute-force subset search
];

/// Fixed Monte Carlo seeds. Chosen once; the suites are deterministic given
/// these, and the documented flake budget (4-sigma / p=0.001 tests) applies
/// only to re-rolls with fresh seeds.
const SEED_MC_BINARY_CHERRY: u64 = 101;
const SEED_MC_D2TEST_CHERRY: u64 = 202;
const SEED_MC_UNIFORMITY: u64 = 303;
const SEED_MC_EXPECT: u64 = 404;
const SEED_MAST_PAIRS: u64 = 505;

/// Upper 0.001 quantile of the chi-square distribution with 11 degrees of
/// freedom, for the 12-outcome uniformity test.
const CHI_SQUARE_CRIT_11DF_P001: f64 = 31.264;

pub fn run_all() -> Vec<Check> {
    SUITE_NAMES.iter().flat_map(|name| run_suite(name).expect("built-in names are valid")).collect()
}

pub fn run_suite(name: &str) -> Result<Vec<Check>, VerifyError> {
    run_suite_capped(name, None)
}

/// Runs a suite, optionally lowering its size ceiling (the largest series
/// order for `gf`, the largest host size for `hosts`, the largest pair size
/// for `mast`; other suites have fixed desk-scale sizes).
pub fn run_suite_capped(name: &str, size_cap: Option<usize>) -> Result<Vec<Check>, VerifyError> {
    match name {
        "gf" => Ok(gf_suite(size_cap.unwrap_or(200))),
        "hosts" => Ok(hosts_suite(size_cap.unwrap_or(7).clamp(3, 8))),
        "forests" => Ok(forests_suite()),
        "weights" => Ok(weights_suite()),
        "induced" => Ok(induced_suite()),
        "expect" => Ok(expect_suite()),
        "mc" => Ok(mc_suite()),
        "asymptotic" => Ok(asymptotic_suite()),
        "bounds" => Ok(bounds_suite()),
        "tail" => Ok(tail_suite()),
        "mast" => Ok(mast_suite(size_cap.unwrap_or(8).clamp(3, 8))),
        other => Err(VerifyError::UnknownSuite(other.to_string())),
    }
}

fn summarize(suite: &'static str, name: &'static str, cases: usize, failures: Vec<String>) -> Check {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{cases} cases")
    } else {
        let shown = failures.iter().take(3).cloned().collect::<Vec<_>>().join("; ");
        format!("{}/{cases} cases failed: {shown}", failures.len())
    };
    Check { suite, name, passed, detail }
}

fn builtins() -> [(&'static str, OffspringDistribution); 3] {
    [
        ("binary", config::built_in("binary").unwrap()),
        ("d2test", config::built_in("d2test").unwrap()),
        ("ternary", config::built_in("ternary").unwrap()),
    ]
}

// ---------------------------------------------------------------- gf

/// [y^n] of the binary leaf-count series must equal (2n−3)!!/(2^n·n!).
fn gf_suite(order: usize) -> Vec<Check> {
    let order = order.max(2);
    let phi = series::leaf_count_gf(&OffspringDistribution::binary(), order);
    let mut failures = Vec::new();
    let mut odd = BigInt::one(); // (2n−3)!! for the current n
    let mut even = BigInt::from(2); // 2^n·n!
    for n in 1..=order {
        if phi.coeff(n) != Rat::new(odd.clone(), even.clone()) {
            failures.push(format!("n={n}"));
        }
        odd *= BigInt::from(2 * n as i64 - 1);
        even *= BigInt::from(2 * (n + 1));
    }
    vec![summarize("gf", "binary leaf-count coefficients match the double-factorial closed form", order, failures)]
}

// ------------------------------------------------------------- hosts

/// The number of unrooted hosts inducing a fixed subtree must match the
/// closed form for every subtree shape — shape independence included.
fn hosts_suite(n_max: usize) -> Vec<Check> {
    let budget = EnumerationBudget::default();
    let mut count_failures = Vec::new();
    let mut shape_failures = Vec::new();
    let mut cases = 0;
    let mut totals = 0;
    for n in 4..=n_max {
        let hosts = match oracle::all_unrooted_binary(n, &budget) {
            Ok(h) => h,
            Err(e) => {
                count_failures.push(format!("n={n}: {e}"));
                continue;
            }
        };
        totals += 1;
        let expected_total = formulas::double_factorial(2 * n as i64 - 5).unwrap();
        if BigInt::from(hosts.len()) != expected_total {
            count_failures.push(format!("n={n}: {} trees, expected {expected_total}", hosts.len()));
        }
        for a in 2..=4.min(n - 1) {
            let labels: Vec<usize> = (1..=a).collect();
            let subset = labels.iter().copied().collect();
            let shapes = oracle::all_rooted_binary_labelled(&labels, &budget).unwrap();
            let expected = formulas::unrooted_host_count(n, a).unwrap();
            for shape in shapes {
                let target = shape.canonical_unordered();
                let got = hosts
                    .iter()
                    .filter(|h| agreement::induce_unrooted(h, &subset).unwrap().shape == target)
                    .count();
                cases += 1;
                if BigInt::from(got) != expected {
                    shape_failures.push(format!("n={n} shape={target}: {got} hosts, expected {expected}"));
                }
            }
        }
    }
    vec![
        summarize("hosts", "unrooted enumeration sizes match (2n-5)!!", totals, count_failures),
        summarize("hosts", "host counts are shape-independent and match the closed form", cases, shape_failures),
    ]
}

// ----------------------------------------------------------- forests

/// F(b,k) three ways (product formula, series coefficient, enumeration) and
/// the attached-forest row sums against a geometric-series coefficient.
fn forests_suite() -> Vec<Check> {
    let budget = EnumerationBudget::default();
    let b_series = series::rooted_binary_gf(7);
    let mut triple_failures = Vec::new();
    let mut triples = 0;
    for b in 1..=7usize {
        for k in 1..=b {
            triples += 1;
            let product = formulas::forest_count(b, k).unwrap();
            let via_series = b_series.pow(k).coeff(b) * Rat::new(formulas::factorial(b), BigInt::one());
            let enumerated = oracle::all_ordered_forests(b, k, &budget).unwrap().len();
            if via_series != Rat::new(product.clone(), BigInt::one()) || BigInt::from(enumerated) != product {
                triple_failures.push(format!(
                    "b={b} k={k}: formula {product}, series {via_series}, enumeration {enumerated}"
                ));
            }
        }
    }
    let mut sum_failures = Vec::new();
    let mut sums = 0;
    for a in 2..=5usize {
        let two_x = crate::series::PowerSeries::from_coeffs(vec![Rat::zero(), Rat::new(BigInt::from(2), BigInt::one())])
            .truncated(7);
        let geometric = two_x.neg_pow(a - 1).unwrap();
        for b in 1..=7usize {
            sums += 1;
            let total: BigInt = (1..=b).map(|k| formulas::attached_forest_count(b, k, a).unwrap()).sum();
            let expected = geometric.coeff(b) * Rat::new(formulas::factorial(b), BigInt::one());
            if Rat::new(total.clone(), BigInt::one()) != expected {
                sum_failures.push(format!("b={b} a={a}: sum {total}, series {expected}"));
            }
        }
    }
    vec![
        summarize("forests", "ordered-forest counts agree across formula, series, and enumeration", triples, triple_failures),
        summarize("forests", "attached-forest row sums match the geometric-series coefficients", sums, sum_failures),
    ]
}

// ----------------------------------------------------------- weights

/// Σ over all plane trees with k leaves of their probability weight must be
/// exactly the k-th leaf-count coefficient, for every built-in law.
fn weights_suite() -> Vec<Check> {
    let budget = EnumerationBudget::default();
    let mut failures = Vec::new();
    let mut cases = 0;
    for (name, dist) in builtins() {
        let phi = series::leaf_count_gf(&dist, 8);
        for k in 1..=8usize {
            cases += 1;
            let total = oracle::all_plane_trees_with_leaves(k, &dist.internal_degrees(), &budget)
                .unwrap()
                .iter()
                .map(|t| dist.tree_weight(t))
                .fold(Rat::zero(), |acc, w| acc + w);
            if total != phi.coeff(k) {
                failures.push(format!("{name} k={k}: weight sum {total} vs coefficient {}", phi.coeff(k)));
            }
        }
    }
    vec![summarize("weights", "tree-weight sums equal the leaf-count coefficients", cases, failures)]
}

// ----------------------------------------------------------- induced

/// The conditional induced-subtree law: binary closed form for every ordered
/// shape and n, the ordering aggregation, and exhaustive-enumeration checks
/// for non-binary laws.
fn induced_suite() -> Vec<Check> {
    let binary = OffspringDistribution::binary();
    let mut closed_failures = Vec::new();
    let mut closed_cases = 0;
    let mut ordering_failures = Vec::new();
    for a in 1..=5usize {
        let denominator = formulas::double_factorial(2 * a as i64 - 3).unwrap() << (a - 1);
        let expected = Rat::new(BigInt::one(), denominator);
        for shape in agreement::enumerate_shapes(a, 2).unwrap() {
            for n in (a + 1)..=12 {
                closed_cases += 1;
                let got = formulas::induced_probability(&binary, &shape, n).unwrap().conditional;
                if got != expected {
                    closed_failures.push(format!("a={a} n={n}: {got}"));
                }
            }
        }
        // Summing the conditional probability over the 2^(a−1) child
        // orderings of a binary shape must give 1/(2a−3)!!.
        let orderings = BigInt::one() << (a - 1);
        let aggregated = &expected * Rat::new(orderings, BigInt::one());
        let unordered = Rat::new(BigInt::one(), formulas::double_factorial(2 * a as i64 - 3).unwrap());
        if aggregated != unordered {
            ordering_failures.push(format!("a={a}: {aggregated} vs {unordered}"));
        }
    }

    let budget = EnumerationBudget::default();
    let mut oracle_failures = Vec::new();
    let mut oracle_cases = 0;
    let d2test = config::built_in("d2test").unwrap();
    let ternary = config::built_in("ternary").unwrap();
    let cherry: LabelledTree = "(1,2)".parse().unwrap();
    let star: LabelledTree = "(1,2,3)".parse().unwrap();
    let comb: LabelledTree = "((1,2),3)".parse().unwrap();
    let mut cross_check = |dist: &OffspringDistribution, target: &LabelledTree, n: usize, pinned: Option<Rat>| {
        oracle_cases += 1;
        let enumerated = oracle::brute_conditional_induced(dist, target, n, &budget).unwrap();
        let formula = formulas::induced_probability(dist, target.shape(), n).unwrap().conditional;
        if formula != enumerated {
            oracle_failures.push(format!("{target} n={n}: formula {formula} vs enumeration {enumerated}"));
        }
        if let Some(pinned) = pinned {
            if formula != pinned {
                oracle_failures.push(format!("{target} n={n}: formula {formula} vs pinned {pinned}"));
            }
        }
    };
    cross_check(&binary, &cherry, 3, Some(ratio::rat(1, 2)));
    cross_check(&binary, &comb, 5, Some(ratio::rat(1, 12)));
    cross_check(&d2test, &cherry, 4, Some(ratio::rat(27, 110)));
    cross_check(&d2test, &star, 4, None);
    cross_check(&d2test, &comb, 5, None);
    cross_check(&ternary, &star, 5, None);

    vec![
        summarize("induced", "binary conditional law is shape-independent with the closed-form value", closed_cases, closed_failures),
        summarize("induced", "ordering aggregation recovers the unordered law", 5, ordering_failures),
        summarize("induced", "conditional law matches exhaustive enumeration", oracle_cases, oracle_failures),
    ]
}

// ------------------------------------------------------------ expect

/// Expected common-subtree counts: the general route against the binary
/// closed form, the headline small-a polynomials, and an enumeration-backed
/// check for a non-binary law.
fn expect_suite() -> Vec<Check> {
    let binary = OffspringDistribution::binary();
    let mut closed_failures = Vec::new();
    let mut closed_cases = 0;
    for a in 1..=5usize {
        for n in (a + 1)..=12 {
            closed_cases += 1;
            let general = formulas::expected_common_gw(&binary, n, a).unwrap();
            let closed = formulas::expected_common_gw_binary(n, a).unwrap();
            if general != closed {
                closed_failures.push(format!("n={n} a={a}: {general} vs {closed}"));
            }
        }
    }

    let mut poly_failures = Vec::new();
    let mut poly_cases = 0;
    for n in 2..=12usize {
        let n_rat = |v: i64| Rat::new(BigInt::from(v), BigInt::one());
        let e1 = formulas::expected_common_gw(&binary, n, 1).unwrap();
        poly_cases += 1;
        if e1 != n_rat(n as i64) {
            poly_failures.push(format!("a=1 n={n}: {e1}"));
        }
        if n >= 3 {
            let e2 = formulas::expected_common_gw(&binary, n, 2).unwrap();
            poly_cases += 1;
            if e2 != Rat::new(BigInt::from(n * (n - 1)), BigInt::from(4)) {
                poly_failures.push(format!("a=2 n={n}: {e2}"));
            }
        }
        if n >= 4 {
            let e3 = formulas::expected_common_gw(&binary, n, 3).unwrap();
            poly_cases += 1;
            if e3 != Rat::new(BigInt::from(n * (n - 1) * (n - 2)), BigInt::from(72)) {
                poly_failures.push(format!("a=3 n={n}: {e3}"));
            }
        }
    }

    // Non-binary dual route: rebuild the expectation from enumeration-backed
    // conditional probabilities, E = C(n,a)·a!·Σ over ordered shapes of the
    // squared conditional.
    let budget = EnumerationBudget::default();
    let d2test = config::built_in("d2test").unwrap();
    let mut dual_failures = Vec::new();
    let mut dual_cases = 0;
    for (n, a) in [(5usize, 2usize), (5, 3), (4, 2)] {
        dual_cases += 1;
        let mut sum = Rat::zero();
        for shape in agreement::enumerate_shapes(a, d2test.max_degree()).unwrap() {
            let labels: Vec<usize> = (1..=a).collect();
            let target = LabelledTree::new(shape, &labels).unwrap();
            let cond = oracle::brute_conditional_induced(&d2test, &target, n, &budget).unwrap();
            sum += &cond * &cond;
        }
        let via_oracle = Rat::new(formulas::binomial(n, a) * formulas::factorial(a), BigInt::one()) * sum;
        let via_formula = formulas::expected_common_gw(&d2test, n, a).unwrap();
        if via_oracle != via_formula {
            dual_failures.push(format!("n={n} a={a}: formula {via_formula} vs enumeration {via_oracle}"));
        }
    }

    vec![
        summarize("expect", "general expectation equals the binary closed form", closed_cases, closed_failures),
        summarize("expect", "headline small-a expectation polynomials hold", poly_cases, poly_failures),
        summarize("expect", "non-binary expectation matches the enumeration route", dual_cases, dual_failures),
    ]
}

// ---------------------------------------------------------------- mc

/// Seeded Monte Carlo runs against exact values: two induced-probability
/// targets, a conditional-uniformity chi-square test, and one expectation.
fn mc_suite() -> Vec<Check> {
    let mut checks = Vec::new();
    let trials = 100_000u64;

    let binary = OffspringDistribution::binary();
    let cherry: LabelledTree = "(1,2)".parse().unwrap();
    let cfg = SamplerConfig::new(binary.clone(), SEED_MC_BINARY_CHERRY);
    checks.push(match sim::mc_induced_probability(&cfg, &cherry, 3, trials) {
        Ok(report) => {
            let exact = 0.5;
            let within = (report.estimate - exact).abs() <= 4.0 * report.stderr;
            Check {
                suite: "mc",
                name: "binary cherry probability at n=3 within 4 standard errors of 1/2",
                passed: within,
                detail: format!(
                    "estimate {:.5} ± {:.5} over {trials} trials, seed {}",
                    report.estimate, report.stderr, report.seed
                ),
            }
        }
        Err(e) => Check { suite: "mc", name: "binary cherry probability at n=3 within 4 standard errors of 1/2", passed: false, detail: e.to_string() },
    });

    let d2test = config::built_in("d2test").unwrap();
    let cfg = SamplerConfig::new(d2test, SEED_MC_D2TEST_CHERRY);
    let exact = ratio::to_f64(
        &formulas::induced_probability(&config::built_in("d2test").unwrap(), cherry.shape(), 4)
            .unwrap()
            .conditional,
    );
    checks.push(match sim::mc_induced_probability(&cfg, &cherry, 4, trials) {
        Ok(report) => {
            let within = (report.estimate - exact).abs() <= 4.0 * report.stderr;
            Check {
                suite: "mc",
                name: "d2test cherry probability at n=4 within 4 standard errors of the exact value",
                passed: within,
                detail: format!(
                    "estimate {:.5} ± {:.5} vs exact {exact:.5}, {trials} trials, seed {}",
                    report.estimate, report.stderr, report.seed
                ),
            }
        }
        Err(e) => Check { suite: "mc", name: "d2test cherry probability at n=4 within 4 standard errors of the exact value", passed: false, detail: e.to_string() },
    });

    checks.push(uniformity_check(trials));

    let cfg = SamplerConfig::new(binary, SEED_MC_EXPECT);
    checks.push(match sim::mc_expected_common(&cfg, 4, 2, 20_000, Comparison::Ordered) {
        Ok(report) => {
            let within = (report.estimate - 3.0).abs() <= 4.0 * report.stderr;
            Check {
                suite: "mc",
                name: "expected common count at n=4, a=2 within 4 standard errors of 3",
                passed: within,
                detail: format!(
                    "estimate {:.4} ± {:.4} over {} trials, seed {}",
                    report.estimate, report.stderr, report.trials, report.seed
                ),
            }
        }
        Err(e) => Check { suite: "mc", name: "expected common count at n=4, a=2 within 4 standard errors of 3", passed: false, detail: e.to_string() },
    });

    checks
}

/// Conditioned on 3 leaves, the binary terminal tree is uniform over its
/// 2 shapes × 6 labellings; chi-square over the 12 outcomes.
fn uniformity_check(trials: u64) -> Check {
    let name = "conditioned binary tree at n=3 is uniform over its 12 outcomes (chi-square)";
    let cfg = SamplerConfig::new(OffspringDistribution::binary(), SEED_MC_UNIFORMITY);
    let sampler = match ConditionedSampler::new(&cfg, 3) {
        Ok(s) => s,
        Err(e) => return Check { suite: "mc", name, passed: false, detail: e.to_string() },
    };
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for trial in 0..trials {
        let mut rng = sim::trial_rng(cfg.seed, trial);
        match sampler.draw(&mut rng) {
            Ok(sample) => *counts.entry(sample.tree.to_string()).or_insert(0) += 1,
            Err(e) => return Check { suite: "mc", name, passed: false, detail: e.to_string() },
        }
    }
    // Enumerate all 12 possible outcomes explicitly so missing cells count.
    let mut outcomes = Vec::new();
    for shape in agreement::enumerate_shapes(3, 2).unwrap() {
        for perm in [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]] {
            outcomes.push(LabelledTree::new(shape.clone(), &perm).unwrap().to_string());
        }
    }
    debug_assert_eq!(outcomes.len(), 12);
    let expected = trials as f64 / outcomes.len() as f64;
    let mut chi2 = 0.0;
    let mut seen = 0u64;
    for outcome in &outcomes {
        let observed = counts.get(outcome).copied().unwrap_or(0);
        seen += observed;
        let diff = observed as f64 - expected;
        chi2 += diff * diff / expected;
    }
    let all_accounted = seen == trials;
    Check {
        suite: "mc",
        name,
        passed: chi2 < CHI_SQUARE_CRIT_11DF_P001 && all_accounted,
        detail: format!(
            "chi-square {chi2:.2} over 11 degrees of freedom (critical {CHI_SQUARE_CRIT_11DF_P001}), {trials} draws, seed {}",
            cfg.seed
        ),
    }
}

// -------------------------------------------------------- asymptotic

/// Exact leaf-count probabilities against sqrt(p₀/(2πσ²))·n^(−3/2).
fn asymptotic_suite() -> Vec<Check> {
    let binary = OffspringDistribution::binary();
    let d2test = config::built_in("d2test").unwrap();
    let cases = [
        ("binary", &binary, 25usize, 0.10f64),
        ("binary", &binary, 400, 0.02),
        ("d2test", &d2test, 400, 0.10),
    ];
    let total = cases.len();
    let mut failures = Vec::new();
    for (name, dist, n, tolerance) in cases {
        let r = formulas::asymptotic_ratio(dist, n).unwrap();
        if (r - 1.0).abs() > tolerance {
            failures.push(format!("{name} n={n}: ratio {r:.4} off by more than {tolerance}"));
        }
    }
    vec![summarize("asymptotic", "exact leaf-count probabilities track the n^(-3/2) law", total, failures)]
}

// ------------------------------------------------------------ bounds

/// The tail-bound constants: exact binary values, the stationarity residual
/// of the maximizer, and hand-checked values for the other built-ins.
fn bounds_suite() -> Vec<Check> {
    let mut failures = Vec::new();
    let binary = formulas::bound_constants(&OffspringDistribution::binary());
    let close = |x: f64, y: f64| (x - y).abs() < 1e-9;
    if !(binary.sigma2 == Rat::one()
        && close(binary.chi, 1.0)
        && close(binary.lambda, 1.0)
        && close(binary.rho, 2.0)
        && close(binary.m, 1.0)
        && close(binary.c, std::f64::consts::E / 2.0))
    {
        failures.push(format!("binary constants off: {binary:?}"));
    }
    let d2 = formulas::bound_constants(&config::built_in("d2test").unwrap());
    if !(d2.sigma2 == ratio::rat(3, 2)
        && close(d2.chi, (7.0f64 / 4.0).sqrt())
        && close(d2.lambda, 2.0 / 7.0f64.sqrt())
        && close(d2.rho, (-3.0 + 201.0f64.sqrt()) / 4.0)
        && (d2.c - 0.919).abs() < 1e-3)
    {
        failures.push(format!("d2test constants off: {d2:?}"));
    }
    let ternary = formulas::bound_constants(&config::built_in("ternary").unwrap());
    if !(ternary.sigma2 == ratio::rat(2, 1)
        && close(ternary.chi, (8.0f64 / 3.0).sqrt())
        && close(ternary.lambda, (3.0f64 / 8.0).sqrt()))
    {
        failures.push(format!("ternary constants off: {ternary:?}"));
    }
    let constants_check = summarize("bounds", "constants match their hand-computed values", 3, failures);

    let mut residual_failures = Vec::new();
    for (name, dist) in builtins() {
        let b = formulas::bound_constants(&dist);
        let slope: f64 = 1.0
            - b.q
                .iter()
                .filter(|(j, _)| **j >= 2)
                .map(|(j, q)| *j as f64 * ratio::to_f64(q) * b.rho.powf(*j as f64 - 1.0))
                .sum::<f64>();
        let q_sum = b.q.values().fold(Rat::zero(), |acc, v| acc + v);
        let subcritical = b
            .q
            .iter()
            .filter(|(j, _)| **j >= 2)
            .map(|(j, q)| Rat::new(BigInt::from(*j), BigInt::one()) * q)
            .fold(Rat::zero(), |acc, v| acc + v)
            < Rat::one();
        if slope.abs() >= 1e-10 || q_sum != Rat::one() || !subcritical || b.m <= 0.0 || b.rho <= 1.0 {
            residual_failures.push(format!("{name}: residual {slope:e}"));
        }
    }
    let residual_check =
        summarize("bounds", "maximizer is stationary and the squared law is a subcritical distribution", 3, residual_failures);
    vec![constants_check, residual_check]
}

// -------------------------------------------------------------- tail

/// Above the threshold a* = ceil((3/2)·c·√n), the exact expected agreement
/// count is already below (1/2)^a — the desk-scale shadow of the tail bound.
fn tail_suite() -> Vec<Check> {
    let binary = OffspringDistribution::binary();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut vacuous = Vec::new();
    for n in 1..=12usize {
        let threshold = formulas::tail_threshold(&binary, n, 0.5).unwrap();
        if threshold.a_star > n {
            vacuous.push(n.to_string());
            continue;
        }
        for a in threshold.a_star..=n {
            checked += 1;
            let expectation = formulas::expected_common_gw_binary(n, a).unwrap();
            let bound = Rat::new(BigInt::one(), BigInt::one() << a);
            if expectation > bound {
                failures.push(format!("n={n} a={a}: E={expectation} exceeds 2^-{a}"));
            }
        }
    }
    let mut check = summarize("tail", "expected agreement counts drop below (1/2)^a beyond the threshold", checked, failures);
    if !vacuous.is_empty() {
        check.detail = format!("{}; vacuous (a* > n) and skipped for n in {{{}}}", check.detail, vacuous.join(","));
    }
    vec![check]
}

// -------------------------------------------------------------- mast

/// The agreement DP against brute-force subset search on seeded random
/// binary pairs.
fn mast_suite(n_max: usize) -> Vec<Check> {
    let pairs = 200;
    let mut rng = sim::trial_rng(SEED_MAST_PAIRS, 0);
    let mut failures = Vec::new();
    for pair in 0..pairs {
        let n = rng.random_range(3..=n_max);
        let first = random_rooted_binary(n, &mut rng);
        let second = random_rooted_binary(n, &mut rng);
        let dp = agreement::mast_binary(&first, &second).unwrap();
        let brute = (1..=n)
            .rev()
            .find(|&a| agreement::common_count(&first, &second, a, Comparison::Unordered).unwrap() > 0)
            .unwrap_or(0);
        if dp != brute {
            failures.push(format!("pair {pair}: {first} vs {second}: DP {dp}, brute force {brute}"));
        }
    }
    vec![summarize("mast", "agreement DP equals brute-force subset search on random pairs", pairs, failures)]
}

/// Uniform random unordered rooted binary tree on {1,…,n}: each new leaf is
/// inserted above a uniformly chosen vertex.
fn random_rooted_binary(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> LabelledTree {
    let mut tree = LabelledTree::single(1);
    for label in 2..=n {
        let target = rng.random_range(0..tree.shape().vertex_count());
        tree = oracle::insert_above(&tree, target, label);
    }
    tree
}
