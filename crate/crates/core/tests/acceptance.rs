//! Acceptance suite: one test per headline claim, each printing a single
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every test drives the corresponding cross-verification suite from
//! `gwmast::verify` at its full documented size; the library unit tests cover
//! the same code at smaller sizes.

use gwmast::verify;

fn criterion(index: usize, topic: &str, suite: &str) {
    let checks = verify::run_suite(suite).expect("suite names are pinned");
    assert!(!checks.is_empty(), "suite {suite} ran no checks");
    let failures: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    if failures.is_empty() {
        println!("ACCEPTANCE {index:2} [{suite}] {topic}: PASS");
    } else {
        println!("ACCEPTANCE {index:2} [{suite}] {topic}: FAIL — {}", failures.join("; "));
    }
    assert!(failures.is_empty(), "criterion {index} ({topic}) failed: {}", failures.join("; "));
}

#[test]
fn criterion_01_binary_leaf_count_closed_form_to_order_200() {
    criterion(1, "leaf-count coefficients match (2n-3)!!/(2^n n!) for n <= 200", "gf");
}

#[test]
fn criterion_02_host_counts_shape_independent() {
    criterion(2, "unrooted host counts equal (2n-5)!!/(2a-3)!! for every shape, n <= 7", "hosts");
}

#[test]
fn criterion_03_forest_formulas_three_routes() {
    criterion(3, "forest counts agree across formula, series, enumeration; row sums match", "forests");
}

#[test]
fn criterion_04_weight_sums_match_series() {
    criterion(4, "tree-weight sums over k <= 8 leaves equal the series coefficients", "weights");
}

#[test]
fn criterion_05_induced_probability_law() {
    criterion(5, "conditional induced probability matches the closed form and enumeration", "induced");
}

#[test]
fn criterion_06_expected_common_subtree_counts() {
    criterion(6, "expected common-subtree counts match closed forms for a <= 5, n <= 12", "expect");
}

#[test]
fn criterion_07_monte_carlo_consistency() {
    criterion(7, "seeded 100k-trial estimates fall within 4 standard errors", "mc");
}

#[test]
fn criterion_08_asymptotic_leaf_count_law() {
    criterion(8, "exact P(n leaves)·n^(3/2) approaches sqrt(p0/(2 pi sigma^2))", "asymptotic");
}

#[test]
fn criterion_09_bound_constants() {
    criterion(9, "binary constants are chi=1, lambda=1, rho=2, m=1, c=e/2 to 1e-9", "bounds");
}

#[test]
fn criterion_10_tail_bound_at_desk_scale() {
    criterion(10, "E[common count] <= (1-eps)^a beyond the threshold, n <= 12", "tail");
}

#[test]
fn criterion_11_agreement_dp_vs_oracle() {
    criterion(11, "maximum-agreement DP equals brute-force subset search on 200 pairs", "mast");
}
