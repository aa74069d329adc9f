//! Closed-form counts, probabilities, expectations, and tail-bound constants.
//!
//! Everything here has an independent counterpart — an exhaustive oracle in
//! [`crate::oracle`] or a Monte Carlo estimator in [`crate::sim`] — and the
//! verification suites assert agreement between the two routes.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{One, Zero};
use thiserror::Error;

use crate::agreement::{self, AgreementError};
use crate::ratio::{self, Rat};
use crate::series::{self, PowerSeries};
use crate::trees::{OffspringDistribution, PlaneTree};

#[derive(Debug, Error, PartialEq)]
pub enum FormulaError {
    #[error("argument out of range: {0}")]
    Domain(String),
    #[error("double factorial needs an odd argument, got {0}")]
    EvenArgument(i64),
    #[error("no tree with {0} leaves has positive probability, so conditioning is impossible")]
    ZeroDenominator(usize),
    #[error("asymptotics need aperiodic support (period 1), got period {0}")]
    PeriodicSupport(usize),
    #[error("refusing to enumerate ordered shapes with {0} leaves (limit {MAX_EXPECTATION_LEAVES})")]
    ShapeEnumerationTooLarge(usize),
}

/// Largest induced-shape leaf count for which [`expected_common_gw`] will
/// enumerate ordered shapes; the count grows super-exponentially beyond it.
pub const MAX_EXPECTATION_LEAVES: usize = 8;

fn domain(msg: impl Into<String>) -> FormulaError {
    FormulaError::Domain(msg.into())
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient C(n, k); zero when k > n.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Double factorial m·(m−2)···1 of an odd argument, with (−1)!! = 1.
pub fn double_factorial(m: i64) -> Result<BigInt, FormulaError> {
    if m.rem_euclid(2) == 0 {
        return Err(FormulaError::EvenArgument(m));
    }
    if m < -1 {
        return Err(domain(format!("double factorial needs m >= -1, got {m}")));
    }
    let mut acc = BigInt::one();
    let mut k = m;
    while k >= 3 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    Ok(acc)
}

/// Number of ordered forests of `k` rooted binary leaf-labelled trees with
/// `b` labelled leaves in total: k(2b−k−1)!/((b−k)!·2^(b−k)).
pub fn forest_count(b: usize, k: usize) -> Result<BigInt, FormulaError> {
    if k < 1 || k > b {
        return Err(domain(format!("forest needs 1 <= trees <= leaves, got {k} trees, {b} leaves")));
    }
    let numer = BigInt::from(k) * factorial(2 * b - k - 1);
    let denom = factorial(b - k) << (b - k);
    let q = &numer / &denom;
    debug_assert_eq!(&q * &denom, numer, "forest count must divide exactly");
    Ok(q)
}

/// Ordered forests of `k` rooted binary trees on `b` leaves, each attached to
/// one of the internal points of the 2(a−1) edges of an `a`-leaf host:
/// F(b,k)·C(k+2a−3, 2a−3).
pub fn attached_forest_count(b: usize, k: usize, a: usize) -> Result<BigInt, FormulaError> {
    if a < 2 {
        return Err(domain(format!("attachment needs a host with at least 2 leaves, got {a}")));
    }
    Ok(forest_count(b, k)? * binomial(k + 2 * a - 3, 2 * a - 3))
}

/// Number of unrooted binary leaf-labelled trees on [n] in which a fixed
/// `a`-leaf subtree shape is induced: (2n−5)!!/(2a−3)!!, independent of the
/// shape. Computed as the odd product (2a−1)(2a+1)···(2n−5).
pub fn unrooted_host_count(n: usize, a: usize) -> Result<BigInt, FormulaError> {
    if n < 3 || a < 2 || a >= n {
        return Err(domain(format!("host count needs 2 <= a < n and n >= 3, got n={n}, a={a}")));
    }
    let mut acc = BigInt::one();
    let mut odd = 2 * a - 1;
    while odd <= 2 * n - 5 {
        acc *= BigInt::from(odd);
        odd += 2;
    }
    Ok(acc)
}

/// Expected number of size-`a` leaf sets on which two independent uniform
/// unrooted binary trees on [n] induce the same subtree: C(n,a)/(2a−3)!!.
pub fn expected_common_unrooted(n: usize, a: usize) -> Result<Rat, FormulaError> {
    if a < 2 || a >= n {
        return Err(domain(format!("expectation needs 2 <= a < n, got n={n}, a={a}")));
    }
    Ok(Rat::new(binomial(n, a), double_factorial(2 * a as i64 - 3)?))
}

/// Probability data for one induced ordered shape in a conditioned terminal
/// tree with `n` leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedProbability {
    /// P(the fixed leaf set induces the shape, and the tree has n leaves).
    pub unconditional: Rat,
    /// The same event conditioned on the tree having n leaves.
    pub conditional: Rat,
    /// P(the tree has n leaves) = the n-th leaf-count coefficient.
    pub leaf_count_prob: Rat,
}

/// Shared series data for induced-probability evaluations at a fixed `n`:
/// the leaf-count series, its derivative, the size-biased series, and a memo
/// of extracted coefficients keyed by the shape's edge count.
struct InducedContext {
    n_leaf_prob: Rat,
    phi1: PowerSeries,
    dphi: PowerSeries,
    scale: Rat,
    coeff_by_edges: BTreeMap<usize, Rat>,
}

impl InducedContext {
    fn new(dist: &OffspringDistribution, n: usize, a: usize) -> Result<Self, FormulaError> {
        if a < 1 || a >= n {
            return Err(domain(format!("induced shape needs 1 <= a < n, got n={n}, a={a}")));
        }
        let phi = series::leaf_count_gf(dist, n);
        let n_leaf_prob = phi.coeff(n);
        if n_leaf_prob.is_zero() {
            return Err(FormulaError::ZeroDenominator(n));
        }
        let order = n - a;
        let phi1 = series::size_biased_gf(dist, &phi).truncated(order);
        let dphi = phi.derivative().truncated(order);
        // (n−a)!/(p₀·n!) = 1/(p₀·n·(n−1)···(n−a+1))
        let falling: BigInt = (n - a + 1..=n).map(BigInt::from).product();
        let scale = Rat::new(BigInt::one(), falling) / dist.prob(0);
        Ok(InducedContext { n_leaf_prob, phi1, dphi, scale, coeff_by_edges: BTreeMap::new() })
    }

    /// [y^(n−a)] (1−Φ₁)^(−e) Φ′ for a shape with `edges` edges.
    fn coefficient(&mut self, edges: usize) -> Rat {
        let order = self.dphi.order();
        let (phi1, dphi) = (&self.phi1, &self.dphi);
        self.coeff_by_edges
            .entry(edges)
            .or_insert_with(|| {
                phi1.neg_pow(edges)
                    .expect("size-biased series has zero constant term")
                    .mul(dphi)
                    .coeff(order)
            })
            .clone()
    }

    fn probability(&mut self, dist: &OffspringDistribution, shape: &PlaneTree) -> InducedProbability {
        let weight = dist.tree_weight(shape);
        let unconditional = if weight.is_zero() {
            Rat::zero()
        } else {
            weight * self.coefficient(shape.edge_count()) * &self.scale
        };
        let conditional = &unconditional / &self.n_leaf_prob;
        InducedProbability { unconditional, conditional, leaf_count_prob: self.n_leaf_prob.clone() }
    }
}

/// Probability that a fixed `a`-leaf set induces the given ordered shape in a
/// terminal tree conditioned on having `n` leaves (with the out-degree
/// condition), `1 <= a < n`. The shape's own leaf labels are irrelevant here:
/// by exchangeability every labelling of a shape has the same probability.
pub fn induced_probability(
    dist: &OffspringDistribution,
    shape: &PlaneTree,
    n: usize,
) -> Result<InducedProbability, FormulaError> {
    if !shape.is_induced_shape() {
        return Err(domain("shape has an internal vertex with fewer than 2 children".to_string()));
    }
    let mut ctx = InducedContext::new(dist, n, shape.leaf_count())?;
    Ok(ctx.probability(dist, shape))
}

/// Expected number of size-`a` leaf sets inducing the same ordered shape in
/// two independent conditioned terminal trees with `n` leaves:
/// C(n,a)·a!·Σ over ordered shapes of the squared conditional probability.
pub fn expected_common_gw(dist: &OffspringDistribution, n: usize, a: usize) -> Result<Rat, FormulaError> {
    if a > MAX_EXPECTATION_LEAVES {
        return Err(FormulaError::ShapeEnumerationTooLarge(a));
    }
    let mut ctx = InducedContext::new(dist, n, a)?;
    let shapes = agreement::enumerate_shapes(a, dist.max_degree()).map_err(|e| match e {
        AgreementError::ShapeEnumerationTooLarge(k) => FormulaError::ShapeEnumerationTooLarge(k),
        other => domain(other.to_string()),
    })?;
    let mut sum = Rat::zero();
    for shape in &shapes {
        let cond = ctx.probability(dist, shape).conditional;
        sum += &cond * &cond;
    }
    Ok(Rat::new(binomial(n, a) * factorial(a), BigInt::one()) * sum)
}

/// Closed form of [`expected_common_gw`] for the binary offspring law:
/// C(n,a)/(2^(a−1)·(2a−3)!!), valid for 1 <= a <= n.
pub fn expected_common_gw_binary(n: usize, a: usize) -> Result<Rat, FormulaError> {
    if a < 1 || a > n {
        return Err(domain(format!("expectation needs 1 <= a <= n, got n={n}, a={a}")));
    }
    let denom = double_factorial(2 * a as i64 - 3)? << (a - 1);
    Ok(Rat::new(binomial(n, a), denom))
}

/// Leading-order estimate of the probability that a terminal tree has `n`
/// leaves: sqrt(p₀/(2πσ²))·n^(−3/2). Requires aperiodic support.
pub fn asymptotic_leaf_prob(dist: &OffspringDistribution, n: usize) -> Result<f64, FormulaError> {
    if !dist.is_aperiodic() {
        return Err(FormulaError::PeriodicSupport(dist.period()));
    }
    if n == 0 {
        return Err(domain("asymptotics need n >= 1".to_string()));
    }
    let p0 = ratio::to_f64(&dist.prob(0));
    let sigma2 = ratio::to_f64(dist.variance());
    Ok((p0 / (2.0 * std::f64::consts::PI * sigma2)).sqrt() * (n as f64).powf(-1.5))
}

/// Ratio of the exact n-leaf probability to its leading-order estimate;
/// approaches 1 as n grows.
pub fn asymptotic_ratio(dist: &OffspringDistribution, n: usize) -> Result<f64, FormulaError> {
    let approx = asymptotic_leaf_prob(dist, n)?;
    let exact = series::leaf_count_gf(dist, n).coeff(n);
    Ok(ratio::to_f64(&exact) / approx)
}

/// The constants controlling the tail bound for the maximum agreement size
/// between two conditioned terminal trees.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundConstants {
    /// Offspring variance σ² (exact).
    pub sigma2: Rat,
    /// γ = sqrt(2p₀)/σ.
    pub gamma: f64,
    /// χ = sqrt(2p₀σ²).
    pub chi: f64,
    /// λ = max(χ⁻², χ⁻¹).
    pub lambda: f64,
    /// Squared offspring law: q_j = p_j² for j ≥ 2, q₀ = 1 − Σ q_j (exact).
    pub q: BTreeMap<usize, Rat>,
    /// Maximizer of r − Σ_{j≥2} q_j r^j (unique; the derivative is strictly
    /// decreasing), found by bisection to absolute tolerance 1e−12.
    pub rho: f64,
    /// The maximum value m = ρ − Σ_{j≥2} q_j ρ^j.
    pub m: f64,
    /// c = e·p₀·λ·m^(−1/2), the tail-threshold coefficient.
    pub c: f64,
}

/// Residual tolerance for the stationarity of the maximizer ρ.
pub const RHO_TOLERANCE: f64 = 1e-12;

pub fn bound_constants(dist: &OffspringDistribution) -> BoundConstants {
    let sigma2 = dist.variance().clone();
    let p0 = ratio::to_f64(&dist.prob(0));
    let gamma = (2.0 * p0 / ratio::to_f64(&sigma2)).sqrt();
    let chi = (2.0 * p0 * ratio::to_f64(&sigma2)).sqrt();
    let lambda = (chi.powi(-2)).max(chi.recip());

    let mut q: BTreeMap<usize, Rat> = BTreeMap::new();
    let mut tail_mass = Rat::zero();
    for (j, p) in dist.support() {
        if j >= 2 {
            let sq = p * p;
            tail_mass += &sq;
            q.insert(j, sq);
        }
    }
    q.insert(0, Rat::one() - tail_mass);
    let terms: Vec<(f64, f64)> =
        q.iter().filter(|(j, _)| **j >= 2).map(|(j, p)| (*j as f64, ratio::to_f64(p))).collect();
    let objective = |r: f64| -> f64 { r - terms.iter().map(|(j, qj)| qj * r.powf(*j)).sum::<f64>() };
    let slope = |r: f64| -> f64 { 1.0 - terms.iter().map(|(j, qj)| j * qj * r.powf(j - 1.0)).sum::<f64>() };

    // The slope is positive at r = 1 (Σ j·q_j < Σ j·p_j = 1) and strictly
    // decreasing, so bracket-double until it turns negative, then bisect.
    let mut lo = 1.0f64;
    let mut hi = 2.0f64;
    while slope(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > RHO_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = 0.5 * (lo + hi);
    let m = objective(rho);
    let c = std::f64::consts::E * p0 * lambda / m.sqrt();
    BoundConstants { sigma2, gamma, chi, lambda, q, rho, m, c }
}

/// The agreement-size threshold a* = ceil((1+ε)·c·√n) and the bound
/// (1−ε)^((1+ε)·c·√n) on the probability of a common induced subtree that
/// large between two independent conditioned terminal trees.
#[derive(Debug, Clone, PartialEq)]
pub struct TailThreshold {
    pub a_star: usize,
    /// Upper bound on P(maximum agreement size ≥ a_star).
    pub bound: f64,
    /// The real exponent (1+ε)·c·√n before rounding up.
    pub exponent: f64,
    /// The threshold coefficient c used.
    pub c: f64,
}

pub fn tail_threshold(dist: &OffspringDistribution, n: usize, eps: f64) -> Result<TailThreshold, FormulaError> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(domain(format!("epsilon must lie in (0, 1/2], got {eps}")));
    }
    if n == 0 {
        return Err(domain("tail threshold needs n >= 1".to_string()));
    }
    let c = bound_constants(dist).c;
    let exponent = (1.0 + eps) * c * (n as f64).sqrt();
    let bound = (1.0 - eps).powf(exponent);
    Ok(TailThreshold { a_star: exponent.ceil() as usize, bound, exponent, c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;
    use crate::trees::OffspringDistribution;

    fn d2test() -> OffspringDistribution {
        OffspringDistribution::new([(0, rat(7, 12)), (2, rat(1, 4)), (3, rat(1, 6))]).unwrap()
    }

    fn ternary() -> OffspringDistribution {
        OffspringDistribution::new([(0, rat(2, 3)), (3, rat(1, 3))]).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), big(1));
        assert_eq!(double_factorial(1).unwrap(), big(1));
        assert_eq!(double_factorial(5).unwrap(), big(15));
        assert_eq!(double_factorial(9).unwrap(), big(945));
        assert_eq!(double_factorial(4), Err(FormulaError::EvenArgument(4)));
        assert!(matches!(double_factorial(-3), Err(FormulaError::Domain(_))));
    }

    #[test]
    fn forest_count_values() {
        assert_eq!(forest_count(1, 1).unwrap(), big(1));
        assert_eq!(forest_count(2, 2).unwrap(), big(2));
        assert_eq!(forest_count(4, 1).unwrap(), big(15));
        assert_eq!(forest_count(3, 3).unwrap(), big(6));
        assert!(forest_count(3, 4).is_err());
        assert!(forest_count(3, 0).is_err());
    }

    #[test]
    fn forest_count_matches_series_route() {
        // k(2b−k−1)!/((b−k)!2^(b−k)) versus b!·[x^b] B(x)^k.
        let b_series = series::rooted_binary_gf(10);
        for b in 1..=10usize {
            for k in 1..=b {
                let coeff = b_series.pow(k).coeff(b);
                let via_series = coeff * Rat::new(factorial(b), BigInt::one());
                assert_eq!(via_series, Rat::new(forest_count(b, k).unwrap(), BigInt::one()), "b={b} k={k}");
            }
        }
    }

    #[test]
    fn attached_forest_values_and_row_sums() {
        assert_eq!(attached_forest_count(1, 1, 2).unwrap(), big(2));
        assert_eq!(attached_forest_count(2, 2, 2).unwrap(), big(6));
        for b in 1..=8usize {
            assert_eq!(attached_forest_count(b, b, 2).unwrap(), factorial(b) * big(b as i64 + 1));
        }
        // Row sums over k: Σ_k F(b,k)·C(k+2a−3,2a−3) = b!·[x^b](1−2x)^(−(a−1)).
        for a in 2..=5usize {
            let two_x = PowerSeries::from_coeffs(vec![Rat::zero(), rat(2, 1)]).truncated(8);
            let geometric = two_x.neg_pow(a - 1).unwrap();
            for b in 1..=8usize {
                let total: BigInt = (1..=b).map(|k| attached_forest_count(b, k, a).unwrap()).sum();
                let expected = geometric.coeff(b) * Rat::new(factorial(b), BigInt::one());
                assert_eq!(Rat::new(total, BigInt::one()), expected, "b={b} a={a}");
            }
        }
    }

    #[test]
    fn unrooted_host_count_values() {
        assert_eq!(unrooted_host_count(5, 3).unwrap(), big(5));
        assert_eq!(unrooted_host_count(6, 2).unwrap(), big(105));
        assert_eq!(unrooted_host_count(7, 4).unwrap(), big(63));
        assert_eq!(unrooted_host_count(4, 3).unwrap(), big(1));
        assert!(unrooted_host_count(5, 5).is_err());
        assert!(unrooted_host_count(5, 1).is_err());
    }

    #[test]
    fn expected_common_unrooted_values() {
        assert_eq!(expected_common_unrooted(6, 3).unwrap(), rat(20, 3));
        assert_eq!(expected_common_unrooted(5, 2).unwrap(), rat(10, 1));
        assert_eq!(expected_common_unrooted(7, 4).unwrap(), rat(7, 3));
        assert!(expected_common_unrooted(5, 5).is_err());
    }

    #[test]
    fn binary_conditional_is_shape_independent() {
        let binary = OffspringDistribution::binary();
        for a in 1..=5usize {
            let expected = Rat::new(BigInt::one(), double_factorial(2 * a as i64 - 3).unwrap() << (a - 1));
            for shape in agreement::enumerate_shapes(a, 2).unwrap() {
                for n in (a + 1)..=9 {
                    let p = induced_probability(&binary, &shape, n).unwrap();
                    assert_eq!(p.conditional, expected, "a={a} n={n}");
                }
            }
        }
    }

    #[test]
    fn single_leaf_is_always_induced() {
        for dist in [OffspringDistribution::binary(), d2test(), ternary()] {
            for n in 2..=7 {
                if series::leaf_count_gf(&dist, n).coeff(n).is_zero() {
                    continue;
                }
                let p = induced_probability(&dist, &PlaneTree::leaf(), n).unwrap();
                assert_eq!(p.conditional, Rat::one(), "n={n}");
            }
        }
    }

    #[test]
    fn d2test_cherry_conditional_at_four_leaves() {
        let shape = PlaneTree::node(vec![PlaneTree::leaf(), PlaneTree::leaf()]);
        let p = induced_probability(&d2test(), &shape, 4).unwrap();
        assert_eq!(p.leaf_count_prob, rat(132_055, 3_981_312));
        assert_eq!(p.conditional, rat(27, 110));
    }

    #[test]
    fn conditional_sums_over_labelled_targets_stay_within_one() {
        // For a fixed leaf set of size a, summing the conditional probability
        // over every ordered shape times the a! labellings gives exactly 1
        // for the binary law (the out-degree condition always holds) and at
        // most 1 otherwise.
        let binary = OffspringDistribution::binary();
        for (dist, exact) in [(&binary, true), (&d2test(), false)] {
            for a in 1..=4usize {
                for n in (a + 1)..=8 {
                    let mut total = Rat::zero();
                    for shape in agreement::enumerate_shapes(a, dist.max_degree()).unwrap() {
                        let p = induced_probability(dist, &shape, n).unwrap();
                        total += p.conditional * Rat::new(factorial(a), BigInt::one());
                    }
                    if exact {
                        assert_eq!(total, Rat::one(), "a={a} n={n}");
                    } else {
                        assert!(total <= Rat::one(), "a={a} n={n}: {total}");
                    }
                }
            }
        }
    }

    #[test]
    fn ternary_needs_compatible_leaf_counts() {
        assert_eq!(induced_probability(&ternary(), &PlaneTree::leaf(), 2), Err(FormulaError::ZeroDenominator(2)));
        assert!(induced_probability(&ternary(), &PlaneTree::leaf(), 3).is_ok());
    }

    #[test]
    fn rejects_non_induced_shapes() {
        let chain = PlaneTree::node(vec![PlaneTree::leaf()]);
        assert!(matches!(induced_probability(&OffspringDistribution::binary(), &chain, 4), Err(FormulaError::Domain(_))));
    }

    #[test]
    fn expected_common_gw_binary_closed_form_matches_general_route() {
        let binary = OffspringDistribution::binary();
        for a in 1..=4usize {
            for n in (a + 1)..=9 {
                let general = expected_common_gw(&binary, n, a).unwrap();
                assert_eq!(general, expected_common_gw_binary(n, a).unwrap(), "n={n} a={a}");
            }
        }
        assert_eq!(expected_common_gw(&binary, 4, 2).unwrap(), rat(3, 1));
        assert_eq!(expected_common_gw(&binary, 4, 3).unwrap(), rat(1, 3));
        for n in 2..=10 {
            assert_eq!(expected_common_gw(&binary, n, 1).unwrap(), rat(n as i64, 1));
        }
    }

    #[test]
    fn expected_common_gw_refuses_large_shapes() {
        let binary = OffspringDistribution::binary();
        assert_eq!(expected_common_gw(&binary, 20, 9), Err(FormulaError::ShapeEnumerationTooLarge(9)));
    }

    #[test]
    fn asymptotic_ratio_binary() {
        let binary = OffspringDistribution::binary();
        let r100 = asymptotic_ratio(&binary, 100).unwrap();
        assert!((r100 - 1.0).abs() < 0.01, "ratio at n=100: {r100}");
        assert_eq!(asymptotic_leaf_prob(&ternary(), 10), Err(FormulaError::PeriodicSupport(2)));
    }

    #[test]
    fn bound_constants_binary() {
        let b = bound_constants(&OffspringDistribution::binary());
        assert_eq!(b.sigma2, rat(1, 1));
        assert!((b.gamma - 1.0).abs() < 1e-12);
        assert!((b.chi - 1.0).abs() < 1e-12);
        assert!((b.lambda - 1.0).abs() < 1e-12);
        assert_eq!(b.q[&0], rat(3, 4));
        assert_eq!(b.q[&2], rat(1, 4));
        assert!((b.rho - 2.0).abs() < 1e-9);
        assert!((b.m - 1.0).abs() < 1e-9);
        assert!((b.c - std::f64::consts::E / 2.0).abs() < 1e-9);
    }

    #[test]
    fn bound_constants_d2test() {
        let b = bound_constants(&d2test());
        assert_eq!(b.sigma2, rat(3, 2));
        assert!((b.chi - (7.0f64 / 4.0).sqrt()).abs() < 1e-12);
        assert!((b.lambda - 2.0 / 7.0f64.sqrt()).abs() < 1e-12);
        assert!((b.rho - (-3.0 + 201.0f64.sqrt()) / 4.0).abs() < 1e-9);
        assert!((b.c - 0.919).abs() < 1e-3);
        let q_total = b.q.values().fold(Rat::zero(), |acc, v| acc + v);
        assert_eq!(q_total, Rat::one());
    }

    #[test]
    fn bound_constants_ternary() {
        let b = bound_constants(&ternary());
        assert_eq!(b.sigma2, rat(2, 1));
        assert!((b.chi - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((b.lambda - (3.0f64 / 8.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rho_is_stationary_for_builtins() {
        for dist in [OffspringDistribution::binary(), d2test(), ternary()] {
            let b = bound_constants(&dist);
            let slope: f64 = 1.0
                - b.q
                    .iter()
                    .filter(|(j, _)| **j >= 2)
                    .map(|(j, q)| *j as f64 * ratio::to_f64(q) * b.rho.powf(*j as f64 - 1.0))
                    .sum::<f64>();
            assert!(slope.abs() < 1e-10, "stationarity residual {slope}");
            assert!(b.m > 0.0 && b.rho > 1.0);
        }
    }

    #[test]
    fn tail_threshold_values() {
        let binary = OffspringDistribution::binary();
        let t = tail_threshold(&binary, 10_000, 0.5).unwrap();
        assert_eq!(t.a_star, 204);
        let expected = 0.5f64.powf(1.5 * (std::f64::consts::E / 2.0) * 100.0);
        assert!((t.bound - expected).abs() < 1e-12);
        let t100 = tail_threshold(&binary, 100, 0.5).unwrap();
        assert!((t100.bound.log2() + 1.5 * std::f64::consts::E / 2.0 * 10.0).abs() < 1e-9);
        assert!(tail_threshold(&binary, 100, 0.0).is_err());
        assert!(tail_threshold(&binary, 100, 0.6).is_err());
        // Tiny epsilon drives the bound toward 1 (vacuous).
        let weak = tail_threshold(&binary, 100, 1e-9).unwrap();
        assert!(weak.bound > 0.999_999_9);
    }
}
