//! Truncated power series with exact rational coefficients, and the
//! generating functions of the leaf-count model.

use num::{One, Zero};
use thiserror::Error;

use crate::ratio::Rat;
use crate::trees::OffspringDistribution;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("the series must have zero constant term")]
    ConstantTermNonzero,
}

/// Power series truncated at a fixed order; `coeffs()[k]` multiplies `y^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<Rat>,
}

impl PowerSeries {
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        debug_assert!(!coeffs.is_empty());
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        PowerSeries { coeffs: vec![Rat::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rat::one();
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `y^k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Copy truncated or zero-padded to exactly `order`.
    pub fn truncated(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Rat::zero());
        coeffs.truncate(order + 1);
        PowerSeries { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect();
        PowerSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect();
        PowerSeries { coeffs }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Rat::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        PowerSeries { coeffs }
    }

    /// Termwise derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..=self.order())
            .map(|k| &self.coeffs[k] * Rat::from_integer(k.into()))
            .collect();
        PowerSeries { coeffs }
    }

    /// Integer power, truncated at this order.
    pub fn pow(&self, e: usize) -> Self {
        let mut result = Self::one(self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `(1 - self)^(-e)`, requiring zero constant term so the expansion is a
    /// formal power series.
    pub fn neg_pow(&self, e: usize) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::ConstantTermNonzero);
        }
        // 1 / (1 - s) by the geometric recurrence, then small powers.
        let order = self.order();
        let mut inv = vec![Rat::zero(); order + 1];
        inv[0] = Rat::one();
        for k in 1..=order {
            let mut acc = Rat::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() && !inv[k - i].is_zero() {
                    acc += &self.coeffs[i] * &inv[k - i];
                }
            }
            inv[k] = acc;
        }
        Ok(PowerSeries { coeffs: inv }.pow(e))
    }
}

/// Leaf-count generating function of the branching process: the coefficient
/// of `y^n` is the probability that the terminal tree has exactly `n`
/// leaves. Solves `phi = sum_j prob(j) phi^j + prob(0) y` degree by degree.
pub fn leaf_count_gf(dist: &OffspringDistribution, order: usize) -> PowerSeries {
    let mut phi = vec![Rat::zero(); order + 1];
    if order >= 1 {
        phi[1] = dist.prob(0);
    }
    let dmax = dist.max_degree();
    // powers[j - 2][k] carries the coefficient of y^k in phi^j.
    let mut powers = vec![vec![Rat::zero(); order + 1]; dmax - 1];
    for k in 2..=order {
        for j in 2..=dmax {
            let mut acc = Rat::zero();
            for i in 1..k {
                let prev = if j == 2 { &phi[k - i] } else { &powers[j - 3][k - i] };
                if !phi[i].is_zero() && !prev.is_zero() {
                    acc += &phi[i] * prev;
                }
            }
            powers[j - 2][k] = acc;
        }
        let mut c = Rat::zero();
        for (j, p) in dist.support() {
            if j >= 2 {
                c += p * &powers[j - 2][k];
            }
        }
        phi[k] = c;
    }
    PowerSeries::from_coeffs(phi)
}

/// Size-biased companion of the leaf-count series:
/// `sum_{j >= 1} (j + 1) prob(j + 1) phi^j`. Its coefficients weight the
/// subtrees hanging off one edge of a conditioned tree.
pub fn size_biased_gf(dist: &OffspringDistribution, phi: &PowerSeries) -> PowerSeries {
    let dmax = dist.max_degree();
    let mut acc = PowerSeries::zero(phi.order());
    let mut power = phi.clone();
    for j in 1..dmax {
        let w = dist.prob(j + 1) * Rat::from_integer((j + 1).into());
        if !w.is_zero() {
            acc = acc.add(&power.scale(&w));
        }
        if j + 1 < dmax {
            power = power.mul(phi);
        }
    }
    acc
}

/// Generating function of rooted binary leaf-labelled trees: `t!` times the
/// coefficient of `x^t` counts the trees on `t` labelled leaves.
pub fn rooted_binary_gf(order: usize) -> PowerSeries {
    let mut coeffs = vec![Rat::zero(); order + 1];
    let mut double_fact = Rat::one();
    let mut fact = Rat::one();
    for (t, c) in coeffs.iter_mut().enumerate().skip(1) {
        fact *= Rat::from_integer(t.into());
        if t >= 2 {
            double_fact *= Rat::from_integer((2 * t - 3).into());
        }
        *c = &double_fact / &fact;
    }
    PowerSeries::from_coeffs(coeffs)
}
