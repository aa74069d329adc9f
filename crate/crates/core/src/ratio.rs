//! Exact rational arithmetic helpers shared across the crate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for all probabilities, weights, and series
/// coefficients.
pub type Rat = BigRational;

/// Shorthand for small rational constants, mostly in tests.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Nearest `f64` to an exact rational of arbitrary magnitude.
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

fn pow10(e: u64) -> BigInt {
    BigInt::from(10u32).pow(e as u32)
}

/// Renders an exact rational with 12 significant decimal digits.
///
/// Rounding is to nearest, ties to even. Values whose decimal exponent lies
/// outside `[-4, 11]` use scientific notation.
pub fn decimal12(r: &Rat) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let a = r.numer().abs();
    let b = r.denom().clone();

    // Decimal exponent e with |r| in [10^e, 10^(e+1)); the digit-count guess
    // is off by at most one.
    let mut e = a.to_string().len() as i64 - b.to_string().len() as i64;
    let at_least = |e: i64| -> bool {
        if e >= 0 {
            a >= &b * pow10(e as u64)
        } else {
            &a * pow10((-e) as u64) >= b
        }
    };
    if !at_least(e) {
        e -= 1;
    } else if at_least(e + 1) {
        e += 1;
    }

    // 12 significant digits of a/b, scaled so the integer part has them all.
    let (num, den) = if 11 - e >= 0 {
        (&a * pow10((11 - e) as u64), b)
    } else {
        (a.clone(), &b * pow10((e - 11) as u64))
    };
    let (mut q, rem) = num.div_rem(&den);
    let twice = &rem * 2;
    if twice > den || (twice == den && q.is_odd()) {
        q += 1;
    }
    if q == pow10(12) {
        q = pow10(11);
        e += 1;
    }
    let digits = q.to_string();
    debug_assert_eq!(digits.len(), 12);

    if !(-4..=11).contains(&e) {
        return format!("{sign}{}.{}e{}", &digits[..1], &digits[1..], e);
    }
    if e >= 0 {
        let split = (e + 1) as usize;
        if split == digits.len() {
            format!("{sign}{digits}")
        } else {
            format!("{sign}{}.{}", &digits[..split], &digits[split..])
        }
    } else {
        let zeros = "0".repeat((-e - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}
