//! Named built-in offspring distributions and config-file parsing.
//!
//! A distribution config is a map from child counts to exact probabilities
//! written as rational strings. JSON:
//!
//! ```json
//! { "offspring": { "0": "7/12", "2": "1/4", "3": "1/6" } }
//! ```
//!
//! TOML:
//!
//! ```toml
//! [offspring]
//! 0 = "7/12"
//! 2 = "1/4"
//! 3 = "1/6"
//! ```
//!
//! Values may be rational strings ("7/12"), integer strings ("1"), or plain
//! integers. Floats are rejected: the whole pipeline is exact.

use std::str::FromStr;

use num::BigInt;
use thiserror::Error;

use crate::ratio::Rat;
use crate::trees::{DistributionError, OffspringDistribution};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown built-in distribution {0:?}; available: binary, d2test, ternary")]
    UnknownName(String),
    #[error("could not parse config: {0}")]
    Parse(String),
    #[error("config needs an \"offspring\" table mapping child counts to probabilities")]
    MissingOffspringTable,
    #[error("child counts must be non-negative integers, got {0:?}")]
    BadDegree(String),
    #[error("probabilities must be exact rationals like \"7/12\" (floats are not accepted), got {0:?}")]
    BadProbability(String),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

/// The named distributions used throughout the test suites: `binary`
/// (p₀ = p₂ = 1/2), `d2test` (p₀ = 7/12, p₂ = 1/4, p₃ = 1/6, aperiodic with
/// two internal degrees), and `ternary` (p₀ = 2/3, p₃ = 1/3, period 2).
pub fn built_in(name: &str) -> Result<OffspringDistribution, ConfigError> {
    let rat = |n: i64, d: i64| Rat::new(BigInt::from(n), BigInt::from(d));
    let entries = match name {
        "binary" => return Ok(OffspringDistribution::binary()),
        "d2test" => vec![(0, rat(7, 12)), (2, rat(1, 4)), (3, rat(1, 6))],
        "ternary" => vec![(0, rat(2, 3)), (3, rat(1, 3))],
        other => return Err(ConfigError::UnknownName(other.to_string())),
    };
    Ok(OffspringDistribution::new(entries)?)
}

/// Names accepted by [`built_in`].
pub const BUILT_IN_NAMES: [&str; 3] = ["binary", "d2test", "ternary"];

/// Parses a distribution from JSON text.
pub fn from_json(text: &str) -> Result<OffspringDistribution, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let table = value
        .get("offspring")
        .and_then(|v| v.as_object())
        .ok_or(ConfigError::MissingOffspringTable)?;
    let entries = table
        .iter()
        .map(|(degree, prob)| Ok((parse_degree(degree)?, json_probability(prob)?)))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    Ok(OffspringDistribution::new(entries)?)
}

/// Parses a distribution from TOML text.
pub fn from_toml(text: &str) -> Result<OffspringDistribution, ConfigError> {
    let document: toml::Table =
        text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    let table = document
        .get("offspring")
        .and_then(|v| v.as_table())
        .ok_or(ConfigError::MissingOffspringTable)?;
    let entries = table
        .iter()
        .map(|(degree, prob)| Ok((parse_degree(degree)?, toml_probability(prob)?)))
        .collect::<Result<Vec<_>, ConfigError>>()?;
    Ok(OffspringDistribution::new(entries)?)
}

/// Dispatches on content: JSON if the text starts with `{`, TOML otherwise.
pub fn from_text(text: &str) -> Result<OffspringDistribution, ConfigError> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        from_toml(text)
    }
}

fn parse_degree(text: &str) -> Result<usize, ConfigError> {
    text.trim().parse().map_err(|_| ConfigError::BadDegree(text.to_string()))
}

fn json_probability(value: &serde_json::Value) -> Result<Rat, ConfigError> {
    match value {
        serde_json::Value::String(text) => parse_rational(text),
        serde_json::Value::Number(num) if num.is_u64() || num.is_i64() => {
            parse_rational(&num.to_string())
        }
        other => Err(ConfigError::BadProbability(other.to_string())),
    }
}

fn toml_probability(value: &toml::Value) -> Result<Rat, ConfigError> {
    match value {
        toml::Value::String(text) => parse_rational(text),
        toml::Value::Integer(i) => parse_rational(&i.to_string()),
        other => Err(ConfigError::BadProbability(other.to_string())),
    }
}

/// Parses "7/12", " 7 / 12 ", or "1" into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rat, ConfigError> {
    let bad = || ConfigError::BadProbability(text.to_string());
    let mut parts = text.splitn(2, '/');
    let numer = BigInt::from_str(parts.next().ok_or_else(bad)?.trim()).map_err(|_| bad())?;
    let denom = match parts.next() {
        Some(d) => BigInt::from_str(d.trim()).map_err(|_| bad())?,
        None => BigInt::from(1),
    };
    if denom == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::rat;

    #[test]
    fn built_ins_are_valid_and_named_correctly() {
        for name in BUILT_IN_NAMES {
            let dist = built_in(name).unwrap();
            assert!(dist.prob(0) > Rat::new(BigInt::from(0), BigInt::from(1)));
        }
        assert_eq!(built_in("binary").unwrap().prob(2), rat(1, 2));
        assert_eq!(built_in("d2test").unwrap().prob(3), rat(1, 6));
        assert_eq!(built_in("ternary").unwrap().period(), 2);
        assert_eq!(built_in("quaternary"), Err(ConfigError::UnknownName("quaternary".to_string())));
    }

    #[test]
    fn json_round_trip() {
        let dist = from_json(r#"{ "offspring": { "0": "7/12", "2": "1/4", "3": "1/6" } }"#).unwrap();
        assert_eq!(dist.prob(0), rat(7, 12));
        assert_eq!(dist.prob(3), rat(1, 6));
    }

    #[test]
    fn toml_round_trip() {
        let dist = from_toml("[offspring]\n0 = \"1/2\"\n2 = \"1/2\"\n").unwrap();
        assert_eq!(dist.prob(2), rat(1, 2));
        // Integer values are accepted for degenerate configs.
        let err = from_toml("[offspring]\n0 = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Distribution(_)), "mass 1 at degree 0 is not critical: {err}");
    }

    #[test]
    fn content_dispatch() {
        assert!(from_text(r#"{ "offspring": { "0": "1/2", "2": "1/2" } }"#).is_ok());
        assert!(from_text("[offspring]\n0 = \"1/2\"\n2 = \"1/2\"\n").is_ok());
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(from_json("{}"), Err(ConfigError::MissingOffspringTable));
        assert!(matches!(from_json("not json"), Err(ConfigError::Parse(_))));
        assert_eq!(
            from_json(r#"{ "offspring": { "x": "1/2" } }"#),
            Err(ConfigError::BadDegree("x".to_string()))
        );
        assert_eq!(
            from_json(r#"{ "offspring": { "0": 0.5 } }"#),
            Err(ConfigError::BadProbability("0.5".to_string()))
        );
        assert_eq!(
            from_json(r#"{ "offspring": { "0": "1/0" } }"#),
            Err(ConfigError::BadProbability("1/0".to_string()))
        );
        assert!(matches!(
            from_json(r#"{ "offspring": { "0": "1/2", "2": "1/3" } }"#),
            Err(ConfigError::Distribution(_))
        ));
        assert!(matches!(from_toml("offspring = 3\n"), Err(ConfigError::MissingOffspringTable)));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("7/12").unwrap(), rat(7, 12));
        assert_eq!(parse_rational(" 1 / 2 ").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("a/b").is_err());
    }
}
