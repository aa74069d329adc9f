//! Machine-readable artifacts: run manifests, exact-rational rendering, and
//! the JSON/CSV sinks shared by every subcommand.
//!
//! Rationals are written as `num/den` strings (plain integers when the
//! denominator is one) so no precision is lost; wherever a decimal is shown
//! it sits next to the exact field. JSON objects serialize with sorted keys,
//! so a fixed manifest (including the seed) yields byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use gwmast::ratio::{self, Rat};
use gwmast::trees::OffspringDistribution;
use serde_json::{json, Map, Value};

use crate::CliError;

/// One row of the fixed `n,a,value,stderr` schema used by every CSV
/// artifact; inapplicable fields stay empty.
pub struct CsvRow {
    pub n: Option<usize>,
    pub a: Option<usize>,
    pub value: String,
    pub stderr: Option<f64>,
}

/// The manifest embedded in every artifact: command, tool version, the full
/// offspring table (so a result file round-trips without the original
/// config), and the command parameters.
pub fn manifest(
    command: &str,
    dist: Option<&OffspringDistribution>,
    params: Vec<(&str, Value)>,
) -> Value {
    let mut root = Map::new();
    root.insert("command".to_string(), json!(command));
    root.insert("version".to_string(), json!(env!("CARGO_PKG_VERSION")));
    if let Some(d) = dist {
        let offspring: Map<String, Value> =
            d.support().map(|(j, p)| (j.to_string(), json!(exact(p)))).collect();
        root.insert("offspring".to_string(), Value::Object(offspring));
    }
    let parameters: Map<String, Value> = params
        .into_iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    root.insert("parameters".to_string(), Value::Object(parameters));
    Value::Object(root)
}

/// Exact rational as a `num/den` string.
pub fn exact(r: &Rat) -> String {
    r.to_string()
}

/// An exact rational with its 12-significant-digit decimal rendering.
pub fn exact_with_decimal(r: &Rat) -> Value {
    json!({ "exact": exact(r), "decimal": ratio::decimal12(r) })
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    write_file(path, format!("{value:#}\n"))
}

pub fn write_csv(path: &Path, manifest: &Value, rows: &[CsvRow]) -> Result<(), CliError> {
    let mut text = format!("# manifest: {manifest}\nn,a,value,stderr\n");
    for row in rows {
        let n = row.n.map(|v| v.to_string()).unwrap_or_default();
        let a = row.a.map(|v| v.to_string()).unwrap_or_default();
        let stderr = row.stderr.map(|v| v.to_string()).unwrap_or_default();
        writeln!(text, "{n},{a},{},{stderr}", row.value).expect("writing to a string");
    }
    write_file(path, text)
}

fn write_file(path: &Path, text: String) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}
