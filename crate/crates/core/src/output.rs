//! Number formatting and run manifests for CLI output.

use serde::Serialize;
use serde_json::Value;

pub const TOOL_NAME: &str = "curverad";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats like C's `%.15g`.
pub fn fmt_g15(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..15).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let prec = (14 - exp) as usize;
        trim_fraction(&format!("{:.*}", prec, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Provenance attached to every result.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<Value>,
    pub config: Value,
    pub threads: usize,
    pub wall_time_s: f64,
}

/// Result object with the manifest under `"manifest"`.
pub fn with_manifest<T: Serialize>(result: &T, manifest: &RunManifest) -> Value {
    let mut v = serde_json::to_value(result).expect("serializable result");
    let m = serde_json::to_value(manifest).expect("serializable manifest");
    match v {
        Value::Object(ref mut map) => {
            map.insert("manifest".into(), m);
            v
        }
        other => serde_json::json!({ "result": other, "manifest": m }),
    }
}

/// Formats a row of numbers with [`fmt_g15`].
pub fn number_row(values: &[f64]) -> Vec<String> {
    values.iter().map(|&x| fmt_g15(x)).collect()
}

/// CSV text: a `#` manifest line, a header, the rows, then `#` footer lines.
pub fn csv_document(manifest: &RunManifest, header: &[&str], rows: &[Vec<String>], footer: &[String]) -> String {
    let mut out = String::new();
    out.push_str("# manifest: ");
    out.push_str(&serde_json::to_string(manifest).expect("serializable manifest"));
    out.push('\n');
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    for line in footer {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}
