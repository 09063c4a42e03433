//! JSON building blocks for run reports.
//!
//! Numbers are written in shortest round-trip form, so every `f64` is
//! recovered exactly; infinities and NaN become the strings `"inf"`,
//! `"-inf"` and `"nan"`.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use tvgap_core::LtvOperator;

use crate::system::matrix_to_rows;

pub const TOOL_VERSION: &str = concat!("tvgap ", env!("CARGO_PKG_VERSION"));

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Inverse of [`num`].
pub fn parse_num(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

/// An operator in the `block_matrix` payload layout.
pub fn operator(op: &LtvOperator) -> Value {
    json!({
        "input_dims": op.domain().dims(),
        "output_dims": op.codomain().dims(),
        "matrix": matrix_to_rows(op.matrix())
            .into_iter()
            .map(|r| nums(&r))
            .collect::<Vec<_>>(),
    })
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Named residual compared against a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl Certificate {
    pub fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Certificate { name: name.into(), residual, tol }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tol
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "residual": num(self.residual),
            "tol": num(self.tol),
            "pass": self.passed(),
        })
    }
}

/// Top-level report document.
pub fn document(input_digest: String, results: Map<String, Value>) -> Value {
    json!({
        "version": TOOL_VERSION,
        "input_digest": input_digest,
        "results": Value::Object(results),
    })
}

pub fn to_text(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("reports contain only finite numbers and strings");
    s.push('\n');
    s
}
