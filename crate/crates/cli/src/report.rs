//! JSON building blocks. `serde_json::Map` keeps keys sorted, and floats
//! are rounded to 12 significant digits, so identical inputs give
//! identical bytes.

use mtcherry_core::format::round_sig;
use mtcherry_core::{HypothesisFamily, IndexSet};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn float(x: f64) -> Value {
    json!(round_sig(x))
}

pub fn family_digest(family: &HypothesisFamily, raw: &[u8]) -> Value {
    json!({
        "n": family.len(),
        "sha256": hex::encode(Sha256::digest(raw)),
    })
}

pub fn labels(family: &HypothesisFamily, set: &IndexSet) -> Value {
    json!(family.labels_of(set))
}

/// Fields every report carries.
pub fn header(family: &HypothesisFamily, raw: &[u8], test: &str, alpha: f64) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("alpha".into(), float(alpha));
    m.insert("family".into(), family_digest(family, raw));
    m.insert("test".into(), json!(test));
    m.insert("version".into(), json!(TOOL_VERSION));
    m
}

pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}
