//! Canonical JSON: keys sorted, integers as decimal strings (apart from the
//! schema version), no insignificant whitespace. Documents are wrapped as
//! `{"v": 1, "kind": ..., ...}`.

use serde_json::{json, Map, Value};

use crate::element::Element;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u64 = 1;

/// Serializes with object keys in sorted order regardless of how the value
/// was built.
pub fn canonical(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&m[k], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(x, out);
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn element_kind(e: &Element) -> &'static str {
    match e {
        Element::Interval(_) => "plmap",
        Element::Circle(_) => "circle",
        Element::Lift(_) => "lift",
    }
}

pub fn envelope(kind: &str, key: &str, payload: Value) -> Value {
    let mut m = Map::new();
    m.insert("v".into(), json!(SCHEMA_VERSION));
    m.insert("kind".into(), json!(kind));
    m.insert(key.into(), payload);
    Value::Object(m)
}

pub fn element_document(e: &Element) -> Value {
    envelope(element_kind(e), "element", e.to_json())
}

/// Parses JSON text, mapping malformed or empty input to a schema error.
pub fn parse_json(text: &str) -> Result<Value> {
    if text.trim().is_empty() {
        return Err(Error::Schema("empty input".into()));
    }
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

/// Checks the version and returns `(kind, document)`.
pub fn open_envelope(doc: &Value) -> Result<(&str, &Map<String, Value>)> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Schema("document must be a JSON object".into()))?;
    match obj.get("v") {
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) if v.as_str() == Some("1") => {}
        Some(v) => return Err(Error::Schema(format!("unsupported schema version {v}"))),
        None => return Err(Error::Schema("missing schema version \"v\"".into())),
    }
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Schema("missing \"kind\"".into()))?;
    Ok((kind, obj))
}

pub fn element_from_document(doc: &Value) -> Result<Element> {
    let (kind, obj) = open_envelope(doc)?;
    if !["plmap", "circle", "lift"].contains(&kind) {
        return Err(Error::Schema(format!("expected an element, found kind {kind:?}")));
    }
    if obj.len() != 3 {
        return Err(Error::Schema("element documents have exactly v, kind, element".into()));
    }
    let payload = obj
        .get("element")
        .ok_or_else(|| Error::Schema("missing \"element\"".into()))?;
    let e = Element::from_json(payload)?;
    if element_kind(&e) != kind {
        return Err(Error::Schema(format!(
            "kind {kind:?} does not match the payload ({})",
            element_kind(&e)
        )));
    }
    Ok(e)
}

pub fn serialize_element(e: &Element) -> String {
    canonical(&element_document(e))
}

pub fn deserialize_element(text: &str) -> Result<Element> {
    element_from_document(&parse_json(text)?)
}
