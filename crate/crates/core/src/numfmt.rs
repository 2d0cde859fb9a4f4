//! Fixed-precision float serialization.
//!
//! Every float written by this crate goes out with exactly six decimal
//! places so that output files are byte-stable across runs and platforms.

use serde::Serializer;
use serde_json::value::RawValue;

/// Decimal places used for every serialized float.
pub const FLOAT_DECIMALS: usize = 6;

/// Formats `value` with [`FLOAT_DECIMALS`] places. Negative zero prints as zero.
pub fn fixed(value: f64) -> String {
    let s = format!("{:.*}", FLOAT_DECIMALS, value);
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn raw<S: Serializer>(text: String, serializer: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&raw, serializer)
}

/// `serialize_with` helper for a single `f64`. Non-finite values become `null`.
pub fn ser_f64<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        raw(fixed(*value), serializer)
    } else {
        serializer.serialize_none()
    }
}

pub fn ser_opt_f64<S: Serializer>(value: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => ser_f64(v, serializer),
        None => serializer.serialize_none(),
    }
}

pub fn ser_f64_slice<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
    let body: Vec<String> = values.iter().map(|v| if v.is_finite() { fixed(*v) } else { "null".to_string() }).collect();
    raw(format!("[{}]", body.join(",")), serializer)
}

pub fn ser_f64_map<S, K>(values: &std::collections::BTreeMap<K, f64>, serializer: S) -> Result<S::Ok, S::Error>
where
    S: Serializer,
    K: serde::Serialize + Ord,
{
    use serde::ser::SerializeMap;
    let mut map = serializer.serialize_map(Some(values.len()))?;
    for (k, v) in values {
        map.serialize_key(k)?;
        map.serialize_value(&Fixed(*v))?;
    }
    map.end()
}

/// Wrapper that serializes its float at fixed precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed(pub f64);

impl serde::Serialize for Fixed {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ser_f64(&self.0, serializer)
    }
}

/// Pretty-prints `value` as JSON with a trailing newline.
pub fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
