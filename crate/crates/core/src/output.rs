//! Deterministic text formatting for CSV and JSON artifacts.
//!
//! All floats are written with 12 significant digits so repeated runs diff
//! cleanly.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Fixed-width scientific notation with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        // collapses -0
        return format!("{:.*e}", SIGNIFICANT_DIGITS - 1, 0.0);
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_float(x).parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| Number::from_f64(round_sig(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(xs) => Value::Array(xs.into_iter().map(round_value).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to 12 significant digits. Object
/// keys come out sorted.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&round_value(v)).map_err(|e| Error::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Serde adapter writing a complex matrix as rows of `[re, im]` pairs.
pub mod complex_matrix {
    use nalgebra::DMatrix;
    use serde::ser::{SerializeSeq, Serializer};

    use crate::quantum::C64;

    pub fn serialize<S: Serializer>(m: &DMatrix<C64>, s: S) -> Result<S::Ok, S::Error> {
        let mut rows = s.serialize_seq(Some(m.nrows()))?;
        for i in 0..m.nrows() {
            let row: Vec<[f64; 2]> = (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}
