//! Fixed-precision decimal rendering shared by the JSON and CSV writers.
//!
//! Finite values carry 17 significant digits, so every `f64` round-trips.
//! Magnitudes in `[1e-5, 1e16)` use positional notation, the rest exponent
//! notation. Non-finite values render as `null` in JSON and as `inf`, `-inf`
//! or `nan` in CSV.

use serde::Serializer;
use serde_json::value::RawValue;

const SIG_DIGITS: i32 = 17;

/// Decimal text for a finite value; `None` for infinities and NaN.
pub fn decimal(x: f64) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some("0.0".to_string());
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        let exp = a.log10().floor() as i32;
        let decimals = (SIG_DIGITS - 1 - exp).max(1) as usize;
        Some(format!("{x:.decimals$}"))
    } else {
        Some(format!("{:.*e}", (SIG_DIGITS - 1) as usize, x))
    }
}

/// CSV cell text.
pub fn csv_cell(x: f64) -> String {
    decimal(x).unwrap_or_else(|| {
        if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    })
}

/// JSON number text (`null` for non-finite values).
pub fn json_number(x: f64) -> String {
    decimal(x).unwrap_or_else(|| "null".into())
}

/// Raw JSON token for `x`, for embedding into `serde_json` output.
pub fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(json_number(x)).expect("decimal text is valid JSON")
}

/// `serialize_with` adapter for `f64` fields.
pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&raw(*x), s)
}

/// `serialize_with` adapter for `Vec<f64>` fields.
pub fn serialize_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&raw(x))?;
    }
    seq.end()
}
