//! JSON helpers: complex numbers as `{re, im}`, floats rounded to 12
//! significant digits, object keys sorted.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// Rounds to 12 significant digits so that output is byte-stable.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Serialize)]
struct C {
    re: f64,
    im: f64,
}

fn c(z: &Complex64) -> C {
    C {
        re: round12(z.re),
        im: round12(z.im),
    }
}

pub fn complex(z: Complex64) -> Value {
    serde_json::json!({ "re": round12(z.re), "im": round12(z.im) })
}

pub fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    c(z).serialize(s)
}

pub fn ser_complex_vec<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&c(z))?;
    }
    seq.end()
}

pub fn ser_complex_dvec<S: Serializer>(v: &DVector<Complex64>, s: S) -> Result<S::Ok, S::Error> {
    ser_complex_vec(v.as_slice(), s)
}

/// Recursively rounds every float in a JSON value.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(_), _, _) | (_, Some(_), _) => Value::Number(n),
            (_, _, Some(f)) => serde_json::Number::from_f64(round12(f)).map(Value::Number).unwrap_or(Value::Null),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Deterministic rendering: sorted keys, rounded floats.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    serde_json::to_string(&normalize(v)).expect("value renders")
}

pub fn to_string_pretty<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    serde_json::to_string_pretty(&normalize(v)).expect("value renders")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_stable() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(-0.0), 0.0);
        let a = to_string(&serde_json::json!({"b": 1.0/3.0, "a": [complex(Complex64::new(1.0, -2.0))]}));
        assert_eq!(a, r#"{"a":[{"im":-2.0,"re":1.0}],"b":0.333333333333}"#);
    }
}
