//! Output helpers. Every float is written with 17 significant digits,
//! in CSV cells and JSON numbers alike.

use std::io::{self, Write};

use serde_json::Value;

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// Compact JSON with floats at full width; integers stay integers.
pub fn json_string(v: &Value) -> String {
    let mut s = String::new();
    emit(v, &mut s);
    s
}

fn emit(v: &Value, out: &mut String) {
    match v {
        Value::Number(n) if n.is_f64() => match n.as_f64() {
            Some(x) if x.is_finite() => out.push_str(&float(x)),
            _ => out.push_str("null"),
        },
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                emit(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                emit(item, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

pub fn write_json(w: &mut impl Write, v: &Value) -> io::Result<()> {
    writeln!(w, "{}", json_string(v))
}
