//! Bit-stable report output.
//!
//! JSON keys keep their declaration order and every float is written with
//! 17 significant digits (`{:.16e}`), which round-trips any `f64`.
//! Non-finite floats become `null`.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::lab::GrowthRow;
use crate::Result;

/// A float as written in reports.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// `value` as pretty JSON with fixed-width floats, newline-terminated.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) if !n.is_f64() => {
                let _ = write!(out, "{u}");
            }
            (_, Some(i)) if !n.is_f64() => {
                let _ = write!(out, "{i}");
            }
            _ => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short arrays of scalars stay on one line ([re, im] pairs, points)
            if items.len() <= 4 && items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, level);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, x, level + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, level + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}

pub const GROWTH_CSV_HEADER: &str = "n,degree,k,ratio,phi";

/// The growth table as CSV with header [`GROWTH_CSV_HEADER`].
pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut out = String::from(GROWTH_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.degree,
            format_float(r.k),
            format_float(r.ratio),
            format_float(r.phi)
        );
    }
    out
}

/// Writes `content` to `dest`, or to stdout when `dest` is `None`.
pub fn emit(content: &str, dest: Option<&Path>) -> Result<()> {
    match dest {
        Some(path) => std::fs::write(path, content)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 2.0, 1.0 / 3.0, 6.02214076e23, -5e-324, f64::MAX] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_float(f64::NEG_INFINITY), "null");
    }

    #[test]
    fn keys_keep_insertion_order() {
        let v = json!({"value": 2.0, "argmax": [], "grid_size": 100, "a": null});
        let s = to_json_string(&v).unwrap();
        let pos: Vec<usize> = ["value", "argmax", "grid_size", "\"a\""].iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{s}");
        assert!(s.contains("2.0000000000000000e0"));
        assert!(s.contains("\"grid_size\": 100"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["value"], 2.0);
    }

    #[test]
    fn csv_header_and_rows() {
        let rows = [GrowthRow { n: 1, degree: 3, k: 2.5, ratio: 1.25, phi: 0.5 }];
        let csv = growth_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,degree,k,ratio,phi"));
        assert_eq!(lines.next(), Some("1,3,2.5000000000000000e0,1.2500000000000000e0,5.0000000000000000e-1"));
    }
}
