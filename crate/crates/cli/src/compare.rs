use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

use crate::config::parse_rational;
use crate::error::CliError;
use crate::manifest::RunManifest;

/// `|a − b| / max(1, |a|, |b|)`: relative for large values, absolute near zero.
pub fn difference(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if !(a.is_finite() && b.is_finite()) {
        return f64::INFINITY;
    }
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}

pub struct Comparison {
    pub report: Value,
    pub exceeded: bool,
}

pub fn compare(path_a: &Path, path_b: &Path, tol: Option<f64>) -> Result<Comparison, CliError> {
    let a = RunManifest::load(path_a)?;
    let b = RunManifest::load(path_b)?;
    if a.schema_version != b.schema_version {
        return Err(CliError::Mismatch(format!("schema versions {} and {}", a.schema_version, b.schema_version)));
    }
    if a.conventions != b.conventions {
        return Err(CliError::Mismatch(format!("convention headers differ:\n  {}\n  {}", a.conventions, b.conventions)));
    }
    let (ka, kb) = (a.config.physics_key(), b.config.physics_key());
    if ka != kb {
        let keys: Vec<&String> = ka.as_object().unwrap().iter().filter(|(k, v)| kb.get(k.as_str()) != Some(v)).map(|(k, _)| k).collect();
        return Err(CliError::Mismatch(format!("configs differ in {keys:?}")));
    }
    let tol = tol.unwrap_or(a.config.tolerances.compare);
    let same_grid = a.config.quadrature == b.config.quadrature;
    let dir_a = path_a.parent().unwrap_or(Path::new("."));
    let dir_b = path_b.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for rel in &a.outputs {
        if !b.outputs.contains(rel) {
            skipped.push(json!({ "file": rel, "reason": "only in first run" }));
            continue;
        }
        let (fa, fb) = (dir_a.join(rel), dir_b.join(rel));
        let (ta, tb) = (std::fs::read_to_string(&fa)?, std::fs::read_to_string(&fb)?);
        let diffs = if rel.ends_with(".json") {
            json_quantities(&ta, &tb)?
        } else if !same_grid {
            skipped.push(json!({ "file": rel, "reason": "quadrature differs" }));
            continue;
        } else {
            match csv_columns(&ta, &tb) {
                Some(d) => d,
                None => {
                    skipped.push(json!({ "file": rel, "reason": "table shapes differ" }));
                    continue;
                }
            }
        };
        for (q, d) in diffs {
            entries.push((rel.clone(), q, d));
        }
    }
    for rel in b.outputs.iter().filter(|r| !a.outputs.contains(r)) {
        skipped.push(json!({ "file": rel, "reason": "only in second run" }));
    }
    let worst = entries.iter().max_by(|x, y| x.2.total_cmp(&y.2));
    let max_diff = worst.map(|w| w.2).unwrap_or(0.0);
    let exceeded = max_diff > tol;
    let report = json!({
        "first": path_a.display().to_string(),
        "second": path_b.display().to_string(),
        "tolerance": tol,
        "max_diff": max_diff,
        "worst": worst.map(|w| json!({ "file": w.0, "quantity": w.1 })),
        "exceeded": exceeded,
        "quantities": entries.iter().map(|(f, q, d)| json!({ "file": f, "quantity": q, "diff": d })).collect::<Vec<_>>(),
        "skipped": skipped,
    });
    Ok(Comparison { report, exceeded })
}

fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, Vec<f64>>) {
    match v {
        Value::Number(n) => out.entry(prefix.to_string()).or_default().push(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) if items.iter().all(Value::is_number) => {
            for item in items {
                flatten(prefix, item, out);
            }
        }
        Value::Array(items) => {
            for (i, sub) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), sub, out);
            }
        }
        Value::Object(map) => {
            for (k, sub) in map {
                let name = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&name, sub, out);
            }
        }
        _ => {}
    }
}

/// Largest difference per entry of the `quantities` objects.
fn json_quantities(a: &str, b: &str) -> Result<Vec<(String, f64)>, CliError> {
    let (va, vb): (Value, Value) = (serde_json::from_str(a)?, serde_json::from_str(b)?);
    let (mut fa, mut fb) = (BTreeMap::new(), BTreeMap::new());
    flatten("", va.get("quantities").unwrap_or(&Value::Null), &mut fa);
    flatten("", vb.get("quantities").unwrap_or(&Value::Null), &mut fb);
    let mut out = Vec::new();
    for (name, xs) in &fa {
        let d = match fb.get(name) {
            Some(ys) if ys.len() == xs.len() => xs.iter().zip(ys).map(|(x, y)| difference(*x, *y)).fold(0.0, f64::max),
            _ => f64::INFINITY,
        };
        out.push((name.clone(), d));
    }
    for name in fb.keys().filter(|n| !fa.contains_key(*n)) {
        out.push((name.clone(), f64::INFINITY));
    }
    Ok(out)
}

fn cell(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().or_else(|| parse_rational(s).ok().map(|q| qel_core::exact::to_f64(&q)))
}

/// Largest difference per column, or `None` when the tables do not line up.
fn csv_columns(a: &str, b: &str) -> Option<Vec<(String, f64)>> {
    let rows = |s: &str| -> Vec<Vec<String>> {
        s.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').map(String::from).collect()).collect()
    };
    let (ra, rb) = (rows(a), rows(b));
    if ra.len() != rb.len() || ra.first() != rb.first() {
        return None;
    }
    let header = ra.first()?.clone();
    let mut worst = vec![0.0f64; header.len()];
    for (x, y) in ra.iter().zip(&rb).skip(1) {
        if x.len() != header.len() || y.len() != header.len() {
            return None;
        }
        for (c, (u, v)) in x.iter().zip(y).enumerate() {
            let d = match (cell(u), cell(v)) {
                (Some(p), Some(q)) => difference(p, q),
                _ if u == v => 0.0,
                _ => f64::INFINITY,
            };
            worst[c] = worst[c].max(d);
        }
    }
    Some(header.into_iter().zip(worst).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_is_relative_above_one() {
        assert_eq!(difference(2.0, 2.0), 0.0);
        assert!((difference(100.0, 101.0) - 1.0 / 101.0).abs() < 1e-15);
        assert!((difference(1e-3, 2e-3) - 1e-3).abs() < 1e-15);
        assert_eq!(difference(f64::NAN, 1.0), f64::INFINITY);
    }

    #[test]
    fn csv_tables_line_up_by_header() {
        let a = "# x\nk,v\n1,1.0\n2,3/2\n";
        let b = "# y\nk,v\n1,1.0\n2,1.5\n";
        assert_eq!(csv_columns(a, b).unwrap(), vec![("k".to_string(), 0.0), ("v".to_string(), 0.0)]);
        assert!(csv_columns(a, "k,v\n1,1.0\n").is_none());
    }

    #[test]
    fn json_quantities_flatten_nested_arrays() {
        let a = r#"{"quantities": {"gram": [[1.0, 0.5], [0.5, 2.0]], "df": 0.1}}"#;
        let b = r#"{"quantities": {"gram": [[1.0, 0.5], [0.5, 2.5]], "df": 0.1}}"#;
        let d: BTreeMap<String, f64> = json_quantities(a, b).unwrap().into_iter().collect();
        assert_eq!(d["df"], 0.0);
        assert_eq!(d["gram[0]"], 0.0);
        assert!((d["gram[1]"] - 0.2).abs() < 1e-15);
    }
}
