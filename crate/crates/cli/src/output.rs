// Copyright 2026 ensemble-gate contributors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::experiments::Output;

pub fn csv(out: &Output) -> String {
    let mut s = out.columns.join(",");
    s.push('\n');
    for row in &out.rows {
        let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
        s += &cells.join(",");
        s.push('\n');
    }
    s
}

/// Shortest round-trip decimal, switching to exponent form for very large or
/// small magnitudes.
pub fn number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn json_document(cfg: &RunConfig, out: &Output) -> String {
    let rows: Vec<Value> = out
        .rows
        .iter()
        .map(|r| Value::Object(out.columns.iter().cloned().zip(r.iter().map(|&x| json!(x))).collect()))
        .collect();
    let mut doc = Map::new();
    doc.insert("experiment".into(), json!(cfg.experiment.name()));
    doc.insert("preset".into(), json!(cfg.preset));
    doc.insert("seed".into(), json!(cfg.seed));
    doc.insert("params".into(), cfg.params_json());
    doc.insert("columns".into(), json!(out.columns));
    doc.insert("rows".into(), Value::Array(rows));
    for (k, v) in &out.extra {
        doc.insert(k.clone(), v.clone());
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serialisable");
    s.push('\n');
    s
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
