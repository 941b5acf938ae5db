//! Loading curve reports written by `curve`.

use std::collections::BTreeMap;
use std::path::Path;

use adgreedy::experiments::{read_report_json, Curve, CurvePoint};
use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
struct Row {
    algorithm: String,
    s: usize,
    trials: usize,
    successes: usize,
    rate: f64,
}

/// Curves from a CSV report, in order of first appearance.
pub fn read_curves_csv(path: &Path) -> Result<Vec<Curve>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut order = Vec::new();
    let mut points: BTreeMap<String, Vec<CurvePoint>> = BTreeMap::new();
    for row in reader.deserialize() {
        let row: Row = row.with_context(|| format!("reading {}", path.display()))?;
        if !points.contains_key(&row.algorithm) {
            order.push(row.algorithm.clone());
        }
        points.entry(row.algorithm).or_default().push(CurvePoint {
            s: row.s,
            trials: row.trials,
            successes: row.successes,
            rate: row.rate,
            solver_failures: 0,
        });
    }
    Ok(order
        .into_iter()
        .map(|tag| {
            let pts = points.remove(&tag).unwrap_or_default();
            Curve::new(tag, pts)
        })
        .collect())
}

/// Reads a JSON report when the file starts with `{`, a CSV report otherwise.
pub fn read_curves(path: &Path) -> Result<Vec<Curve>> {
    let head = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let first = head.iter().find(|b| !b.is_ascii_whitespace());
    if first == Some(&b'{') {
        Ok(read_report_json(path)?.curves)
    } else {
        read_curves_csv(path)
    }
}
