//! `summary.json`: the headline numbers of one analysis.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::analyze::{Analysis, Metric};

pub const SUMMARY_FILE: &str = "summary.json";

/// Significance level used only for the headline count of significant tests.
pub const ALPHA: f64 = 0.05;

fn round6(x: f64) -> f64 {
    let r = (x * 1e6).round() / 1e6;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(round6(v)))
}

pub fn summary(a: &Analysis) -> Value {
    let changed_pairs: usize = a.comparisons.iter().map(|(r, _)| r.pair_count()).sum();

    let mut unchanged = BTreeMap::new();
    for ((v, p), rows) in &a.convergence {
        unchanged.insert(format!("{v}/{p}"), rows.iter().map(|r| round6(r.unchanged)).collect::<Vec<_>>());
    }
    let mut adjacent = BTreeMap::new();
    for ((v, p), m) in &a.heatmaps {
        let cells: Vec<Value> = (0..a.iterations).map(|i| opt(m.get(i, i + 1))).collect();
        adjacent.insert(format!("{v}/{p}"), cells);
    }

    let significant = a.stats.iter().filter(|s| s.p_value < ALPHA).count();
    let kw: BTreeMap<String, Value> = a
        .stats
        .iter()
        .filter(|s| s.method == "kruskal-wallis" && s.metric != Metric::Unchanged)
        .map(|s| (format!("{}/{}", s.variant, s.metric.name()), json!({"H": round6(s.statistic), "p": s.p_value})))
        .collect();

    json!({
        "iterations": a.iterations,
        "snippets": a.snippets.len(),
        "trajectories_complete": a.complete.len(),
        "trajectories_incomplete": a.incomplete.len(),
        "comparisons": a.comparisons.len(),
        "changed_pairs": changed_pairs,
        "oscillation_flags": a.oscillations.len(),
        "unchanged_by_transition": unchanged,
        "adjacent_similarity": adjacent,
        "kruskal_wallis": kw,
        "tests": a.stats.len(),
        "significant_tests": significant,
        "alpha": ALPHA,
    })
}

pub fn write_summary(a: &Analysis, out: &Path) -> std::io::Result<PathBuf> {
    let path = out.join(SUMMARY_FILE);
    let mut text = serde_json::to_string_pretty(&summary(a)).expect("json value serializes");
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}
