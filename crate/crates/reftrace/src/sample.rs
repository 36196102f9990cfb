//! Corpus scan: metrics and sampling verdict for every candidate file,
//! written as `corpus_manifest.csv`.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use reftrace_core::corpus::{check_sampling_criteria, compute_absolute_metrics, is_test_file, AbsoluteMetrics};
use walkdir::WalkDir;

use crate::output::csv_writer;

pub const MANIFEST_FILE: &str = "corpus_manifest.csv";
pub const MANIFEST_HEADER: [&str; 9] =
    ["path", "total", "code", "comment", "inline", "empty", "methods", "accepted", "reasons"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRow {
    /// `/`-separated, relative to the corpus directory.
    pub path: String,
    pub metrics: AbsoluteMetrics,
    pub accepted: bool,
    pub reasons: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error("corpus directory {0} does not exist")]
    MissingDir(PathBuf),
    #[error("no candidate .java files under {0}")]
    NoCandidates(PathBuf),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Walk(#[from] walkdir::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("manifest: {0}")]
    Manifest(String),
}

/// Non-test `.java` files under `dir`, relative and sorted by path.
pub fn candidates(dir: &Path) -> Result<Vec<String>, SampleError> {
    if !dir.is_dir() {
        return Err(SampleError::MissingDir(dir.to_path_buf()));
    }
    let mut out = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry?;
        if !entry.file_type().is_file() || entry.path().extension().is_none_or(|e| e != "java") {
            continue;
        }
        let rel = entry.path().strip_prefix(dir).expect("walk stays under root");
        let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        if !is_test_file(&rel) {
            out.push(rel);
        }
    }
    out.sort();
    Ok(out)
}

pub fn scan(dir: &Path) -> Result<Vec<ManifestRow>, SampleError> {
    let paths = candidates(dir)?;
    if paths.is_empty() {
        return Err(SampleError::NoCandidates(dir.to_path_buf()));
    }
    paths
        .par_iter()
        .map(|rel| {
            let bytes = fs::read(dir.join(rel))?;
            let metrics = compute_absolute_metrics(&String::from_utf8_lossy(&bytes));
            let report = check_sampling_criteria(&metrics);
            Ok(ManifestRow { path: rel.clone(), metrics, accepted: report.accepted, reasons: report.reasons })
        })
        .collect()
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<(), SampleError> {
    let mut w = csv_writer(path)?;
    w.write_record(MANIFEST_HEADER)?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([
            r.path.clone(),
            m.total_lines.to_string(),
            m.code_lines.to_string(),
            m.comment_lines.to_string(),
            m.inline_comments.to_string(),
            m.empty_lines.to_string(),
            m.methods.to_string(),
            r.accepted.to_string(),
            r.reasons.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>, SampleError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(MANIFEST_HEADER) {
        return Err(SampleError::Manifest(format!("{}: unexpected header", path.display())));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<usize, SampleError> {
            rec[i].parse().map_err(|_| SampleError::Manifest(format!("bad number `{}` in {}", &rec[i], &rec[0])))
        };
        out.push(ManifestRow {
            path: rec[0].to_string(),
            metrics: AbsoluteMetrics {
                total_lines: num(1)?,
                code_lines: num(2)?,
                comment_lines: num(3)?,
                inline_comments: num(4)?,
                empty_lines: num(5)?,
                methods: num(6)?,
            },
            accepted: &rec[7] == "true",
            reasons: rec[8].split(';').filter(|s| !s.is_empty()).map(String::from).collect(),
        });
    }
    Ok(out)
}
