//! Version 0 of every variant, copied into each prompt directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use reftrace_core::prompts::PromptId;
use reftrace_core::variantgen::{make_meaningless, strip_comments, VariantId};

use crate::sample::ManifestRow;
use crate::store::{InstanceKey, SnapshotStore, StoreError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantFailure {
    pub snippet: String,
    pub path: String,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct VariantsReport {
    pub snippets: Vec<String>,
    pub written: usize,
    pub failures: Vec<VariantFailure>,
}

/// Snippet id per accepted path: the file stem, with `_2`, `_3`, ... for
/// later files sharing a stem.
pub fn snippet_ids(paths: &[&str]) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    paths
        .iter()
        .map(|p| {
            let file = p.rsplit('/').next().unwrap_or(p);
            let stem = file.strip_suffix(".java").unwrap_or(file).to_string();
            let n = seen.entry(stem.clone()).or_default();
            *n += 1;
            if *n == 1 {
                stem
            } else {
                format!("{stem}_{n}")
            }
        })
        .collect()
}

pub fn generate(
    corpus_dir: &Path,
    rows: &[ManifestRow],
    prompts: &[PromptId],
    store: &SnapshotStore,
) -> Result<VariantsReport, StoreError> {
    let accepted: Vec<&ManifestRow> = rows.iter().filter(|r| r.accepted).collect();
    let ids = snippet_ids(&accepted.iter().map(|r| r.path.as_str()).collect::<Vec<_>>());
    let mut report = VariantsReport::default();
    for (row, id) in accepted.iter().zip(ids) {
        let fail = |message: String| VariantFailure { snippet: id.clone(), path: row.path.clone(), message };
        let path = corpus_dir.join(&row.path);
        let original = match fs::read(&path) {
            Ok(b) => String::from_utf8_lossy(&b).into_owned(),
            Err(e) => {
                report.failures.push(fail(format!("{}: {e}", path.display())));
                continue;
            }
        };
        let (meaningless, table) = match make_meaningless(&original) {
            Ok(v) => v,
            Err(e) => {
                log::warn!("{id}: {e}");
                report.failures.push(fail(e.to_string()));
                continue;
            }
        };
        let no_comment = strip_comments(&original);
        for &prompt in prompts {
            for (variant, text) in [
                (VariantId::Original, &original),
                (VariantId::Meaningless, &meaningless),
                (VariantId::NoComment, &no_comment),
            ] {
                store.write(&InstanceKey::new(&id, variant, prompt, 0), text)?;
                report.written += 1;
            }
            store.write_rename_table(&id, prompt, &table)?;
        }
        report.snippets.push(id);
    }
    Ok(report)
}
