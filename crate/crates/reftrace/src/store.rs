//! On-disk snapshot store:
//! `<root>/<snippet>/<variant>/<prompt>/v<k>.java`, plus `meta.json` and,
//! beside Meaningless v0, `rename_table.json`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use reftrace_core::code_model::DeclKind;
use reftrace_core::prompts::PromptId;
use reftrace_core::variantgen::{RenameTable, VariantId};
use serde::{Deserialize, Serialize};

/// One concrete source text in the store.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstanceKey {
    pub snippet: String,
    pub variant: VariantId,
    pub prompt: PromptId,
    pub version: u32,
}

impl InstanceKey {
    pub fn new(snippet: &str, variant: VariantId, prompt: PromptId, version: u32) -> Self {
        InstanceKey { snippet: snippet.to_string(), variant, prompt, version }
    }

    pub fn next(&self) -> InstanceKey {
        InstanceKey { version: self.version + 1, ..self.clone() }
    }
}

impl fmt::Display for InstanceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}/v{}", self.snippet, self.variant, self.prompt, self.version)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("missing snapshot {0}")]
    Missing(InstanceKey),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

/// One provider request as recorded in `meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    /// Version produced by this request.
    pub version: u32,
    pub digest: String,
    pub attempts: u32,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prompt_tokens: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub completion_tokens: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub finished_unix: Option<u64>,
}

/// Per-trajectory run metadata.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub provider: String,
    pub model: String,
    pub temperature: f64,
    /// Requests carry only the prompt and the source, never the file name.
    pub file_name_included: bool,
    pub requests: Vec<RequestRecord>,
}

#[derive(Debug, Clone)]
pub struct SnapshotStore {
    root: PathBuf,
}

impl SnapshotStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        SnapshotStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn instance_dir(&self, snippet: &str, variant: VariantId, prompt: PromptId) -> PathBuf {
        self.root.join(snippet).join(variant.as_str()).join(prompt.as_str())
    }

    pub fn path(&self, key: &InstanceKey) -> PathBuf {
        self.instance_dir(&key.snippet, key.variant, key.prompt).join(format!("v{}.java", key.version))
    }

    pub fn exists(&self, key: &InstanceKey) -> bool {
        self.path(key).is_file()
    }

    pub fn read(&self, key: &InstanceKey) -> Result<String, StoreError> {
        let path = self.path(key);
        match fs::read_to_string(&path) {
            Ok(s) => Ok(s),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(StoreError::Missing(key.clone())),
            Err(e) => Err(StoreError::Io { path, source: e }),
        }
    }

    /// Write through a temporary file so a crash never leaves a partial
    /// snapshot that a resumed run would take as done.
    pub fn write(&self, key: &InstanceKey, text: &str) -> Result<(), StoreError> {
        write_atomic(&self.path(key), text.as_bytes())
    }

    /// Snippet directories, sorted.
    pub fn snippets(&self) -> Result<Vec<String>, StoreError> {
        let mut out = Vec::new();
        let entries = match fs::read_dir(&self.root) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(StoreError::Io { path: self.root.clone(), source: e }),
        };
        for entry in entries {
            let entry = entry.map_err(io_err(&self.root))?;
            if entry.path().is_dir() {
                if let Some(name) = entry.file_name().to_str() {
                    out.push(name.to_string());
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Versions present for one trajectory, sorted.
    pub fn versions(&self, snippet: &str, variant: VariantId, prompt: PromptId) -> Vec<u32> {
        let dir = self.instance_dir(snippet, variant, prompt);
        let mut out: Vec<u32> = fs::read_dir(dir)
            .into_iter()
            .flatten()
            .flatten()
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                name.strip_prefix('v')?.strip_suffix(".java")?.parse().ok()
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// `v0..=vK` for one trajectory. Missing snapshots are a hard error
    /// naming the instance.
    pub fn trajectory(
        &self,
        snippet: &str,
        variant: VariantId,
        prompt: PromptId,
        last: u32,
    ) -> Result<Vec<String>, StoreError> {
        (0..=last).map(|k| self.read(&InstanceKey::new(snippet, variant, prompt, k))).collect()
    }

    pub fn meta_path(&self, snippet: &str, variant: VariantId, prompt: PromptId) -> PathBuf {
        self.instance_dir(snippet, variant, prompt).join("meta.json")
    }

    pub fn read_meta(
        &self,
        snippet: &str,
        variant: VariantId,
        prompt: PromptId,
    ) -> Result<Option<RunMeta>, StoreError> {
        let path = self.meta_path(snippet, variant, prompt);
        match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes).map(Some).map_err(|source| StoreError::Json { path, source }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(StoreError::Io { path, source: e }),
        }
    }

    pub fn write_meta(
        &self,
        snippet: &str,
        variant: VariantId,
        prompt: PromptId,
        meta: &RunMeta,
    ) -> Result<(), StoreError> {
        let path = self.meta_path(snippet, variant, prompt);
        let mut json =
            serde_json::to_string_pretty(meta).map_err(|source| StoreError::Json { path: path.clone(), source })?;
        json.push('\n');
        write_atomic(&path, json.as_bytes())
    }

    pub fn write_rename_table(&self, snippet: &str, prompt: PromptId, table: &RenameTable) -> Result<(), StoreError> {
        let path = self.instance_dir(snippet, VariantId::Meaningless, prompt).join("rename_table.json");
        let mut json = rename_table_json(table);
        json.push('\n');
        write_atomic(&path, json.as_bytes())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn decl_kind_name(kind: DeclKind) -> &'static str {
    match kind {
        DeclKind::Class => "class",
        DeclKind::Method => "method",
        DeclKind::Variable => "variable",
        DeclKind::Parameter => "parameter",
    }
}

/// `{"<original>": {"replacement": ..., "kind": ...}}`, keys sorted. A name
/// renamed under two kinds gets `@<kind>` appended to its key.
pub fn rename_table_json(table: &RenameTable) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &table.entries {
        *counts.entry(e.original.as_str()).or_default() += 1;
    }
    let mut obj = serde_json::Map::new();
    for e in &table.entries {
        let kind = decl_kind_name(e.kind);
        let key = if counts[e.original.as_str()] > 1 { format!("{}@{kind}", e.original) } else { e.original.clone() };
        obj.insert(key, serde_json::json!({ "replacement": e.replacement, "kind": kind }));
    }
    serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("string map serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use reftrace_core::variantgen::make_meaningless;

    #[test]
    fn layout_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = SnapshotStore::new(dir.path());
        let key = InstanceKey::new("Adder", VariantId::Meaningless, PromptId::Comments, 3);
        assert!(store.path(&key).ends_with("Adder/Meaningless/Comments/v3.java"));
        assert!(matches!(store.read(&key), Err(StoreError::Missing(_))));
        store.write(&key, "class C1 {}\n").unwrap();
        assert_eq!(store.read(&key).unwrap(), "class C1 {}\n");
        assert_eq!(store.versions("Adder", VariantId::Meaningless, PromptId::Comments), [3]);
        assert_eq!(store.snippets().unwrap(), ["Adder"]);
        let err = store.trajectory("Adder", VariantId::Meaningless, PromptId::Comments, 3).unwrap_err();
        assert_eq!(err.to_string(), "missing snapshot Adder/Meaningless/Comments/v0");
    }

    #[test]
    fn rename_table_format() {
        let (_, table) = make_meaningless("class size { int size() { int size = 1; return size; } }").unwrap();
        let v: serde_json::Value = serde_json::from_str(&rename_table_json(&table)).unwrap();
        assert_eq!(v["size@class"]["replacement"], "C1");
        assert_eq!(v["size@method"]["replacement"], "m1");
        assert_eq!(v["size@variable"]["kind"], "variable");
    }
}
