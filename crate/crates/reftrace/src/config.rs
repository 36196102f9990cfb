//! Run configuration: a flat `key = value` file with `#` comments, where
//! every key can be overridden from the command line as `--key=value`.
//!
//! ```text
//! # reftrace.conf
//! corpus-dir = corpus
//! store-dir  = store
//! output-dir = out
//! iterations = 5
//! prompts    = General,Meaning,Comments
//! provider   = live-http
//! model      = gpt-4o
//! endpoint   = https://api.openai.com/v1/chat/completions
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use reftrace_core::prompts::PromptId;
use reftrace_core::trajectory::{CellMode, DEFAULT_ITERATIONS};

/// Every key the configuration understands, in documentation order.
pub const KEYS: &[&str] = &[
    "corpus-dir",
    "store-dir",
    "output-dir",
    "manifest",
    "iterations",
    "prompts",
    "provider",
    "model",
    "temperature",
    "endpoint",
    "script",
    "record-script",
    "max-retries",
    "retry-delay",
    "timeout",
    "jobs",
    "matrix-mode",
    "bonferroni",
];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {value}")]
    Invalid { key: String, value: String },
    #[error("`{0}` is required")]
    Missing(&'static str),
}

/// Parse the key-value text. Later duplicates win.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        if !KEYS.contains(&k) {
            return Err(ConfigError::UnknownKey(k.to_string()));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderKind {
    LiveHttp,
    Replay,
}

impl ProviderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProviderKind::LiveHttp => "live-http",
            ProviderKind::Replay => "replay",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub model: String,
    pub temperature: f64,
    pub endpoint: Option<String>,
    pub script: Option<PathBuf>,
    /// Where a live run records its responses as a replay script.
    pub record_script: Option<PathBuf>,
    pub max_retries: u32,
    pub retry_delay: Duration,
    pub timeout: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus_dir: Option<PathBuf>,
    pub store_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub iterations: u32,
    pub prompts: Vec<PromptId>,
    pub provider: ProviderConfig,
    pub jobs: usize,
    pub matrix_mode: CellMode,
    pub bonferroni: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_map(&BTreeMap::new()).expect("defaults are valid")
    }
}

fn invalid(key: &str, value: &str) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), value: value.to_string() }
}

fn number<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, ConfigError> {
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| invalid(key, v)),
    }
}

fn seconds(map: &BTreeMap<String, String>, key: &str, default: f64) -> Result<Duration, ConfigError> {
    let s: f64 = number(map, key, default)?;
    Duration::try_from_secs_f64(s).map_err(|_| invalid(key, &s.to_string()))
}

impl RunConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let path = |k: &str| map.get(k).filter(|v| !v.is_empty()).map(PathBuf::from);

        let iterations: u32 = number(map, "iterations", DEFAULT_ITERATIONS)?;
        if iterations == 0 {
            return Err(invalid("iterations", "0"));
        }
        let prompts = match map.get("prompts") {
            None => PromptId::ALL.to_vec(),
            Some(v) => {
                let mut ps = Vec::new();
                for p in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let id = PromptId::parse(p).ok_or_else(|| invalid("prompts", p))?;
                    if !ps.contains(&id) {
                        ps.push(id);
                    }
                }
                ps.sort();
                ps
            }
        };
        if prompts.is_empty() {
            return Err(invalid("prompts", ""));
        }
        let kind = match map.get("provider").map(String::as_str) {
            None | Some("replay") => ProviderKind::Replay,
            Some("live-http") => ProviderKind::LiveHttp,
            Some(other) => return Err(invalid("provider", other)),
        };
        let temperature: f64 = number(map, "temperature", 0.0)?;
        if !(0.0..=2.0).contains(&temperature) {
            return Err(invalid("temperature", &temperature.to_string()));
        }
        let jobs: usize = number(map, "jobs", 4)?;
        if jobs == 0 {
            return Err(invalid("jobs", "0"));
        }
        let matrix_mode = match map.get("matrix-mode").map(String::as_str) {
            None | Some("changed-only") => CellMode::ChangedOnly,
            Some("identity-as-one") => CellMode::IdentityAsOne,
            Some(other) => return Err(invalid("matrix-mode", other)),
        };
        let bonferroni = match map.get("bonferroni").map(String::as_str) {
            None | Some("false") | Some("off") => false,
            Some("true") | Some("on") => true,
            Some(other) => return Err(invalid("bonferroni", other)),
        };

        Ok(RunConfig {
            corpus_dir: path("corpus-dir"),
            store_dir: path("store-dir"),
            output_dir: path("output-dir"),
            manifest: path("manifest"),
            iterations,
            prompts,
            provider: ProviderConfig {
                kind,
                model: map.get("model").cloned().unwrap_or_else(|| "replay".to_string()),
                temperature,
                endpoint: map.get("endpoint").cloned(),
                script: path("script"),
                record_script: path("record-script"),
                max_retries: number(map, "max-retries", 3)?,
                retry_delay: seconds(map, "retry-delay", 2.0)?,
                timeout: seconds(map, "timeout", 120.0)?,
            },
            jobs,
            matrix_mode,
            bonferroni,
        })
    }
}
