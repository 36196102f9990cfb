//! The iterative refactoring loop: one stateless request per step, the
//! extracted code stored as the next version.

use std::time::{Duration, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use reftrace_core::prompts::PromptId;
use reftrace_core::variantgen::VariantId;

use crate::config::ProviderKind;
use crate::provider::{request_digest, ChatRequest, Message, Provider, ProviderError, RetryPolicy};
use crate::store::{InstanceKey, RequestRecord, SnapshotStore, StoreError};

/// Single user message: prompt, blank line, source. No history, no file name.
pub fn build_request(prompt: PromptId, source: &str, model: &str, temperature: f64) -> ChatRequest {
    ChatRequest {
        model: model.to_string(),
        temperature,
        messages: vec![Message { role: "user".into(), content: format!("{}\n\n{}", prompt.text(), source) }],
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("empty refactoring response")]
pub struct EmptyResponse;

/// Code from the first fence tagged `java` or untagged; the whole response
/// when there is no fence at all. Leading and trailing blank lines go,
/// indentation stays.
pub fn extract_code(response: &str) -> Result<String, EmptyResponse> {
    let lines: Vec<&str> = response.lines().collect();
    let mut any_fence = false;
    let mut body: Option<&[&str]> = None;
    let mut i = 0;
    while i < lines.len() {
        let Some(tag) = lines[i].trim_start().strip_prefix("```") else {
            i += 1;
            continue;
        };
        any_fence = true;
        let tag = tag.trim();
        let end = (i + 1..lines.len()).find(|&j| lines[j].trim() == "```").unwrap_or(lines.len());
        if tag.is_empty() || tag.eq_ignore_ascii_case("java") {
            body = Some(&lines[i + 1..end]);
            break;
        }
        i = end + 1;
    }
    let chosen: &[&str] = match body {
        Some(b) => b,
        None if any_fence => &[],
        None => &lines,
    };
    let start = chosen.iter().position(|l| !l.trim().is_empty());
    let end = chosen.iter().rposition(|l| !l.trim().is_empty());
    match (start, end) {
        (Some(s), Some(e)) => Ok(chosen[s..=e].join("\n")),
        _ => Err(EmptyResponse),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FailureKind {
    /// The store is missing an input or cannot be written.
    Data,
    /// The provider failed or answered with nothing usable.
    Provider,
}

/// Why a snapshot does not exist.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Failure {
    pub instance: InstanceKey,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunReport {
    pub requested: usize,
    pub generated: usize,
    pub skipped: usize,
    pub failures: Vec<Failure>,
}

pub struct PipelineSettings {
    pub iterations: u32,
    pub prompts: Vec<PromptId>,
    pub model: String,
    pub temperature: f64,
    pub retry: RetryPolicy,
    pub jobs: usize,
}

type Sleeper<'a> = dyn Fn(Duration) + Sync + 'a;

/// Run every `(snippet, variant, prompt)` trajectory in the store up to
/// `iterations`. Existing snapshots are never requested again; the first
/// failure ends its trajectory.
pub fn run_pipeline(
    store: &SnapshotStore,
    provider: &dyn Provider,
    settings: &PipelineSettings,
    sleep: &Sleeper<'_>,
) -> Result<RunReport, StoreError> {
    let mut tasks = Vec::new();
    for snippet in store.snippets()? {
        for variant in VariantId::ALL {
            for &prompt in &settings.prompts {
                tasks.push((snippet.clone(), variant, prompt));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(settings.jobs.max(1)).build().expect("thread pool");
    let parts: Vec<RunReport> = pool.install(|| {
        tasks.par_iter().map(|(s, v, p)| run_trajectory(store, provider, settings, sleep, s, *v, *p)).collect()
    });
    let mut report = RunReport::default();
    for part in parts {
        report.requested += part.requested;
        report.generated += part.generated;
        report.skipped += part.skipped;
        report.failures.extend(part.failures);
    }
    report.failures.sort();
    Ok(report)
}

fn run_trajectory(
    store: &SnapshotStore,
    provider: &dyn Provider,
    settings: &PipelineSettings,
    sleep: &Sleeper<'_>,
    snippet: &str,
    variant: VariantId,
    prompt: PromptId,
) -> RunReport {
    let mut report = RunReport::default();
    let mut new_requests = Vec::new();
    let fail = |report: &mut RunReport, key: &InstanceKey, kind, message: String| {
        log::warn!("{key}: {message}");
        report.failures.push(Failure { instance: key.clone(), kind, message });
    };

    for k in 0..settings.iterations {
        let source_key = InstanceKey::new(snippet, variant, prompt, k);
        let target = source_key.next();
        if store.exists(&target) {
            report.skipped += 1;
            continue;
        }
        let source = match store.read(&source_key) {
            Ok(s) => s,
            Err(e) => {
                fail(&mut report, &target, FailureKind::Data, e.to_string());
                break;
            }
        };
        let request = build_request(prompt, &source, &settings.model, settings.temperature);
        let digest = request_digest(&request);
        report.requested += 1;
        let (outcome, attempts) = settings.retry.run(|| provider.complete(&request), sleep);
        let mut record = RequestRecord {
            version: target.version,
            digest,
            attempts,
            status: "ok".into(),
            error: None,
            prompt_tokens: None,
            completion_tokens: None,
            finished_unix: None,
        };
        if provider.kind() == ProviderKind::LiveHttp {
            record.finished_unix = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        }
        let code = outcome.and_then(|resp| {
            record.prompt_tokens = resp.prompt_tokens;
            record.completion_tokens = resp.completion_tokens;
            extract_code(&resp.text).map_err(|e| ProviderError::Malformed(e.to_string()))
        });
        match code {
            Ok(mut code) => {
                code.push('\n');
                if let Err(e) = store.write(&target, &code) {
                    fail(&mut report, &target, FailureKind::Data, e.to_string());
                    break;
                }
                report.generated += 1;
                new_requests.push(record);
            }
            Err(e) => {
                record.status = "failed".into();
                record.error = Some(e.to_string());
                new_requests.push(record);
                fail(&mut report, &target, FailureKind::Provider, e.to_string());
                break;
            }
        }
    }

    if !new_requests.is_empty() {
        if let Err(e) = update_meta(store, provider, settings, snippet, variant, prompt, new_requests) {
            let key = InstanceKey::new(snippet, variant, prompt, 0);
            fail(&mut report, &key, FailureKind::Data, e.to_string());
        }
    }
    report
}

fn update_meta(
    store: &SnapshotStore,
    provider: &dyn Provider,
    settings: &PipelineSettings,
    snippet: &str,
    variant: VariantId,
    prompt: PromptId,
    new_requests: Vec<RequestRecord>,
) -> Result<(), StoreError> {
    let mut meta = store.read_meta(snippet, variant, prompt)?.unwrap_or_default();
    meta.provider = provider.kind().as_str().to_string();
    meta.model = settings.model.clone();
    meta.temperature = settings.temperature;
    meta.file_name_included = false;
    for r in new_requests {
        meta.requests.retain(|old| old.version != r.version);
        meta.requests.push(r);
    }
    meta.requests.sort_by_key(|r| r.version);
    store.write_meta(snippet, variant, prompt, &meta)
}

/// Snapshot count a failure-free run produces.
pub fn expected_snapshots(snippets: usize, prompts: usize, iterations: u32) -> usize {
    snippets * VariantId::ALL.len() * prompts * iterations as usize
}
