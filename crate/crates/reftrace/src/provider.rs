//! Chat-completion providers: a live HTTP client and a replay script keyed
//! by request digest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ProviderConfig, ProviderKind};

/// Environment variable holding the live provider's bearer token.
pub const API_KEY_ENV: &str = "REFTRACE_API_KEY";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<Message>,
}

impl ChatRequest {
    /// Exact bytes sent over the wire.
    pub fn body(&self) -> String {
        serde_json::to_string(self).expect("request serializes")
    }

    /// Content of the single user message.
    pub fn user_content(&self) -> &str {
        self.messages.iter().find(|m| m.role == "user").map_or("", |m| m.content.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChatResponse {
    pub text: String,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ProviderError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("replay script has no response for request {digest}")]
    MissingScript { digest: String },
    #[error("{0}")]
    Setup(String),
}

impl ProviderError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, ProviderError::Transport(_))
    }
}

pub trait Provider: Send + Sync {
    fn kind(&self) -> ProviderKind;
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError>;
}

impl<P: Provider + ?Sized> Provider for Box<P> {
    fn kind(&self) -> ProviderKind {
        (**self).kind()
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        (**self).complete(request)
    }
}

/// Hex SHA-256 of the user message content. The model name and temperature
/// are run-level settings recorded in `meta.json`, so a script recorded
/// against one model replays under any model name.
pub fn request_digest(request: &ChatRequest) -> String {
    content_digest(request.user_content())
}

pub fn content_digest(content: &str) -> String {
    hex::encode(Sha256::digest(content.as_bytes()))
}

/// Plays back responses from a JSON object `{digest: response text}`.
#[derive(Debug, Default)]
pub struct ReplayProvider {
    script: BTreeMap<String, String>,
    calls: AtomicUsize,
}

impl ReplayProvider {
    pub fn new(script: BTreeMap<String, String>) -> Self {
        ReplayProvider { script, calls: AtomicUsize::new(0) }
    }

    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        let text = fs::read_to_string(path).map_err(|e| ProviderError::Setup(format!("{}: {e}", path.display())))?;
        let script =
            serde_json::from_str(&text).map_err(|e| ProviderError::Setup(format!("{}: {e}", path.display())))?;
        Ok(ReplayProvider::new(script))
    }

    /// Requests answered or refused so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Provider for ReplayProvider {
    fn kind(&self) -> ProviderKind {
        ProviderKind::Replay
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let digest = request_digest(request);
        match self.script.get(&digest) {
            Some(text) => Ok(ChatResponse { text: text.clone(), ..Default::default() }),
            None => Err(ProviderError::MissingScript { digest }),
        }
    }
}

/// OpenAI-style `chat/completions` client.
pub struct LiveProvider {
    endpoint: String,
    api_key: String,
    agent: ureq::Agent,
}

impl LiveProvider {
    pub fn new(endpoint: &str, api_key: String, timeout: Duration) -> Self {
        let agent =
            ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().new_agent();
        LiveProvider { endpoint: endpoint.to_string(), api_key, agent }
    }
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: Message,
}

#[derive(Deserialize)]
struct WireUsage {
    prompt_tokens: Option<u64>,
    completion_tokens: Option<u64>,
}

/// Pull the first choice's text and token usage out of a response body.
pub fn parse_wire_response(body: &str) -> Result<ChatResponse, ProviderError> {
    let wire: WireResponse = serde_json::from_str(body).map_err(|e| ProviderError::Malformed(e.to_string()))?;
    let choice = wire.choices.into_iter().next().ok_or_else(|| ProviderError::Malformed("no choices".into()))?;
    Ok(ChatResponse {
        text: choice.message.content,
        prompt_tokens: wire.usage.as_ref().and_then(|u| u.prompt_tokens),
        completion_tokens: wire.usage.as_ref().and_then(|u| u.completion_tokens),
    })
}

impl Provider for LiveProvider {
    fn kind(&self) -> ProviderKind {
        ProviderKind::LiveHttp
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let mut resp = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .header("Content-Type", "application/json")
            .send(request.body())
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(|e| ProviderError::Transport(e.to_string()))?;
        match status {
            200..=299 => parse_wire_response(&body),
            // Rate limits and server errors are worth another attempt.
            408 | 429 | 500..=599 => Err(ProviderError::Transport(format!("HTTP {status}"))),
            _ => {
                Err(ProviderError::Malformed(format!("HTTP {status}: {}", body.chars().take(200).collect::<String>())))
            }
        }
    }
}

/// Wraps a provider and keeps every successful response, so a live run can
/// be replayed later.
pub struct RecordingProvider<P> {
    inner: P,
    recorded: Mutex<BTreeMap<String, String>>,
}

impl<P: Provider> RecordingProvider<P> {
    pub fn new(inner: P) -> Self {
        RecordingProvider { inner, recorded: Mutex::new(BTreeMap::new()) }
    }

    pub fn script(&self) -> BTreeMap<String, String> {
        self.recorded.lock().expect("recording lock").clone()
    }

    /// Merge into any script already at `path`.
    pub fn save(&self, path: &Path) -> Result<(), ProviderError> {
        let mut all: BTreeMap<String, String> = match fs::read_to_string(path) {
            Ok(text) => {
                serde_json::from_str(&text).map_err(|e| ProviderError::Setup(format!("{}: {e}", path.display())))?
            }
            Err(_) => BTreeMap::new(),
        };
        all.extend(self.script());
        let mut json = serde_json::to_string_pretty(&all).expect("string map serializes");
        json.push('\n');
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| ProviderError::Setup(format!("{}: {e}", dir.display())))?;
        }
        fs::write(path, json).map_err(|e| ProviderError::Setup(format!("{}: {e}", path.display())))
    }
}

impl<P: Provider> Provider for RecordingProvider<P> {
    fn kind(&self) -> ProviderKind {
        self.inner.kind()
    }

    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let resp = self.inner.complete(request)?;
        self.recorded.lock().expect("recording lock").insert(request_digest(request), resp.text.clone());
        Ok(resp)
    }
}

/// Bounded retries with exponential backoff for retryable errors.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
}

impl RetryPolicy {
    pub fn delay(&self, failed_attempt: u32) -> Duration {
        self.base_delay.saturating_mul(1 << failed_attempt.saturating_sub(1).min(16))
    }

    /// Returns the final outcome and the number of attempts made.
    pub fn run<T>(
        &self,
        mut op: impl FnMut() -> Result<T, ProviderError>,
        mut sleep: impl FnMut(Duration),
    ) -> (Result<T, ProviderError>, u32) {
        let attempts = self.attempts.max(1);
        let mut n = 0;
        loop {
            n += 1;
            match op() {
                Err(e) if e.is_retryable() && n < attempts => sleep(self.delay(n)),
                other => return (other, n),
            }
        }
    }
}

/// Builds the provider a config asks for. The second value is the script
/// path a live run should record to, if any.
pub fn from_config(cfg: &ProviderConfig) -> Result<(Box<dyn Provider>, Option<PathBuf>), ProviderError> {
    match cfg.kind {
        ProviderKind::Replay => {
            let path =
                cfg.script.as_ref().ok_or_else(|| ProviderError::Setup("replay provider needs `script`".into()))?;
            Ok((Box::new(ReplayProvider::load(path)?), None))
        }
        ProviderKind::LiveHttp => {
            let endpoint = cfg
                .endpoint
                .as_ref()
                .ok_or_else(|| ProviderError::Setup("live-http provider needs `endpoint`".into()))?;
            let key =
                std::env::var(API_KEY_ENV).map_err(|_| ProviderError::Setup(format!("{API_KEY_ENV} is not set")))?;
            Ok((Box::new(LiveProvider::new(endpoint, key, cfg.timeout)), cfg.record_script.clone()))
        }
    }
}
