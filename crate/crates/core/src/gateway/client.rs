use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::mock::builtin_reply;

pub const DEFAULT_MODEL: &str = "gemini-1.5-flash-002";
pub const DEFAULT_ENDPOINT: &str = "https://generativelanguage.googleapis.com/v1beta/openai/chat/completions";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Run id, round, phase and role; unique per call within a run.
    pub tag: String,
}

/// What a single provider attempt can fail with.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProviderError {
    #[error("rate limited")]
    RateLimited,
    #[error("server error {0}")]
    Server(u16),
    #[error("network error: {0}")]
    Network(String),
    #[error("authentication rejected: {0}")]
    Auth(String),
    #[error("quota exhausted: {0}")]
    Quota(String),
    #[error("bad response: {0}")]
    BadResponse(String),
}

impl ProviderError {
    fn retryable(&self) -> bool {
        matches!(
            self,
            ProviderError::RateLimited | ProviderError::Server(_) | ProviderError::Network(_)
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GatewayError {
    #[error("transport failed after {attempts} attempts: {last}")]
    Transport { attempts: u32, last: String },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("quota exhausted: {0}")]
    Quota(String),
    #[error("provider returned an unusable response: {0}")]
    BadResponse(String),
    #[error("provider not configured: {0}")]
    Config(String),
    #[error("empty prompt for {0}")]
    EmptyPrompt(String),
}

pub trait Provider: Send + Sync {
    fn name(&self) -> &str;
    fn send(&self, request: &ChatRequest) -> Result<String, ProviderError>;
}

/// Retry, backoff and rate settings shared by every call of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GatewayPolicy {
    pub max_parse_retries: u32,
    pub max_transport_retries: u32,
    pub backoff_base_ms: u64,
    pub backoff_max_ms: u64,
    /// 0 disables the ceiling.
    pub requests_per_minute: u32,
}

impl Default for GatewayPolicy {
    fn default() -> Self {
        GatewayPolicy {
            max_parse_retries: 3,
            max_transport_retries: 5,
            backoff_base_ms: 500,
            backoff_max_ms: 30_000,
            requests_per_minute: 0,
        }
    }
}

impl GatewayPolicy {
    pub fn backoff(&self, retry: u32) -> Duration {
        let ms = self.backoff_base_ms.saturating_mul(1u64 << retry.min(20));
        Duration::from_millis(ms.min(self.backoff_max_ms))
    }
}

/// Spaces calls at least `60 / rpm` seconds apart across all threads.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next: Mutex<Instant>,
}

impl RateLimiter {
    pub fn new(requests_per_minute: u32) -> RateLimiter {
        let interval = if requests_per_minute == 0 {
            Duration::ZERO
        } else {
            Duration::from_secs_f64(60.0 / requests_per_minute as f64)
        };
        RateLimiter {
            interval,
            next: Mutex::new(Instant::now()),
        }
    }

    /// Reserve the next slot and sleep until it arrives.
    pub fn acquire(&self) {
        if self.interval.is_zero() {
            return;
        }
        let wait = {
            let mut next = self.next.lock().unwrap_or_else(|e| e.into_inner());
            let now = Instant::now();
            let slot = (*next).max(now);
            *next = slot + self.interval;
            slot - now
        };
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }
}

/// Text of a successful call and how many attempts it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub attempts: u32,
}

/// Provider plus retry policy and a shared rate limiter. Cheap to clone.
#[derive(Clone)]
pub struct Gateway {
    provider: Arc<dyn Provider>,
    policy: GatewayPolicy,
    limiter: Arc<RateLimiter>,
    sleep: fn(Duration),
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway")
            .field("provider", &self.provider.name())
            .field("policy", &self.policy)
            .finish()
    }
}

fn no_sleep(_: Duration) {}

impl Gateway {
    pub fn new(provider: Arc<dyn Provider>, policy: GatewayPolicy) -> Gateway {
        let limiter = Arc::new(RateLimiter::new(policy.requests_per_minute));
        Gateway {
            provider,
            policy,
            limiter,
            sleep: thread::sleep,
        }
    }

    /// Skip real sleeping during backoff; for tests.
    pub fn without_backoff_sleep(mut self) -> Gateway {
        self.sleep = no_sleep;
        self
    }

    pub fn policy(&self) -> &GatewayPolicy {
        &self.policy
    }

    pub fn provider_name(&self) -> &str {
        self.provider.name()
    }

    pub fn complete(&self, request: &ChatRequest) -> Result<Completion, GatewayError> {
        if request.prompt.trim().is_empty() {
            return Err(GatewayError::EmptyPrompt(request.tag.clone()));
        }
        let mut attempts = 0;
        loop {
            self.limiter.acquire();
            attempts += 1;
            match self.provider.send(request) {
                Ok(text) => return Ok(Completion { text, attempts }),
                Err(e) if e.retryable() && attempts <= self.policy.max_transport_retries => {
                    let wait = self.policy.backoff(attempts - 1);
                    log::warn!("{}: {e}; retry {attempts} in {wait:?}", request.tag);
                    (self.sleep)(wait);
                }
                Err(e) if e.retryable() => {
                    return Err(GatewayError::Transport {
                        attempts,
                        last: e.to_string(),
                    })
                }
                Err(ProviderError::Auth(m)) => return Err(GatewayError::Auth(m)),
                Err(ProviderError::Quota(m)) => return Err(GatewayError::Quota(m)),
                Err(e) => return Err(GatewayError::BadResponse(e.to_string())),
            }
        }
    }
}

/// OpenAI-compatible chat-completions endpoint.
pub struct HttpProvider {
    endpoint: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl HttpProvider {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>) -> Result<HttpProvider, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| GatewayError::Config(e.to_string()))?;
        Ok(HttpProvider {
            endpoint: endpoint.into(),
            api_key: api_key.into(),
            client,
        })
    }

    /// Reads POM_API_KEY and POM_ENDPOINT.
    pub fn from_env() -> Result<HttpProvider, GatewayError> {
        let key = std::env::var("POM_API_KEY")
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| GatewayError::Config("POM_API_KEY is not set".to_string()))?;
        let endpoint = std::env::var("POM_ENDPOINT").unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string());
        HttpProvider::new(endpoint, key)
    }
}

/// POM_MODEL, or the default model id.
pub fn model_from_env() -> String {
    std::env::var("POM_MODEL")
        .ok()
        .filter(|m| !m.trim().is_empty())
        .unwrap_or_else(|| DEFAULT_MODEL.to_string())
}

/// Classify an HTTP status and body.
pub fn classify_status(status: u16, body: &str) -> ProviderError {
    let lower = body.to_ascii_lowercase();
    match status {
        401 | 403 => ProviderError::Auth(format!("status {status}")),
        429 if lower.contains("insufficient_quota") || lower.contains("quota exceeded") => {
            ProviderError::Quota(body.chars().take(200).collect())
        }
        429 => ProviderError::RateLimited,
        500..=599 => ProviderError::Server(status),
        _ => ProviderError::BadResponse(format!("status {status}: {}", body.chars().take(200).collect::<String>())),
    }
}

/// Message text of a chat-completions response body.
pub fn response_text(body: &str) -> Result<String, ProviderError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| ProviderError::BadResponse(e.to_string()))?;
    value["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| ProviderError::BadResponse("no choices[0].message.content".to_string()))
}

impl Provider for HttpProvider {
    fn name(&self) -> &str {
        "http"
    }

    fn send(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        let body = json!({
            "model": request.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        let response = self
            .client
            .post(&self.endpoint)
            .bearer_auth(&self.api_key)
            .header("content-type", "application/json")
            .body(body.to_string())
            .send()
            .map_err(|e| ProviderError::Network(e.to_string()))?;
        let status = response.status().as_u16();
        let text = response.text().map_err(|e| ProviderError::Network(e.to_string()))?;
        if status != 200 {
            return Err(classify_status(status, &text));
        }
        response_text(&text)
    }
}

type Responder = dyn Fn(&ChatRequest) -> String + Send + Sync;

enum MockMode {
    Canned(Mutex<VecDeque<Result<String, ProviderError>>>),
    Responder(Box<Responder>),
}

/// Offline provider: replays a queue of canned results, or answers from a
/// function of the request. Counts every call.
pub struct MockProvider {
    mode: MockMode,
    calls: AtomicUsize,
}

impl MockProvider {
    /// Replies in order; once the queue is empty every call gets a network error.
    pub fn canned<I: IntoIterator<Item = Result<String, ProviderError>>>(replies: I) -> MockProvider {
        MockProvider {
            mode: MockMode::Canned(Mutex::new(replies.into_iter().collect())),
            calls: AtomicUsize::new(0),
        }
    }

    pub fn responder<F: Fn(&ChatRequest) -> String + Send + Sync + 'static>(f: F) -> MockProvider {
        MockProvider {
            mode: MockMode::Responder(Box::new(f)),
            calls: AtomicUsize::new(0),
        }
    }

    /// Reads each prompt and gives a well-formed answer for its phase.
    pub fn builtin() -> MockProvider {
        MockProvider::responder(|r| builtin_reply(&r.prompt))
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Provider for MockProvider {
    fn name(&self) -> &str {
        "mock"
    }

    fn send(&self, request: &ChatRequest) -> Result<String, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        match &self.mode {
            MockMode::Canned(queue) => queue
                .lock()
                .unwrap_or_else(|e| e.into_inner())
                .pop_front()
                .unwrap_or_else(|| Err(ProviderError::Network("mock queue exhausted".to_string()))),
            MockMode::Responder(f) => Ok(f(request)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request() -> ChatRequest {
        ChatRequest {
            model: "m".into(),
            prompt: "hello".into(),
            temperature: 1.0,
            max_tokens: 100,
            tag: "run/1/health_plan/Curator".into(),
        }
    }

    #[test]
    fn retries_rate_limit_then_succeeds() {
        let mock = Arc::new(MockProvider::canned([Err(ProviderError::RateLimited), Ok("<HEALTH>3</HEALTH>".into())]));
        let gw = Gateway::new(mock.clone(), GatewayPolicy::default()).without_backoff_sleep();
        let c = gw.complete(&request()).unwrap();
        assert_eq!(c.attempts, 2);
        assert_eq!(mock.calls(), 2);
    }

    #[test]
    fn auth_is_not_retried() {
        let mock = Arc::new(MockProvider::canned([Err(ProviderError::Auth("401".into()))]));
        let gw = Gateway::new(mock.clone(), GatewayPolicy::default()).without_backoff_sleep();
        assert!(matches!(gw.complete(&request()), Err(GatewayError::Auth(_))));
        assert_eq!(mock.calls(), 1);
    }

    #[test]
    fn transport_gives_up() {
        let mock = Arc::new(MockProvider::canned([]));
        let policy = GatewayPolicy {
            max_transport_retries: 2,
            ..Default::default()
        };
        let gw = Gateway::new(mock.clone(), policy).without_backoff_sleep();
        assert_eq!(
            gw.complete(&request()),
            Err(GatewayError::Transport {
                attempts: 3,
                last: "network error: mock queue exhausted".into()
            })
        );
    }

    #[test]
    fn status_classes() {
        assert!(matches!(classify_status(401, ""), ProviderError::Auth(_)));
        assert_eq!(classify_status(429, "slow down"), ProviderError::RateLimited);
        assert!(matches!(
            classify_status(429, r#"{"error":{"code":"insufficient_quota"}}"#),
            ProviderError::Quota(_)
        ));
        assert_eq!(classify_status(503, ""), ProviderError::Server(503));
    }

    #[test]
    fn backoff_doubles_and_caps() {
        let p = GatewayPolicy::default();
        assert_eq!(p.backoff(0), Duration::from_millis(500));
        assert_eq!(p.backoff(2), Duration::from_millis(2000));
        assert_eq!(p.backoff(30), Duration::from_millis(30_000));
    }
}
