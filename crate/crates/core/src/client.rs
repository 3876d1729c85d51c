//! Chat-completion transport with retries, rate limiting and latency capture.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

fn default_temperature() -> f64 {
    0.0
}

fn default_max_tokens() -> u32 {
    4096
}

fn default_timeout_s() -> f64 {
    120.0
}

fn default_response_pointer() -> String {
    "/choices/0/message/content".to_string()
}

/// Configuration for one model endpoint. Holds the name of the environment
/// variable with the API key, never the key itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHandle {
    pub model_id: String,
    pub endpoint: String,
    #[serde(default)]
    pub auth_env: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_timeout_s")]
    pub timeout_s: f64,
    /// Requests per minute; unlimited when absent.
    #[serde(default)]
    pub rpm: Option<u32>,
    /// Model name sent in the request body, if it differs from `model_id`.
    #[serde(default)]
    pub remote_model: Option<String>,
    /// JSON pointer to the completion text in the response body.
    #[serde(default = "default_response_pointer")]
    pub response_pointer: String,
}

impl ModelHandle {
    pub fn new(model_id: impl Into<String>, endpoint: impl Into<String>) -> Self {
        Self {
            model_id: model_id.into(),
            endpoint: endpoint.into(),
            auth_env: None,
            temperature: default_temperature(),
            max_tokens: default_max_tokens(),
            timeout_s: default_timeout_s(),
            rpm: None,
            remote_model: None,
            response_pointer: default_response_pointer(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportErrorKind {
    Timeout,
    RateLimited,
    Server,
    Client,
    Network,
    BadResponse,
}

impl TransportErrorKind {
    pub fn retryable(self) -> bool {
        matches!(self, Self::Timeout | Self::RateLimited | Self::Server | Self::Network)
    }

    pub fn from_status(status: u16) -> Self {
        match status {
            408 => Self::Timeout,
            429 => Self::RateLimited,
            500..=599 => Self::Server,
            _ => Self::Client,
        }
    }
}

/// A single failed request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportFailure {
    pub kind: TransportErrorKind,
    pub message: String,
}

impl TransportFailure {
    pub fn new(kind: TransportErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClientError {
    #[error("environment variable {env} with the API key for {model_id} is not set")]
    Auth { model_id: String, env: String },
    #[error("{kind:?} after {attempts} attempt(s): {message}")]
    Transport {
        kind: TransportErrorKind,
        attempts: u32,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
    pub total_tokens: Option<u64>,
}

impl TokenUsage {
    fn from_body(body: &Value) -> Option<Self> {
        let usage = body.get("usage")?;
        let field = |k: &str| usage.get(k).and_then(Value::as_u64);
        Some(Self {
            prompt_tokens: field("prompt_tokens").or_else(|| field("input_tokens")),
            completion_tokens: field("completion_tokens").or_else(|| field("output_tokens")),
            total_tokens: field("total_tokens"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatReply {
    pub text: String,
    pub token_usage: Option<TokenUsage>,
}

/// One request/response exchange, without retries.
pub trait Transport: Send + Sync {
    fn send(&self, request: &ChatRequest, api_key: Option<&str>) -> Result<ChatReply, TransportFailure>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
    endpoint: String,
    response_pointer: String,
}

impl HttpTransport {
    pub fn new(handle: &ModelHandle) -> Result<Self, TransportFailure> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(handle.timeout_s))
            .build()
            .map_err(|e| TransportFailure::new(TransportErrorKind::Network, e.to_string()))?;
        Ok(Self {
            client,
            endpoint: handle.endpoint.clone(),
            response_pointer: handle.response_pointer.clone(),
        })
    }
}

impl Transport for HttpTransport {
    fn send(&self, request: &ChatRequest, api_key: Option<&str>) -> Result<ChatReply, TransportFailure> {
        let mut req = self.client.post(&self.endpoint).json(request);
        if let Some(key) = api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| {
            let kind = if e.is_timeout() {
                TransportErrorKind::Timeout
            } else {
                TransportErrorKind::Network
            };
            TransportFailure::new(kind, e.to_string())
        })?;
        let status = resp.status();
        let text = resp
            .text()
            .map_err(|e| TransportFailure::new(TransportErrorKind::Network, e.to_string()))?;
        if !status.is_success() {
            let snippet: String = text.chars().take(200).collect();
            return Err(TransportFailure::new(
                TransportErrorKind::from_status(status.as_u16()),
                format!("HTTP {status}: {snippet}"),
            ));
        }
        let body: Value = serde_json::from_str(&text)
            .map_err(|e| TransportFailure::new(TransportErrorKind::BadResponse, e.to_string()))?;
        let content = body
            .pointer(&self.response_pointer)
            .and_then(Value::as_str)
            .ok_or_else(|| {
                TransportFailure::new(
                    TransportErrorKind::BadResponse,
                    format!("no string at {}", self.response_pointer),
                )
            })?;
        Ok(ChatReply {
            text: content.to_string(),
            token_usage: TokenUsage::from_body(&body),
        })
    }
}

type Script = dyn Fn(&ChatRequest, u32) -> Result<String, TransportFailure> + Send + Sync;

/// Offline transport driven by a closure of (request, 1-based call number).
pub struct MockTransport {
    script: Box<Script>,
    delay: Duration,
    calls: Mutex<u32>,
}

impl MockTransport {
    pub fn new(script: impl Fn(&ChatRequest, u32) -> Result<String, TransportFailure> + Send + Sync + 'static) -> Self {
        Self {
            script: Box::new(script),
            delay: Duration::ZERO,
            calls: Mutex::new(0),
        }
    }

    /// Always answers with `text`.
    pub fn canned(text: impl Into<String>) -> Self {
        let text = text.into();
        Self::new(move |_, _| Ok(text.clone()))
    }

    /// Sleeps for `delay` before every reply.
    pub fn with_delay(mut self, delay: Duration) -> Self {
        self.delay = delay;
        self
    }

    pub fn calls(&self) -> u32 {
        *self.calls.lock().unwrap()
    }
}

impl Transport for MockTransport {
    fn send(&self, request: &ChatRequest, _api_key: Option<&str>) -> Result<ChatReply, TransportFailure> {
        let n = {
            let mut calls = self.calls.lock().unwrap();
            *calls += 1;
            *calls
        };
        if !self.delay.is_zero() {
            thread::sleep(self.delay);
        }
        (self.script)(request, n).map(|text| ChatReply { text, token_usage: None })
    }
}

/// Time source for backoff and rate limiting.
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

pub struct SystemClock {
    start: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        Self { start: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.start.elapsed()
    }

    fn sleep(&self, d: Duration) {
        thread::sleep(d);
    }
}

/// Clock that only moves when slept on.
#[derive(Default)]
pub struct VirtualClock {
    now: Mutex<Duration>,
}

impl VirtualClock {
    pub fn advance(&self, d: Duration) {
        *self.now.lock().unwrap() += d;
    }
}

impl Clock for VirtualClock {
    fn now(&self) -> Duration {
        *self.now.lock().unwrap()
    }

    fn sleep(&self, d: Duration) {
        self.advance(d);
    }
}

pub const RATE_WINDOW: Duration = Duration::from_secs(60);

/// Sliding-window limiter: at most `per_minute` dispatches in any window of
/// [`RATE_WINDOW`].
pub struct RateLimiter {
    per_minute: usize,
    clock: Arc<dyn Clock>,
    sent: Mutex<VecDeque<Duration>>,
}

impl RateLimiter {
    pub fn new(per_minute: u32, clock: Arc<dyn Clock>) -> Self {
        Self {
            per_minute: per_minute.max(1) as usize,
            clock,
            sent: Mutex::new(VecDeque::new()),
        }
    }

    /// Blocks until a request may be sent and records it. Returns the
    /// dispatch time.
    pub fn acquire(&self) -> Duration {
        // The lock is held while waiting so waiters are served in turn.
        let mut sent = self.sent.lock().unwrap();
        loop {
            let now = self.clock.now();
            while sent.front().is_some_and(|&t| now >= t + RATE_WINDOW) {
                sent.pop_front();
            }
            if sent.len() < self.per_minute {
                sent.push_back(now);
                return now;
            }
            let oldest = *sent.front().expect("window is full");
            self.clock.sleep(oldest + RATE_WINDOW - now);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 5,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(30),
        }
    }
}

impl RetryPolicy {
    /// Wait before attempt `attempt + 1`.
    pub fn backoff(&self, attempt: u32) -> Duration {
        let factor = 1u32.checked_shl(attempt.saturating_sub(1)).unwrap_or(u32::MAX);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    pub text: String,
    pub latency_ms: f64,
    pub attempts: u32,
    pub token_usage: Option<TokenUsage>,
}

pub struct ModelClient {
    handle: ModelHandle,
    transport: Box<dyn Transport>,
    api_key: Option<String>,
    limiter: Option<RateLimiter>,
    retry: RetryPolicy,
    clock: Arc<dyn Clock>,
}

impl std::fmt::Debug for ModelClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelClient").field("handle", &self.handle).finish_non_exhaustive()
    }
}

impl ModelClient {
    /// Resolves the API key up front so a missing key fails before any
    /// request is made.
    pub fn new(handle: ModelHandle, transport: Box<dyn Transport>) -> Result<Self, ClientError> {
        Self::with_clock(handle, transport, Arc::new(SystemClock::default()))
    }

    pub fn with_clock(handle: ModelHandle, transport: Box<dyn Transport>, clock: Arc<dyn Clock>) -> Result<Self, ClientError> {
        let api_key = match &handle.auth_env {
            Some(env) => Some(std::env::var(env).ok().filter(|k| !k.is_empty()).ok_or_else(|| ClientError::Auth {
                model_id: handle.model_id.clone(),
                env: env.clone(),
            })?),
            None => None,
        };
        let limiter = handle.rpm.map(|rpm| RateLimiter::new(rpm, clock.clone()));
        Ok(Self {
            handle,
            transport,
            api_key,
            limiter,
            retry: RetryPolicy::default(),
            clock,
        })
    }

    pub fn http(handle: ModelHandle) -> Result<Self, ClientError> {
        let transport = HttpTransport::new(&handle).map_err(|f| ClientError::Transport {
            kind: f.kind,
            attempts: 0,
            message: f.message,
        })?;
        Self::new(handle, Box::new(transport))
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn handle(&self) -> &ModelHandle {
        &self.handle
    }

    pub fn request(&self, prompt: &str) -> ChatRequest {
        ChatRequest {
            model: self.handle.remote_model.clone().unwrap_or_else(|| self.handle.model_id.clone()),
            messages: vec![ChatMessage {
                role: "user".into(),
                content: prompt.to_string(),
            }],
            temperature: self.handle.temperature,
            max_tokens: self.handle.max_tokens,
        }
    }

    /// Sends the prompt, retrying retryable failures with exponential
    /// backoff. Latency covers every attempt and wait.
    pub fn complete(&self, prompt: &str) -> Result<Completion, ClientError> {
        let request = self.request(prompt);
        let started = Instant::now();
        let mut attempt = 0;
        loop {
            attempt += 1;
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            match self.transport.send(&request, self.api_key.as_deref()) {
                Ok(reply) => {
                    return Ok(Completion {
                        text: reply.text,
                        latency_ms: started.elapsed().as_secs_f64() * 1000.0,
                        attempts: attempt,
                        token_usage: reply.token_usage,
                    })
                }
                Err(f) if f.kind.retryable() && attempt < self.retry.max_attempts => {
                    self.clock.sleep(self.retry.backoff(attempt));
                }
                Err(f) => {
                    return Err(ClientError::Transport {
                        kind: f.kind,
                        attempts: attempt,
                        message: f.message,
                    })
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RetryPolicy {
        RetryPolicy {
            max_attempts: 4,
            base_delay: Duration::from_millis(1),
            max_delay: Duration::from_millis(4),
        }
    }

    #[test]
    fn canned_reply() {
        let c = ModelClient::new(ModelHandle::new("m", "mock://"), Box::new(MockTransport::canned("[[1]]"))).unwrap();
        let out = c.complete("hi").unwrap();
        assert_eq!(out.text, "[[1]]");
        assert_eq!(out.attempts, 1);
        assert!(out.latency_ms >= 0.0);
    }

    #[test]
    fn retries_then_succeeds() {
        let t = MockTransport::new(|_, n| {
            if n < 3 {
                Err(TransportFailure::new(TransportErrorKind::Server, "503"))
            } else {
                Ok("ok".into())
            }
        });
        let c = ModelClient::new(ModelHandle::new("m", "mock://"), Box::new(t)).unwrap().with_retry(quick());
        assert_eq!(c.complete("x").unwrap().attempts, 3);
    }

    #[test]
    fn gives_up_and_skips_client_errors() {
        let t = MockTransport::new(|_, _| Err(TransportFailure::new(TransportErrorKind::RateLimited, "429")));
        let c = ModelClient::new(ModelHandle::new("m", "mock://"), Box::new(t)).unwrap().with_retry(quick());
        assert!(matches!(
            c.complete("x"),
            Err(ClientError::Transport { kind: TransportErrorKind::RateLimited, attempts: 4, .. })
        ));
        let t = MockTransport::new(|_, _| Err(TransportFailure::new(TransportErrorKind::Client, "400")));
        let c = ModelClient::new(ModelHandle::new("m", "mock://"), Box::new(t)).unwrap().with_retry(quick());
        assert!(matches!(c.complete("x"), Err(ClientError::Transport { attempts: 1, .. })));
    }

    #[test]
    fn missing_key_fails_before_sending() {
        let mut h = ModelHandle::new("m", "mock://");
        h.auth_env = Some("DYNAGRID_TEST_KEY_THAT_IS_NOT_SET".into());
        let t = Arc::new(MockTransport::canned("x"));
        struct Shared(Arc<MockTransport>);
        impl Transport for Shared {
            fn send(&self, r: &ChatRequest, k: Option<&str>) -> Result<ChatReply, TransportFailure> {
                self.0.send(r, k)
            }
        }
        let err = ModelClient::new(h, Box::new(Shared(t.clone()))).unwrap_err();
        assert!(matches!(err, ClientError::Auth { .. }));
        assert_eq!(t.calls(), 0);
    }

    #[test]
    fn backoff_doubles_to_cap() {
        let p = RetryPolicy::default();
        assert_eq!(p.backoff(1), Duration::from_millis(500));
        assert_eq!(p.backoff(3), Duration::from_secs(2));
        assert_eq!(p.backoff(40), Duration::from_secs(30));
    }

    #[test]
    fn limiter_respects_window() {
        let clock = Arc::new(VirtualClock::default());
        let limiter = RateLimiter::new(5, clock.clone());
        let times: Vec<Duration> = (0..23)
            .map(|i| {
                clock.advance(Duration::from_millis(700 * (i % 3)));
                limiter.acquire()
            })
            .collect();
        for (i, &t) in times.iter().enumerate() {
            let in_window = times[i..].iter().take_while(|&&u| u < t + RATE_WINDOW).count();
            assert!(in_window <= 5, "{in_window} dispatches in window starting at {t:?}");
        }
    }

    #[test]
    fn handle_serializes_without_secret() {
        let mut h = ModelHandle::new("m", "https://example.invalid/v1/chat/completions");
        h.auth_env = Some("SOME_KEY".into());
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("SOME_KEY"));
        let back: ModelHandle = serde_json::from_str(r#"{"model_id":"a","endpoint":"b"}"#).unwrap();
        assert_eq!(back.temperature, 0.0);
    }
}
