use std::fmt;
use std::time::Duration;

use async_trait::async_trait;
use serde::Deserialize;

use super::{ChatModel, CompletionRequest, CompletionResult, LlmError};

pub const ENV_API_KEY: &str = "PERSONA_RAG_API_KEY";
pub const ENV_API_BASE: &str = "PERSONA_RAG_API_BASE";
pub const ENV_MODEL: &str = "PERSONA_RAG_MODEL";

pub const DEFAULT_API_BASE: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo-0125";

/// Bearer token. Never printed.
#[derive(Clone, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        Self(key.into())
    }

    fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(<redacted>)")
    }
}

/// Exponential backoff: the i-th retry (0-based) waits `backoff_base · 2^i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub backoff_base: Duration,
}

impl RetryPolicy {
    pub fn delay(&self, retry: u32) -> Duration {
        self.backoff_base.saturating_mul(1u32.checked_shl(retry).unwrap_or(u32::MAX))
    }

    pub fn max_attempts(&self) -> u32 {
        self.max_retries.saturating_add(1)
    }
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 3,
            backoff_base: Duration::from_millis(500),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    pub base_url: String,
    pub api_key: ApiKey,
    pub timeout: Duration,
    pub retry: RetryPolicy,
}

impl ClientConfig {
    pub fn new(base_url: impl Into<String>, api_key: ApiKey) -> Self {
        Self {
            base_url: base_url.into(),
            api_key,
            timeout: Duration::from_secs(60),
            retry: RetryPolicy::default(),
        }
    }

    /// Reads `PERSONA_RAG_API_KEY` (required) and `PERSONA_RAG_API_BASE`.
    pub fn from_env() -> Result<Self, LlmError> {
        let key = std::env::var(ENV_API_KEY)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| LlmError::InvalidConfig(format!("{ENV_API_KEY} is not set")))?;
        let base = std::env::var(ENV_API_BASE)
            .ok()
            .filter(|b| !b.is_empty())
            .unwrap_or_else(|| DEFAULT_API_BASE.to_string());
        Ok(Self::new(base, ApiKey::new(key)))
    }

    fn endpoint(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}

/// Client for any OpenAI-compatible chat-completions backend.
#[derive(Debug, Clone)]
pub struct OpenAiClient {
    config: ClientConfig,
    http: reqwest::Client,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireMessage,
}

#[derive(Deserialize)]
struct WireMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireUsage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
}

/// Outcome of a single HTTP attempt.
enum Attempt {
    Done(CompletionResult),
    Retryable(LlmError),
    Fatal(LlmError),
}

impl OpenAiClient {
    pub fn new(config: ClientConfig) -> Result<Self, LlmError> {
        if !(config.base_url.starts_with("http://") || config.base_url.starts_with("https://")) {
            return Err(LlmError::InvalidConfig(format!(
                "base_url must be an http(s) URL, got {:?}",
                config.base_url
            )));
        }
        let http = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| LlmError::InvalidConfig(e.to_string()))?;
        Ok(Self { config, http })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    async fn attempt(&self, request: &CompletionRequest, attempt_no: u32) -> Attempt {
        let response = self
            .http
            .post(self.config.endpoint())
            .bearer_auth(self.config.api_key.expose())
            .json(request)
            .send()
            .await;
        let response = match response {
            Ok(r) => r,
            Err(e) if e.is_timeout() => return Attempt::Retryable(LlmError::Timeout { attempts: attempt_no }),
            Err(e) => {
                return Attempt::Retryable(LlmError::Transport {
                    message: e.without_url().to_string(),
                    attempts: attempt_no,
                })
            }
        };
        let status = response.status().as_u16();
        let body = match response.text().await {
            Ok(b) => b,
            Err(e) if e.is_timeout() => return Attempt::Retryable(LlmError::Timeout { attempts: attempt_no }),
            Err(e) => {
                return Attempt::Retryable(LlmError::Transport {
                    message: e.without_url().to_string(),
                    attempts: attempt_no,
                })
            }
        };
        match status {
            200..=299 => match parse_body(&body) {
                Ok(result) => Attempt::Done(result),
                Err(e) => Attempt::Fatal(e),
            },
            401 | 403 => Attempt::Fatal(LlmError::Auth {
                status,
                message: error_message(&body),
            }),
            429 => Attempt::Retryable(LlmError::RateLimited { attempts: attempt_no }),
            500..=599 => Attempt::Retryable(LlmError::Backend {
                status,
                message: error_message(&body),
                attempts: attempt_no,
            }),
            _ => Attempt::Fatal(LlmError::Rejected {
                status,
                message: error_message(&body),
            }),
        }
    }
}

fn parse_body(body: &str) -> Result<CompletionResult, LlmError> {
    let wire: WireResponse = serde_json::from_str(body).map_err(|e| LlmError::MalformedResponse(e.to_string()))?;
    let choice = wire
        .choices
        .into_iter()
        .next()
        .ok_or_else(|| LlmError::MalformedResponse("response has no choices".into()))?;
    let usage = wire.usage.unwrap_or(WireUsage {
        prompt_tokens: 0,
        completion_tokens: 0,
    });
    Ok(CompletionResult {
        text: choice.message.content.unwrap_or_default(),
        prompt_tokens: usage.prompt_tokens,
        completion_tokens: usage.completion_tokens,
    })
}

/// Best-effort `error.message` from an OpenAI-style error body.
fn error_message(body: &str) -> String {
    serde_json::from_str::<serde_json::Value>(body)
        .ok()
        .and_then(|v| v["error"]["message"].as_str().map(str::to_string))
        .unwrap_or_else(|| body.chars().take(200).collect())
}

#[async_trait]
impl ChatModel for OpenAiClient {
    async fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, LlmError> {
        request.validate()?;
        let policy = self.config.retry;
        let mut retry = 0;
        loop {
            match self.attempt(request, retry + 1).await {
                Attempt::Done(result) => return Ok(result),
                Attempt::Fatal(e) => return Err(e),
                Attempt::Retryable(e) if retry >= policy.max_retries => return Err(e),
                Attempt::Retryable(e) => {
                    let delay = policy.delay(retry);
                    tracing::warn!(attempt = retry + 1, ?delay, error = %e, "transient LLM failure, retrying");
                    tokio::time::sleep(delay).await;
                    retry += 1;
                }
            }
        }
    }
}
