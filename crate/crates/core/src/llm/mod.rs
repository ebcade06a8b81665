//! Chat-completion clients.
//!
//! [`ChatModel`] is the one seam between the pipeline and a language model.
//! [`OpenAiClient`] speaks the OpenAI-compatible `/chat/completions` wire
//! protocol with retries; [`ScriptedLlm`] answers from a fixed script and
//! records every request for inspection.

mod mock;
mod openai;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mock::{LoggedCall, ScriptEntry, ScriptedLlm};
pub use openai::{
    ApiKey, ClientConfig, OpenAiClient, RetryPolicy, DEFAULT_API_BASE, DEFAULT_MODEL, ENV_API_BASE, ENV_API_KEY,
    ENV_MODEL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn user(content: impl Into<String>) -> Self {
        Self {
            role: Role::User,
            content: content.into(),
        }
    }

    pub fn system(content: impl Into<String>) -> Self {
        Self {
            role: Role::System,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
}

impl CompletionRequest {
    /// A request carrying `prompt` as its single user message, at temperature 0.
    pub fn single_prompt(model: impl Into<String>, prompt: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            messages: vec![ChatMessage::user(prompt)],
            temperature: 0.0,
            max_tokens: None,
        }
    }

    pub fn with_max_tokens(mut self, max_tokens: Option<u32>) -> Self {
        self.max_tokens = max_tokens;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    /// Message contents joined by blank lines; what mock matchers see.
    pub fn prompt_text(&self) -> String {
        self.messages
            .iter()
            .map(|m| m.content.as_str())
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        if self.messages.is_empty() {
            return Err(LlmError::InvalidRequest("request has no messages".into()));
        }
        if let Some(m) = self
            .messages
            .iter()
            .find(|m| m.role != Role::Assistant && m.content.is_empty())
        {
            return Err(LlmError::InvalidRequest(format!("empty {:?} message", m.role)));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(LlmError::InvalidRequest(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if self.max_tokens == Some(0) {
            return Err(LlmError::InvalidRequest("max_tokens must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionResult {
    pub text: String,
    #[serde(default)]
    pub prompt_tokens: u64,
    #[serde(default)]
    pub completion_tokens: u64,
}

impl CompletionResult {
    pub fn text(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LlmError {
    #[error("authentication rejected (HTTP {status}): {message}")]
    Auth { status: u16, message: String },
    #[error("rate limited after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("backend error (HTTP {status}) after {attempts} attempts: {message}")]
    Backend { status: u16, message: String, attempts: u32 },
    #[error("request timed out after {attempts} attempts")]
    Timeout { attempts: u32 },
    #[error("transport error after {attempts} attempts: {message}")]
    Transport { message: String, attempts: u32 },
    #[error("request rejected (HTTP {status}): {message}")]
    Rejected { status: u16, message: String },
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("invalid client configuration: {0}")]
    InvalidConfig(String),
    #[error("no script entry matches prompt starting {0:?}")]
    UnmatchedPrompt(String),
}

impl LlmError {
    /// Errors that end a whole run rather than one question.
    pub fn is_fatal(&self) -> bool {
        matches!(self, LlmError::Auth { .. } | LlmError::InvalidConfig(_))
    }
}

#[async_trait]
pub trait ChatModel: Send + Sync {
    async fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, LlmError>;
}

#[async_trait]
impl<T: ChatModel + ?Sized> ChatModel for std::sync::Arc<T> {
    async fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, LlmError> {
        (**self).complete(request).await
    }
}

#[async_trait]
impl<T: ChatModel + ?Sized> ChatModel for &T {
    async fn complete(&self, request: &CompletionRequest) -> Result<CompletionResult, LlmError> {
        (**self).complete(request).await
    }
}
