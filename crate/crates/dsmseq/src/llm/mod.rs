//! Provider-agnostic text generation: a live HTTP backend configured by a
//! profile file, a scripted backend for deterministic tests, and JSON-lines
//! transcripts of every call.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod http;
pub mod scripted;
pub mod transcript;

pub use http::HttpBackend;
pub use scripted::ScriptedBackend;
pub use transcript::{Transcript, TranscriptRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct LlmRequest {
    pub prompt: String,
    /// Label for logs; live backends send their profile's model id.
    pub model_name: String,
    pub max_output_tokens: u32,
    /// None = provider default.
    pub temperature_override: Option<f64>,
}

impl LlmRequest {
    pub fn new(prompt: impl Into<String>, model_name: impl Into<String>) -> Self {
        LlmRequest {
            prompt: prompt.into(),
            model_name: model_name.into(),
            max_output_tokens: 2048,
            temperature_override: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TokenUsage {
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct LlmResponse {
    /// Raw completion, verbatim.
    pub text: String,
    pub latency: Duration,
    pub usage: TokenUsage,
    /// Which backend produced this.
    pub backend: String,
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("prompt must not be empty")]
    EmptyPrompt,
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limited after {attempts} attempts: {message}")]
    RateLimited { attempts: u32, message: String },
    #[error("timed out after {attempts} attempts")]
    Timeout { attempts: u32 },
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("provider response missing completion text: {0}")]
    MalformedResponse(String),
    #[error("scripted backend exhausted after {served} responses")]
    ScriptExhausted { served: usize },
    #[error("backend profile {path}: {message}")]
    Profile { path: PathBuf, message: String },
}

/// A text-completion provider. One instance is owned by one optimizer run;
/// `&mut` keeps scripted replay and consumption counting honest.
pub trait Backend {
    fn complete(&mut self, request: &LlmRequest) -> Result<LlmResponse, LlmError>;
    fn name(&self) -> &str;
}

/// Connection settings for a chat-completions-style HTTP provider. The key is
/// never stored in the file, only the name of the environment variable that
/// holds it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendProfile {
    pub name: String,
    pub endpoint: String,
    pub model: String,
    pub auth_env: String,
}

impl BackendProfile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LlmError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| LlmError::Profile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|e| LlmError::Profile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}
