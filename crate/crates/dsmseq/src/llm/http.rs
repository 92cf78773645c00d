//! Live chat-completions backend. The request body carries only `model`,
//! `messages`, and `max_tokens` (plus `temperature` when explicitly
//! overridden) so provider defaults stay in force.

use std::sync::{Condvar, Mutex, OnceLock};
use std::time::{Duration, Instant};

use serde_json::json;

use super::{Backend, BackendProfile, LlmError, LlmRequest, LlmResponse, TokenUsage};

const DEFAULT_MAX_ATTEMPTS: u32 = 3;
const DEFAULT_BACKOFF: Duration = Duration::from_millis(500);
const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);
const DEFAULT_MAX_IN_FLIGHT: usize = 4;

/// Process-wide cap on concurrent live requests. Runs on different threads
/// share it; scripted backends never touch it.
struct InFlight {
    active: Mutex<usize>,
    freed: Condvar,
    limit: usize,
}

impl InFlight {
    fn global() -> &'static InFlight {
        static GLOBAL: OnceLock<InFlight> = OnceLock::new();
        GLOBAL.get_or_init(|| {
            let limit = std::env::var("DSMSEQ_MAX_IN_FLIGHT")
                .ok()
                .and_then(|v| v.parse().ok())
                .filter(|&v| v > 0)
                .unwrap_or(DEFAULT_MAX_IN_FLIGHT);
            InFlight {
                active: Mutex::new(0),
                freed: Condvar::new(),
                limit,
            }
        })
    }

    fn acquire(&'static self) -> InFlightGuard {
        let mut active = self.active.lock().expect("in-flight lock poisoned");
        while *active >= self.limit {
            active = self.freed.wait(active).expect("in-flight lock poisoned");
        }
        *active += 1;
        InFlightGuard(self)
    }
}

struct InFlightGuard(&'static InFlight);

impl Drop for InFlightGuard {
    fn drop(&mut self) {
        let mut active = self.0.active.lock().expect("in-flight lock poisoned");
        *active -= 1;
        self.0.freed.notify_one();
    }
}

enum Attempt {
    Fatal(LlmError),
    RateLimited(String),
    TimedOut,
    Transport(String),
}

#[derive(Debug)]
pub struct HttpBackend {
    profile: BackendProfile,
    api_key: String,
    agent: ureq::Agent,
    max_attempts: u32,
    backoff_base: Duration,
}

impl HttpBackend {
    /// Reads the API key from the profile's environment variable; a missing
    /// or empty key is an authentication failure up front.
    pub fn from_profile(profile: BackendProfile) -> Result<Self, LlmError> {
        let api_key = std::env::var(&profile.auth_env).unwrap_or_default();
        if api_key.is_empty() {
            return Err(LlmError::Auth(format!(
                "environment variable {} is unset or empty",
                profile.auth_env
            )));
        }
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(DEFAULT_TIMEOUT))
            .build()
            .new_agent();
        Ok(HttpBackend {
            profile,
            api_key,
            agent,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            backoff_base: DEFAULT_BACKOFF,
        })
    }

    /// Shrink or stretch the retry backoff (tests use milliseconds).
    pub fn with_backoff(mut self, base: Duration) -> Self {
        self.backoff_base = base;
        self
    }

    pub fn profile(&self) -> &BackendProfile {
        &self.profile
    }

    fn try_once(&self, request: &LlmRequest) -> Result<LlmResponse, Attempt> {
        let mut body = json!({
            "model": self.profile.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "max_tokens": request.max_output_tokens,
        });
        if let Some(t) = request.temperature_override {
            body["temperature"] = json!(t);
        }
        let started = Instant::now();
        let sent = self
            .agent
            .post(&self.profile.endpoint)
            .header("authorization", format!("Bearer {}", self.api_key))
            .send_json(&body);
        let mut resp = match sent {
            Ok(resp) => resp,
            Err(ureq::Error::Timeout(_)) => return Err(Attempt::TimedOut),
            Err(
                e @ (ureq::Error::Io(_)
                | ureq::Error::ConnectionFailed
                | ureq::Error::HostNotFound),
            ) => return Err(Attempt::Transport(e.to_string())),
            Err(e) => return Err(Attempt::Fatal(LlmError::Transport {
                attempts: 1,
                message: e.to_string(),
            })),
        };
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            let detail = resp
                .body_mut()
                .read_to_string()
                .unwrap_or_default()
                .chars()
                .take(400)
                .collect::<String>();
            let message = format!("HTTP {status}: {detail}");
            return Err(match status {
                401 | 403 => Attempt::Fatal(LlmError::Auth(message)),
                408 | 429 => Attempt::RateLimited(message),
                500..=599 => Attempt::Transport(message),
                _ => Attempt::Fatal(LlmError::Transport {
                    attempts: 1,
                    message,
                }),
            });
        }
        let value: serde_json::Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| Attempt::Fatal(LlmError::MalformedResponse(e.to_string())))?;
        let latency = started.elapsed();
        let text = value["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| {
                Attempt::Fatal(LlmError::MalformedResponse(
                    "choices[0].message.content absent".to_string(),
                ))
            })?
            .to_string();
        let usage = TokenUsage {
            prompt_tokens: value["usage"]["prompt_tokens"].as_u64(),
            completion_tokens: value["usage"]["completion_tokens"].as_u64(),
        };
        Ok(LlmResponse {
            text,
            latency,
            usage,
            backend: self.profile.name.clone(),
        })
    }
}

impl Backend for HttpBackend {
    /// Transient failures (timeouts, rate limits, 5xx, connection drops) are
    /// retried with exponential backoff up to 3 attempts; authentication and
    /// other 4xx failures return immediately.
    fn complete(&mut self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        if request.prompt.is_empty() {
            return Err(LlmError::EmptyPrompt);
        }
        let _slot = InFlight::global().acquire();
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let failure = match self.try_once(request) {
                Ok(resp) => return Ok(resp),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(other) => other,
            };
            if attempt >= self.max_attempts {
                return Err(match failure {
                    Attempt::RateLimited(message) => LlmError::RateLimited {
                        attempts: attempt,
                        message,
                    },
                    Attempt::TimedOut => LlmError::Timeout { attempts: attempt },
                    Attempt::Transport(message) => LlmError::Transport {
                        attempts: attempt,
                        message,
                    },
                    Attempt::Fatal(e) => e,
                });
            }
            std::thread::sleep(self.backoff_base * 2u32.pow(attempt - 1));
        }
    }

    fn name(&self) -> &str {
        &self.profile.name
    }
}
