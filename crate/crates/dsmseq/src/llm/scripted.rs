//! Canned backend: replays a fixed response list in order. Makes the whole
//! optimizer loop bit-reproducible and serves as the test oracle for the
//! live-path protocol.

use std::time::Duration;

use super::{Backend, LlmError, LlmRequest, LlmResponse, TokenUsage};

#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    responses: Vec<String>,
    served: usize,
    /// Prompts seen so far, for request-shape assertions in tests.
    requests: Vec<LlmRequest>,
}

impl ScriptedBackend {
    pub fn new<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ScriptedBackend {
            responses: responses.into_iter().map(Into::into).collect(),
            served: 0,
            requests: Vec::new(),
        }
    }

    /// How many responses have been consumed.
    pub fn served(&self) -> usize {
        self.served
    }

    pub fn remaining(&self) -> usize {
        self.responses.len() - self.served
    }

    pub fn requests(&self) -> &[LlmRequest] {
        &self.requests
    }
}

impl Backend for ScriptedBackend {
    fn complete(&mut self, request: &LlmRequest) -> Result<LlmResponse, LlmError> {
        if request.prompt.is_empty() {
            return Err(LlmError::EmptyPrompt);
        }
        self.requests.push(request.clone());
        if self.served >= self.responses.len() {
            return Err(LlmError::ScriptExhausted { served: self.served });
        }
        let text = self.responses[self.served].clone();
        self.served += 1;
        Ok(LlmResponse {
            text,
            latency: Duration::ZERO,
            usage: TokenUsage::default(),
            backend: self.name().to_string(),
        })
    }

    fn name(&self) -> &str {
        "scripted"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replays_in_order_then_exhausts() {
        let mut b = ScriptedBackend::new(["one", "two", "three"]);
        let req = LlmRequest::new("p", "m");
        for want in ["one", "two", "three"] {
            let resp = b.complete(&req).unwrap();
            assert_eq!(resp.text, want);
            assert_eq!(resp.backend, "scripted");
        }
        assert_eq!(b.served(), 3);
        let err = b.complete(&req).unwrap_err();
        assert!(matches!(err, LlmError::ScriptExhausted { served: 3 }));
    }

    #[test]
    fn empty_script_errors_immediately() {
        let mut b = ScriptedBackend::new(Vec::<String>::new());
        let err = b.complete(&LlmRequest::new("p", "m")).unwrap_err();
        assert!(matches!(err, LlmError::ScriptExhausted { served: 0 }));
    }

    #[test]
    fn rejects_empty_prompt() {
        let mut b = ScriptedBackend::new(["x"]);
        let err = b.complete(&LlmRequest::new("", "m")).unwrap_err();
        assert!(matches!(err, LlmError::EmptyPrompt));
        assert_eq!(b.served(), 0);
    }
}
