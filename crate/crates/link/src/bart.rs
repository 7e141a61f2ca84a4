//! HTTP client for the external BART correction service.
//!
//! `POST {endpoint}/correct` with `{"text": ...}`; the reply is
//! `{"corrected": ..., "tokens": [{"text", "char_start", "char_end", "logprob"}]}`
//! with natural-log token probabilities. `GET {endpoint}/health` returns the
//! service's checkpoint identifier.

use std::time::Duration;

use msc_core::sec::{Corrector, SecBackend, SecError, SecOutcome, TokenSpan};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize)]
struct CorrectRequest<'a> {
    text: &'a str,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireToken {
    pub text: String,
    pub char_start: usize,
    pub char_end: usize,
    pub logprob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectResponse {
    pub corrected: String,
    pub tokens: Vec<WireToken>,
}

/// Converts a service reply, exponentiating log-probabilities, and checks the
/// outcome invariants.
pub fn outcome_from_response(resp: CorrectResponse) -> Result<SecOutcome, SecError> {
    let tokens = resp
        .tokens
        .into_iter()
        .map(|t| TokenSpan { text: t.text, char_start: t.char_start, char_end: t.char_end, prob: t.logprob.exp() })
        .collect();
    let outcome = SecOutcome { corrected_text: resp.corrected, tokens, backend: SecBackend::BartService };
    outcome.validate()?;
    Ok(outcome)
}

/// Stateless apart from the connection pool; safe to share across threads.
#[derive(Debug, Clone)]
pub struct BartClient {
    endpoint: String,
    agent: ureq::Agent,
}

fn transport(e: ureq::Error) -> SecError {
    match e {
        ureq::Error::Timeout(_) => SecError::Timeout,
        other => SecError::Transport(other.to_string()),
    }
}

impl BartClient {
    pub fn new(endpoint: &str, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        BartClient { endpoint: endpoint.trim_end_matches('/').to_string(), agent }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    pub fn health(&self) -> Result<String, SecError> {
        let mut resp = self.agent.get(&format!("{}/health", self.endpoint)).call().map_err(transport)?;
        resp.body_mut().read_to_string().map_err(transport)
    }
}

impl Corrector for BartClient {
    fn backend(&self) -> SecBackend {
        SecBackend::BartService
    }

    fn correct(&self, garbled_text: &str) -> Result<SecOutcome, SecError> {
        if garbled_text.is_empty() {
            return Err(SecError::EmptyInput);
        }
        let mut resp = self
            .agent
            .post(&format!("{}/correct", self.endpoint))
            .send_json(&CorrectRequest { text: garbled_text })
            .map_err(transport)?;
        let body = resp.body_mut().read_to_string().map_err(transport)?;
        let parsed: CorrectResponse = serde_json::from_str(&body).map_err(|e| SecError::Malformed(e.to_string()))?;
        outcome_from_response(parsed)
    }
}
