//! Remote embedding provider client.
//!
//! Contract: `POST {base}/embed` with body `{"text": <context>, "target":
//! <token>}`; a 200 response carries `{"vector": [..]}`. Anything else is
//! a transport failure, retried per config and then surfaced as an error.
//! Any embedding backend can be plugged in through [`EmbeddingProvider`].

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The anchor the sentiment score is measured against: a context phrase
/// and the target token inside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorSpec {
    pub context_phrase: String,
    pub target_token: String,
}

impl Default for AnchorSpec {
    fn default() -> Self {
        AnchorSpec {
            context_phrase: "financially positive and optimistic".to_string(),
            target_token: "positive".to_string(),
        }
    }
}

impl AnchorSpec {
    pub fn new(context_phrase: &str, target_token: &str) -> Result<AnchorSpec, ProviderError> {
        if !context_phrase.contains(target_token) {
            return Err(ProviderError::AnchorMismatch {
                target: target_token.to_string(),
            });
        }
        Ok(AnchorSpec {
            context_phrase: context_phrase.to_string(),
            target_token: target_token.to_string(),
        })
    }
}

/// A fixed-length embedding with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<EmbeddingVector, ProviderError> {
        if values.is_empty() {
            return Err(ProviderError::MalformedResponse("empty vector".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ProviderError::MalformedResponse(
                "non-finite vector entry".into(),
            ));
        }
        Ok(EmbeddingVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("target token {target:?} does not occur in the context phrase")]
    AnchorMismatch { target: String },
    #[error("transport failure after {attempts} attempt(s): {detail}")]
    Transport { attempts: u32, detail: String },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
}

/// Anything that can embed a target token in a context string.
pub trait EmbeddingProvider: Send + Sync {
    fn embed(&self, context: &str, target: &str) -> Result<EmbeddingVector, ProviderError>;
}

/// Timeout and retry policy for the HTTP provider.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub timeout_secs: u64,
    pub retries: u32,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            timeout_secs: 10,
            retries: 2,
        }
    }
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    text: &'a str,
    target: &'a str,
}

#[derive(Deserialize)]
struct EmbedResponse {
    vector: Vec<f64>,
}

/// Blocking HTTP client for the embedding endpoint.
pub struct HttpEmbeddingProvider {
    endpoint: String,
    config: ProviderConfig,
    client: reqwest::blocking::Client,
}

impl HttpEmbeddingProvider {
    pub fn new(base_url: &str, config: ProviderConfig) -> HttpEmbeddingProvider {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .expect("http client builds");
        HttpEmbeddingProvider {
            endpoint: format!("{}/embed", base_url.trim_end_matches('/')),
            config,
            client,
        }
    }

    fn request_once(&self, context: &str, target: &str) -> Result<EmbeddingVector, String> {
        let response = self
            .client
            .post(&self.endpoint)
            .json(&EmbedRequest {
                text: context,
                target,
            })
            .send()
            .map_err(|e| e.to_string())?;
        let status = response.status();
        if !status.is_success() {
            return Err(format!("status {status}"));
        }
        let body: EmbedResponse = response.json().map_err(|e| e.to_string())?;
        EmbeddingVector::new(body.vector).map_err(|e| e.to_string())
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn embed(&self, context: &str, target: &str) -> Result<EmbeddingVector, ProviderError> {
        let attempts = self.config.retries + 1;
        let mut last = String::new();
        for _ in 0..attempts {
            match self.request_once(context, target) {
                Ok(v) => return Ok(v),
                Err(detail) => last = detail,
            }
        }
        Err(ProviderError::Transport {
            attempts,
            detail: last,
        })
    }
}
