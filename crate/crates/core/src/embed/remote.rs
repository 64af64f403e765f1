//! HTTP client for the embedding service.
//!
//! `POST {base}/embed` with `{"model": str, "texts": [str]}` answers
//! `200 {"dim": int, "vectors": [[float]]}`; any other status carries
//! `{"error": str}`. At most [`MAX_BATCH`] texts go in one request.

use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbedError, EmbeddingProvider, ProviderDescriptor};

pub const MAX_BATCH: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub model: String,
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub dim: usize,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub error: String,
}

/// Retries apply to transport failures, 5xx and 429. The delay doubles
/// after every failed attempt.
#[derive(Debug, Clone, Copy)]
pub struct RetryPolicy {
    pub retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            retries: 3,
            base_delay: Duration::from_millis(250),
        }
    }
}

pub struct RemoteEmbedder {
    descriptor: ProviderDescriptor,
    endpoint: String,
    agent: ureq::Agent,
    retry: RetryPolicy,
}

impl RemoteEmbedder {
    pub fn new(descriptor: ProviderDescriptor, base_url: &str) -> Self {
        Self::with_retry(descriptor, base_url, RetryPolicy::default())
    }

    pub fn with_retry(descriptor: ProviderDescriptor, base_url: &str, retry: RetryPolicy) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout_connect(Duration::from_secs(10))
            .timeout(Duration::from_secs(300))
            .build();
        RemoteEmbedder {
            descriptor,
            endpoint: format!("{}/embed", base_url.trim_end_matches('/')),
            agent,
            retry,
        }
    }

    fn post(&self, texts: &[&str]) -> Result<EmbedResponse, EmbedError> {
        let req = EmbedRequest {
            model: self.descriptor.name.clone(),
            texts: texts.iter().map(|s| s.to_string()).collect(),
        };
        let attempts = self.retry.retries + 1;
        let mut delay = self.retry.base_delay;
        let mut last_error = String::new();
        for attempt in 1..=attempts {
            match self.agent.post(&self.endpoint).send_json(&req) {
                Ok(resp) => {
                    return resp.into_json::<EmbedResponse>().map_err(|e| {
                        EmbedError::RemoteRejected {
                            status: 200,
                            message: format!("malformed response body: {e}"),
                        }
                    })
                }
                Err(ureq::Error::Status(status, resp)) => {
                    let message = resp
                        .into_json::<ErrorResponse>()
                        .map(|e| e.error)
                        .unwrap_or_else(|_| "no error body".to_string());
                    if status < 500 && status != 429 {
                        return Err(EmbedError::RemoteRejected { status, message });
                    }
                    last_error = format!("HTTP {status}: {message}");
                }
                Err(ureq::Error::Transport(t)) => last_error = t.to_string(),
            }
            if attempt < attempts {
                log::debug!("embed request attempt {attempt} failed: {last_error}; retrying");
                thread::sleep(delay);
                delay *= 2;
            }
        }
        Err(EmbedError::RemoteUnavailable {
            attempts,
            last_error,
        })
    }
}

impl EmbeddingProvider for RemoteEmbedder {
    fn descriptor(&self) -> &ProviderDescriptor {
        &self.descriptor
    }

    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let dim = self.descriptor.dim;
        let mut out = Vec::with_capacity(texts.len());
        for batch in texts.chunks(MAX_BATCH) {
            let resp = self.post(batch)?;
            if resp.dim != dim {
                return Err(EmbedError::DimensionMismatch {
                    expected: dim,
                    got: resp.dim,
                });
            }
            if resp.vectors.len() != batch.len() {
                return Err(EmbedError::CountMismatch {
                    expected: batch.len(),
                    got: resp.vectors.len(),
                });
            }
            if let Some(v) = resp.vectors.iter().find(|v| v.len() != dim) {
                return Err(EmbedError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            out.extend(resp.vectors);
        }
        Ok(out)
    }
}
