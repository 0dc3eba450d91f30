use std::time::Duration;

use serde_json::Value;
use tracing::warn;

use super::{ProviderError, Transport};

/// Bounded exponential backoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 4,
            base_delay: Duration::from_millis(250),
            max_delay: Duration::from_secs(4),
        }
    }
}

impl RetryPolicy {
    pub fn delay(&self, attempt: u32) -> Duration {
        let factor = 1u32 << attempt.min(16);
        (self.base_delay * factor).min(self.max_delay)
    }
}

/// Blocking HTTP transport rooted at a base URL.
pub struct HttpTransport {
    base_url: String,
    client: reqwest::blocking::Client,
    retry: RetryPolicy,
}

impl HttpTransport {
    pub fn new(base_url: impl Into<String>) -> Result<Self, ProviderError> {
        Self::with_retry(base_url, RetryPolicy::default(), Duration::from_secs(120))
    }

    pub fn with_retry(base_url: impl Into<String>, retry: RetryPolicy, timeout: Duration) -> Result<Self, ProviderError> {
        let base_url = base_url.into().trim_end_matches('/').to_string();
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ProviderError::Transport {
                endpoint: base_url.clone(),
                attempts: 0,
                message: e.to_string(),
            })?;
        Ok(HttpTransport { base_url, client, retry })
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }
}

fn retryable(status: reqwest::StatusCode) -> bool {
    status.is_server_error() || status == reqwest::StatusCode::TOO_MANY_REQUESTS
}

impl Transport for HttpTransport {
    fn post(&self, endpoint: &str, body: &Value) -> Result<Value, ProviderError> {
        let url = format!("{}{}", self.base_url, endpoint);
        let attempts = self.retry.max_attempts.max(1);
        let mut last = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                std::thread::sleep(self.retry.delay(attempt - 1));
            }
            let response = match self.client.post(&url).json(body).send() {
                Ok(r) => r,
                Err(e) => {
                    warn!(%url, attempt, error = %e, "provider request failed");
                    last = e.to_string();
                    continue;
                }
            };
            let status = response.status();
            if retryable(status) {
                warn!(%url, attempt, %status, "provider returned retryable status");
                last = format!("HTTP {status}");
                continue;
            }
            let text = response.text().map_err(|e| ProviderError::Payload {
                endpoint: endpoint.to_string(),
                message: e.to_string(),
            })?;
            if !status.is_success() {
                return Err(ProviderError::Status {
                    endpoint: endpoint.to_string(),
                    status: status.as_u16(),
                    body: text,
                });
            }
            return serde_json::from_str(&text).map_err(|e| ProviderError::Payload {
                endpoint: endpoint.to_string(),
                message: e.to_string(),
            });
        }
        Err(ProviderError::Transport {
            endpoint: endpoint.to_string(),
            attempts,
            message: last,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_is_bounded() {
        let policy = RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_millis(100),
            max_delay: Duration::from_millis(500),
        };
        assert_eq!(policy.delay(0), Duration::from_millis(100));
        assert_eq!(policy.delay(1), Duration::from_millis(200));
        assert_eq!(policy.delay(3), Duration::from_millis(500));
        assert_eq!(policy.delay(30), Duration::from_millis(500));
    }

    #[test]
    fn unreachable_host_fails_after_all_attempts() {
        let retry = RetryPolicy {
            max_attempts: 2,
            base_delay: Duration::from_millis(1),
            max_delay: Duration::from_millis(1),
        };
        // Port 9 (discard) on localhost is closed in the sandbox.
        let t = HttpTransport::with_retry("http://127.0.0.1:9", retry, Duration::from_secs(2)).unwrap();
        match t.post("/v1/embed", &serde_json::json!({"texts": []})) {
            Err(ProviderError::Transport { attempts, .. }) => assert_eq!(attempts, 2),
            other => panic!("expected transport error, got {other:?}"),
        }
    }
}
