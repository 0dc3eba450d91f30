use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{ProviderError, Transport, BINARY_ENDPOINT, EMBED_ENDPOINT, NER_ENDPOINT, STANCE_ENDPOINT};
use crate::labels::StanceLabel;

/// Per-item outcome: a parsed value or a message explaining why the item was rejected.
pub type ItemResult<T> = Result<T, String>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryVerdict {
    pub is_interrogative: bool,
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StanceVerdict {
    pub label: StanceLabel,
    pub confidence: f64,
}

/// A mention as returned by the NER provider, before thresholding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMention {
    pub text: String,
    pub label: String,
    pub score: f64,
    pub start: usize,
    pub end: usize,
}

/// Splits `items` into batches and runs `call` on them with at most
/// `max_in_flight` batches outstanding. Output order follows input order.
/// The first failing batch aborts the run.
pub fn run_batches<I, O, F>(items: &[I], batch_size: usize, max_in_flight: usize, call: F) -> Result<Vec<O>, ProviderError>
where
    I: Sync,
    O: Send,
    F: Fn(&[I]) -> Result<Vec<O>, ProviderError> + Sync,
{
    let batches: Vec<&[I]> = items.chunks(batch_size.max(1)).collect();
    let mut out = Vec::with_capacity(items.len());
    for wave in batches.chunks(max_in_flight.max(1)) {
        let results: Vec<Result<Vec<O>, ProviderError>> = if wave.len() == 1 {
            vec![call(wave[0])]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = wave.iter().map(|batch| scope.spawn(|| call(batch))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("provider batch thread panicked"))
                    .collect()
            })
        };
        for r in results {
            out.extend(r?);
        }
    }
    Ok(out)
}

fn payload(endpoint: &str, message: impl Into<String>) -> ProviderError {
    ProviderError::Payload {
        endpoint: endpoint.to_string(),
        message: message.into(),
    }
}

fn results_array(endpoint: &str, reply: Value, expected: usize) -> Result<Vec<Value>, ProviderError> {
    let results = match reply {
        Value::Object(mut map) => map.remove("results"),
        _ => None,
    };
    match results {
        Some(Value::Array(items)) if items.len() == expected => Ok(items),
        Some(Value::Array(items)) => Err(payload(
            endpoint,
            format!("expected {expected} results, got {}", items.len()),
        )),
        _ => Err(payload(endpoint, "missing \"results\" array")),
    }
}

/// Strips a Markdown code fence some chat models wrap around JSON.
fn unfence(text: &str) -> &str {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("```") else {
        return t;
    };
    let rest = rest.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    rest.strip_suffix("```").unwrap_or(rest).trim()
}

fn parse_item<T: serde::de::DeserializeOwned>(value: Value) -> ItemResult<T> {
    let value = match value {
        Value::String(s) => {
            serde_json::from_str(unfence(&s)).map_err(|e| format!("unparsable provider payload: {e}"))?
        }
        v => v,
    };
    serde_json::from_value(value).map_err(|e| format!("unexpected item shape: {e}"))
}

fn check_confidence(c: f64) -> ItemResult<()> {
    if c.is_finite() && (0.0..=1.0).contains(&c) {
        Ok(())
    } else {
        Err(format!("confidence {c} outside [0, 1]"))
    }
}

/// Client for the binary and stance label endpoints.
pub struct LabelClient<T> {
    transport: T,
    pub batch_size: usize,
    pub max_in_flight: usize,
}

impl<T: Transport> LabelClient<T> {
    pub fn new(transport: T) -> Self {
        LabelClient {
            transport,
            batch_size: 32,
            max_in_flight: 4,
        }
    }

    pub fn with_limits(mut self, batch_size: usize, max_in_flight: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self.max_in_flight = max_in_flight.max(1);
        self
    }

    fn label<V: Send>(
        &self,
        endpoint: &str,
        contexts: &[String],
        parse: impl Fn(Value) -> ItemResult<V> + Sync,
    ) -> Result<Vec<ItemResult<V>>, ProviderError> {
        run_batches(contexts, self.batch_size, self.max_in_flight, |batch| {
            let items: Vec<Value> = batch.iter().map(|c| json!({ "context_text": c })).collect();
            let reply = self.transport.post(endpoint, &json!({ "items": items }))?;
            Ok(results_array(endpoint, reply, batch.len())?.into_iter().map(&parse).collect())
        })
    }

    pub fn binary(&self, contexts: &[String]) -> Result<Vec<ItemResult<BinaryVerdict>>, ProviderError> {
        self.label(BINARY_ENDPOINT, contexts, |v| {
            let verdict: BinaryVerdict = parse_item(v)?;
            check_confidence(verdict.confidence)?;
            Ok(verdict)
        })
    }

    pub fn stance(&self, contexts: &[String]) -> Result<Vec<ItemResult<StanceVerdict>>, ProviderError> {
        self.label(STANCE_ENDPOINT, contexts, |v| {
            let verdict: StanceVerdict = parse_item(v)?;
            check_confidence(verdict.confidence)?;
            Ok(verdict)
        })
    }
}

/// Client for the sentence embedding endpoint.
pub struct EmbedClient<T> {
    transport: T,
    pub batch_size: usize,
    pub max_in_flight: usize,
}

#[derive(Deserialize)]
struct EmbedReply {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl<T: Transport> EmbedClient<T> {
    pub fn new(transport: T) -> Self {
        EmbedClient {
            transport,
            batch_size: 64,
            max_in_flight: 4,
        }
    }

    pub fn with_limits(mut self, batch_size: usize, max_in_flight: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self.max_in_flight = max_in_flight.max(1);
        self
    }

    /// Raw provider vectors, one per text. Dimension agreement within each
    /// batch is checked here; normalisation is left to the caller.
    pub fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, ProviderError> {
        run_batches(texts, self.batch_size, self.max_in_flight, |batch| {
            let reply = self.transport.post(EMBED_ENDPOINT, &json!({ "texts": batch }))?;
            let reply: EmbedReply =
                serde_json::from_value(reply).map_err(|e| payload(EMBED_ENDPOINT, e.to_string()))?;
            if reply.vectors.len() != batch.len() {
                return Err(payload(
                    EMBED_ENDPOINT,
                    format!("expected {} vectors, got {}", batch.len(), reply.vectors.len()),
                ));
            }
            if let Some(bad) = reply.vectors.iter().find(|v| v.len() != reply.dim) {
                return Err(payload(
                    EMBED_ENDPOINT,
                    format!("dimension mismatch: declared {}, got {}", reply.dim, bad.len()),
                ));
            }
            Ok(reply.vectors)
        })
    }
}

/// Client for the entity recognition endpoint.
pub struct NerClient<T> {
    transport: T,
    labels: Vec<String>,
    pub batch_size: usize,
    pub max_in_flight: usize,
}

impl<T: Transport> NerClient<T> {
    pub fn new(transport: T, labels: Vec<String>) -> Self {
        NerClient {
            transport,
            labels,
            batch_size: 16,
            max_in_flight: 4,
        }
    }

    pub fn with_limits(mut self, batch_size: usize, max_in_flight: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self.max_in_flight = max_in_flight.max(1);
        self
    }

    pub fn annotate(&self, texts: &[String]) -> Result<Vec<Vec<RawMention>>, ProviderError> {
        run_batches(texts, self.batch_size, self.max_in_flight, |batch| {
            let items: Vec<Value> = batch
                .iter()
                .map(|t| json!({ "text": t, "labels": self.labels }))
                .collect();
            let reply = self.transport.post(NER_ENDPOINT, &json!({ "items": items }))?;
            results_array(NER_ENDPOINT, reply, batch.len())?
                .into_iter()
                .map(|v| serde_json::from_value(v).map_err(|e| payload(NER_ENDPOINT, e.to_string())))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct Canned(Value);

    impl Transport for Canned {
        fn post(&self, _: &str, _: &Value) -> Result<Value, ProviderError> {
            Ok(self.0.clone())
        }
    }

    #[test]
    fn batches_keep_input_order() {
        let items: Vec<usize> = (0..103).collect();
        let calls = AtomicUsize::new(0);
        let out = run_batches(&items, 10, 4, |b| {
            calls.fetch_add(1, Ordering::SeqCst);
            std::thread::sleep(std::time::Duration::from_millis((10 - b.len() as u64 % 10) % 3));
            Ok(b.iter().map(|x| x * 2).collect())
        })
        .unwrap();
        assert_eq!(out, items.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert_eq!(calls.load(Ordering::SeqCst), 11);
    }

    #[test]
    fn failing_batch_fails_the_run() {
        let items: Vec<usize> = (0..20).collect();
        let r = run_batches(&items, 5, 2, |b| {
            if b[0] == 10 {
                Err(payload("/x", "boom"))
            } else {
                Ok(b.to_vec())
            }
        });
        assert!(r.is_err());
    }

    #[test]
    fn unparsable_items_do_not_sink_the_batch() {
        let reply = json!({"results": [
            {"is_interrogative": true, "confidence": 0.8},
            "I think this is a question",
            "```json\n{\"is_interrogative\": false, \"confidence\": 0.95}\n```",
            {"is_interrogative": true, "confidence": 1.7}
        ]});
        let client = LabelClient::new(Canned(reply));
        let ctx: Vec<String> = (0..4).map(|i| format!("<tgt>S{i}</tgt>")).collect();
        let out = client.binary(&ctx).unwrap();
        assert_eq!(
            out[0],
            Ok(BinaryVerdict {
                is_interrogative: true,
                confidence: 0.8
            })
        );
        assert!(out[1].as_ref().unwrap_err().contains("unparsable"));
        assert_eq!(out[2].as_ref().unwrap().confidence, 0.95);
        assert!(out[3].is_err());
    }

    #[test]
    fn result_count_mismatch_is_a_batch_error() {
        let client = LabelClient::new(Canned(json!({"results": []})));
        let err = client.binary(&["x".to_string()]).unwrap_err();
        assert!(matches!(err, ProviderError::Payload { .. }));
    }

    #[test]
    fn embed_rejects_mixed_dimensions() {
        let client = EmbedClient::new(Canned(json!({"dim": 2, "vectors": [[1.0, 0.0], [1.0, 0.0, 0.0]]})));
        let err = client.embed(&["a".into(), "b".into()]).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"));
    }

    #[test]
    fn stance_labels_parse_from_wire_strings() {
        let client = LabelClient::new(Canned(json!({"results": [
            {"label": "echo-clarification", "confidence": 0.5},
            {"label": "curious", "confidence": 0.5}
        ]})));
        let out = client.stance(&["a".into(), "b".into()]).unwrap();
        assert_eq!(out[0].as_ref().unwrap().label, StanceLabel::EchoClarification);
        assert!(out[1].is_err());
    }
}
