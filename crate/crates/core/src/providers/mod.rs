//! Clients for the external model services (label, embedding and NER
//! providers) and the transports they run over.
//!
//! Every client speaks JSON over a [`Transport`]. The HTTP transport talks to
//! a live service; the cassette transports record and replay transcripts; the
//! mock transport answers the same wire protocol in-process and deterministically.

mod cassette;
mod clients;
mod http;
mod mock;

use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

pub use cassette::{canonical_json, CassetteEntry, CassetteRecorder, CassetteReplay};
pub use clients::{
    run_batches, BinaryVerdict, EmbedClient, ItemResult, LabelClient, NerClient, RawMention, StanceVerdict,
};
pub use http::{HttpTransport, RetryPolicy};
pub use mock::{stable_hash, MockProvider, MockRole, GAZETTEER};

pub const BINARY_ENDPOINT: &str = "/v1/label/binary";
pub const STANCE_ENDPOINT: &str = "/v1/label/stance";
pub const EMBED_ENDPOINT: &str = "/v1/embed";
pub const NER_ENDPOINT: &str = "/v1/ner";

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProviderError {
    #[error("{endpoint}: transport failed after {attempts} attempt(s): {message}")]
    Transport {
        endpoint: String,
        attempts: u32,
        message: String,
    },

    #[error("{endpoint}: HTTP {status}: {body}")]
    Status {
        endpoint: String,
        status: u16,
        body: String,
    },

    #[error("{endpoint}: malformed response: {message}")]
    Payload { endpoint: String, message: String },

    #[error("cassette has no recording for {endpoint} (request {key})")]
    CassetteMiss { endpoint: String, key: String },

    #[error("cassette {path}: {message}")]
    Cassette { path: String, message: String },
}

/// Posts a JSON body to a provider endpoint and returns the JSON reply.
pub trait Transport: Send + Sync {
    fn post(&self, endpoint: &str, body: &Value) -> Result<Value, ProviderError>;
}

impl<T: Transport + ?Sized> Transport for Arc<T> {
    fn post(&self, endpoint: &str, body: &Value) -> Result<Value, ProviderError> {
        (**self).post(endpoint, body)
    }
}

impl<T: Transport + ?Sized> Transport for Box<T> {
    fn post(&self, endpoint: &str, body: &Value) -> Result<Value, ProviderError> {
        (**self).post(endpoint, body)
    }
}

impl<T: Transport + ?Sized> Transport for &T {
    fn post(&self, endpoint: &str, body: &Value) -> Result<Value, ProviderError> {
        (**self).post(endpoint, body)
    }
}

pub type SharedTransport = Arc<dyn Transport>;
