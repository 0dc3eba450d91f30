use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ProviderError, Transport};

/// One recorded request/response exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CassetteEntry {
    pub endpoint: String,
    pub request: Value,
    pub response: Value,
}

/// Serialises `value` with object keys sorted at every level.
pub fn canonical_json(value: &Value) -> String {
    fn sorted(value: &Value) -> Value {
        match value {
            Value::Object(map) => {
                let ordered: BTreeMap<&String, Value> = map.iter().map(|(k, v)| (k, sorted(v))).collect();
                let mut out = serde_json::Map::new();
                for (k, v) in ordered {
                    out.insert(k.clone(), v);
                }
                Value::Object(out)
            }
            Value::Array(items) => Value::Array(items.iter().map(sorted).collect()),
            other => other.clone(),
        }
    }
    serde_json::to_string(&sorted(value)).expect("JSON values always serialise")
}

fn key_of(endpoint: &str, request: &Value) -> String {
    format!("{endpoint} {}", canonical_json(request))
}

/// Answers requests from a recorded transcript; unknown requests are errors.
pub struct CassetteReplay {
    path: String,
    entries: HashMap<String, Value>,
}

impl CassetteReplay {
    pub fn open(path: &Path) -> Result<Self, ProviderError> {
        let fail = |message: String| ProviderError::Cassette {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: CassetteEntry =
                serde_json::from_str(line).map_err(|e| fail(format!("line {}: {e}", i + 1)))?;
            entries.insert(key_of(&entry.endpoint, &entry.request), entry.response);
        }
        Ok(CassetteReplay {
            path: path.display().to_string(),
            entries,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn path(&self) -> &str {
        &self.path
    }
}

impl Transport for CassetteReplay {
    fn post(&self, endpoint: &str, body: &Value) -> Result<Value, ProviderError> {
        let key = key_of(endpoint, body);
        self.entries.get(&key).cloned().ok_or_else(|| ProviderError::CassetteMiss {
            endpoint: endpoint.to_string(),
            key: format!("{:016x}", super::stable_hash(0, &key)),
        })
    }
}

/// Wraps a transport and records every successful exchange.
///
/// Entries are written sorted by request key, so the cassette is identical no
/// matter how concurrent batches interleaved.
pub struct CassetteRecorder<T> {
    inner: T,
    path: PathBuf,
    entries: Mutex<BTreeMap<String, CassetteEntry>>,
}

impl<T: Transport> CassetteRecorder<T> {
    pub fn new(inner: T, path: impl Into<PathBuf>) -> Self {
        CassetteRecorder {
            inner,
            path: path.into(),
            entries: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn save(&self) -> Result<usize, ProviderError> {
        let fail = |message: String| ProviderError::Cassette {
            path: self.path.display().to_string(),
            message,
        };
        let entries = self.entries.lock().expect("recorder lock poisoned");
        let mut out = String::new();
        for entry in entries.values() {
            out.push_str(&serde_json::to_string(entry).map_err(|e| fail(e.to_string()))?);
            out.push('\n');
        }
        if let Some(parent) = self.path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| fail(e.to_string()))?;
        }
        std::fs::write(&self.path, out).map_err(|e| fail(e.to_string()))?;
        Ok(entries.len())
    }
}

impl<T: Transport> Transport for CassetteRecorder<T> {
    fn post(&self, endpoint: &str, body: &Value) -> Result<Value, ProviderError> {
        let response = self.inner.post(endpoint, body)?;
        let entry = CassetteEntry {
            endpoint: endpoint.to_string(),
            request: body.clone(),
            response: response.clone(),
        };
        self.entries
            .lock()
            .expect("recorder lock poisoned")
            .insert(key_of(endpoint, body), entry);
        Ok(response)
    }
}
