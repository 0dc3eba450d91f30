//! File-backed stages. Each stage reads the outputs of earlier stages from
//! the output directory and writes its own, so any stage can be rerun alone.

mod stages;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use tracing::info;

pub use stages::{
    answers, candidates, eval, entities, export_train, indices, infer, ingest, pseudo_label, report, run_all, sample,
    spot_check, AnswersSummary, CandidatesSummary, EvalReport, RunSummary, SpotCheckSummary,
};

use crate::config::{PipelineConfig, ProviderKind};
use crate::error::{Error, Result};
use crate::providers::{
    CassetteRecorder, CassetteReplay, HttpTransport, MockProvider, MockRole, RetryPolicy, SharedTransport,
};

/// Paths of every stage output under the output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn articles(&self) -> PathBuf {
        self.file("articles.jsonl")
    }
    pub fn sentences(&self) -> PathBuf {
        self.file("sentences.jsonl")
    }
    pub fn ingest_report(&self) -> PathBuf {
        self.file("ingest_report.json")
    }
    pub fn candidates(&self) -> PathBuf {
        self.file("candidates.jsonl")
    }
    pub fn pseudo_labels(&self) -> PathBuf {
        self.file("pseudo_labels.jsonl")
    }
    pub fn teacher_failures(&self) -> PathBuf {
        self.file("teacher_failures.jsonl")
    }
    pub fn sample_manifest(&self) -> PathBuf {
        self.file("sample_manifest.json")
    }
    pub fn sample_csv(&self) -> PathBuf {
        self.file("sample_manifest.csv")
    }
    pub fn training_dir(&self) -> PathBuf {
        self.file("training")
    }
    pub fn predictions(&self) -> PathBuf {
        self.file("predictions.jsonl")
    }
    pub fn inference_failures(&self) -> PathBuf {
        self.file("inference_failures.jsonl")
    }
    pub fn qa(&self) -> PathBuf {
        self.file("qa.jsonl")
    }
    pub fn answer_groups(&self) -> PathBuf {
        self.file("answer_groups.jsonl")
    }
    pub fn answers_report(&self) -> PathBuf {
        self.file("answers_report.json")
    }
    pub fn entities(&self) -> PathBuf {
        self.file("entities.jsonl")
    }
    pub fn indices_jsonl(&self) -> PathBuf {
        self.file("article_indices.jsonl")
    }
    pub fn indices_csv(&self) -> PathBuf {
        self.file("article_indices.csv")
    }
    pub fn spot_check(&self) -> PathBuf {
        self.file("spot_check.csv")
    }
    pub fn eval(&self) -> PathBuf {
        self.file("eval.json")
    }
    pub fn tables_dir(&self) -> PathBuf {
        self.file("tables")
    }
}

/// The five provider roles. Teacher and student speak the same wire protocol,
/// so each role records into its own cassette file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Teacher,
    Binary,
    Stance,
    Embed,
    Ner,
}

impl Role {
    pub const ALL: [Role; 5] = [Role::Teacher, Role::Binary, Role::Stance, Role::Embed, Role::Ner];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Teacher => "teacher",
            Role::Binary => "binary",
            Role::Stance => "stance",
            Role::Embed => "embed",
            Role::Ner => "ner",
        }
    }

    pub fn cassette_file(self) -> String {
        format!("{}.jsonl", self.as_str())
    }

    fn url(self, cfg: &PipelineConfig) -> Option<&str> {
        match self {
            Role::Teacher => cfg.teacher_url.as_deref(),
            Role::Binary => cfg.binary_url.as_deref(),
            Role::Stance => cfg.stance_url.as_deref(),
            Role::Embed => cfg.embed_url.as_deref(),
            Role::Ner => cfg.ner_url.as_deref(),
        }
    }
}

type Recorder = CassetteRecorder<SharedTransport>;

/// Builds one transport per role from the configuration: live HTTP or the
/// in-process mock, optionally recorded, or a cassette replay.
pub struct Providers {
    cfg: PipelineConfig,
    built: Mutex<HashMap<Role, SharedTransport>>,
    recorders: Mutex<Vec<Arc<Recorder>>>,
}

impl Providers {
    pub fn from_config(cfg: &PipelineConfig) -> Result<Self> {
        if cfg.cassette.is_some() && cfg.record.is_some() {
            return Err(Error::config("--cassette and --record are mutually exclusive"));
        }
        Ok(Providers {
            cfg: cfg.clone(),
            built: Mutex::new(HashMap::new()),
            recorders: Mutex::new(Vec::new()),
        })
    }

    /// The transport of `role`, built on first use and shared afterwards.
    pub fn transport(&self, role: Role) -> Result<SharedTransport> {
        let mut built = self.built.lock().expect("provider lock poisoned");
        if let Some(t) = built.get(&role) {
            return Ok(t.clone());
        }
        let t = self.build(role)?;
        built.insert(role, t.clone());
        Ok(t)
    }

    fn build(&self, role: Role) -> Result<SharedTransport> {
        if let Some(dir) = &self.cfg.cassette {
            let replay = CassetteReplay::open(&dir.join(role.cassette_file()))?;
            info!(role = role.as_str(), entries = replay.len(), "replaying cassette");
            return Ok(Arc::new(replay));
        }
        let base: SharedTransport = match self.cfg.provider {
            ProviderKind::Mock => {
                let mock_role = if role == Role::Teacher { MockRole::Teacher } else { MockRole::Student };
                Arc::new(MockProvider::new(mock_role, self.cfg.mock_seed))
            }
            ProviderKind::Http => {
                let url = role.url(&self.cfg).ok_or_else(|| {
                    Error::config(format!(
                        "no URL for the {} provider; set QS_{}_URL or {}_url",
                        role.as_str(),
                        role.as_str().to_uppercase(),
                        role.as_str()
                    ))
                })?;
                let timeout = Duration::from_secs(self.cfg.request_timeout_secs);
                Arc::new(HttpTransport::with_retry(url, RetryPolicy::default(), timeout)?)
            }
        };
        match &self.cfg.record {
            Some(dir) => {
                let rec = Arc::new(CassetteRecorder::new(base, dir.join(role.cassette_file())));
                self.recorders.lock().expect("provider lock poisoned").push(rec.clone());
                Ok(rec)
            }
            None => Ok(base),
        }
    }

    /// Writes every recorded cassette; returns the number of entries saved.
    pub fn finish(&self) -> Result<usize> {
        let mut total = 0;
        for rec in self.recorders.lock().expect("provider lock poisoned").iter() {
            total += rec.save()?;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::Transport;
    use serde_json::json;

    #[test]
    fn http_without_url_is_a_config_error() {
        let p = Providers::from_config(&PipelineConfig::default()).unwrap();
        let err = p.transport(Role::Embed).err().unwrap();
        assert_eq!(err.kind(), crate::ErrorKind::Config);
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            provider: ProviderKind::Mock,
            record: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let p = Providers::from_config(&cfg).unwrap();
        let body = json!({ "texts": ["Pourquoi ?"] });
        let live = p.transport(Role::Embed).unwrap().post("/v1/embed", &body).unwrap();
        assert_eq!(p.finish().unwrap(), 1);

        let cfg = PipelineConfig {
            cassette: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let p = Providers::from_config(&cfg).unwrap();
        assert_eq!(p.transport(Role::Embed).unwrap().post("/v1/embed", &body).unwrap(), live);
        assert!(p.transport(Role::Teacher).is_err());
    }
}
