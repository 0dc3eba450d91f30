//! Pipeline configuration: one flat `key = value` file, every key
//! overridable through a `QS_`-prefixed environment variable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::answers::SearchConfig;
use crate::error::{Error, Result};
use crate::metrics::SpotCheckPlan;
use crate::triangulate::{AlignMode, SamplePlan};

/// Where provider responses come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    /// Remote services at the configured URLs.
    #[default]
    Http,
    /// The bundled deterministic stand-ins.
    Mock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub articles: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
    pub meta_topics: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Replay provider responses from this directory.
    pub cassette: Option<PathBuf>,
    /// Record provider responses into this directory.
    pub record: Option<PathBuf>,

    pub provider: ProviderKind,
    pub mock_seed: u64,
    pub teacher_url: Option<String>,
    pub binary_url: Option<String>,
    pub stance_url: Option<String>,
    pub embed_url: Option<String>,
    pub ner_url: Option<String>,
    pub request_timeout_secs: u64,

    pub classification_radius: usize,
    pub calibration_fraction: f64,
    pub calibration_per_source: bool,
    pub accent_folding: bool,
    pub teacher_keep: f64,
    pub holdout_fraction: f64,
    pub binary_gate: f64,
    pub stance_gate: f64,
    pub similarity_threshold: f64,
    pub horizon: usize,
    pub window_lengths: Vec<usize>,
    pub ner_threshold: f64,
    pub confidence_sweep: Vec<f64>,
    pub similarity_sweep: Vec<f64>,

    pub seed: Option<u64>,
    pub threads: usize,
    pub lenient: bool,

    pub sample_total: usize,
    pub sample_main_eval: usize,
    pub sample_double_coded: usize,
    pub sample_extension_per_annotator: usize,
    pub sample_main_question_share: f64,
    pub spot_check_total: usize,
    pub spot_check_answered: usize,
    pub spot_check_unanswered: usize,

    pub annotator_a: String,
    pub annotator_b: String,
    pub align_mode: AlignMode,
    pub serve_addr: String,
    pub ui_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let sample = SamplePlan::default();
        let spot = SpotCheckPlan::default();
        PipelineConfig {
            articles: None,
            ontology: None,
            meta_topics: None,
            rules: None,
            gold: None,
            embeddings: None,
            out_dir: PathBuf::from("out"),
            cassette: None,
            record: None,
            provider: ProviderKind::Http,
            mock_seed: 7,
            teacher_url: None,
            binary_url: None,
            stance_url: None,
            embed_url: None,
            ner_url: None,
            request_timeout_secs: 60,
            classification_radius: 3,
            calibration_fraction: crate::candidates::CALIBRATION_FRACTION,
            calibration_per_source: false,
            accent_folding: false,
            teacher_keep: crate::stance::DEFAULT_TEACHER_KEEP,
            holdout_fraction: crate::stance::DEFAULT_HOLDOUT,
            binary_gate: crate::stance::DEFAULT_BINARY_GATE,
            stance_gate: crate::stance::DEFAULT_STANCE_GATE,
            similarity_threshold: crate::answers::DEFAULT_SIMILARITY_THRESHOLD,
            horizon: crate::answers::DEFAULT_HORIZON,
            window_lengths: crate::answers::DEFAULT_WINDOW_LENGTHS.to_vec(),
            ner_threshold: crate::semantics::DEFAULT_NER_THRESHOLD,
            confidence_sweep: crate::metrics::CONFIDENCE_THRESHOLDS.to_vec(),
            similarity_sweep: crate::metrics::SIMILARITY_THRESHOLDS.to_vec(),
            seed: None,
            threads: 1,
            lenient: false,
            sample_total: sample.total,
            sample_main_eval: sample.main_eval,
            sample_double_coded: sample.double_coded,
            sample_extension_per_annotator: sample.extension_per_annotator,
            sample_main_question_share: sample.main_question_share,
            spot_check_total: spot.n_total,
            spot_check_answered: spot.n_answered,
            spot_check_unanswered: spot.n_unanswered,
            annotator_a: "A".into(),
            annotator_b: "B".into(),
            align_mode: AlignMode::Greedy,
            serve_addr: "127.0.0.1:8080".into(),
            ui_dir: None,
        }
    }
}

const ENV_PREFIX: &str = "QS_";

const PATH_KEYS: [&str; 10] = [
    "articles",
    "ontology",
    "meta_topics",
    "rules",
    "gold",
    "embeddings",
    "out_dir",
    "cassette",
    "record",
    "ui_dir",
];

/// Paths written in a config file are relative to that file.
fn resolve_paths(table: &mut toml::Table, base: &Path) {
    for key in PATH_KEYS {
        if let Some(toml::Value::String(s)) = table.get_mut(key) {
            if Path::new(s.as_str()).is_relative() {
                *s = base.join(s.as_str()).to_string_lossy().into_owned();
            }
        }
    }
}

impl PipelineConfig {
    /// Reads `path` (if given), then applies `QS_*` overrides from `env`.
    pub fn load(path: Option<&Path>, env: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let mut table = match path {
            Some(p) => {
                let raw = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                let mut table = raw
                    .parse::<toml::Table>()
                    .map_err(|e| Error::config(format!("{}: {e}", p.display())))?;
                resolve_paths(&mut table, p.parent().unwrap_or(Path::new("")));
                table
            }
            None => toml::Table::new(),
        };
        let defaults = toml::Table::try_from(PipelineConfig::default()).expect("default config serialises");
        let known = Self::keys();
        for (name, value) in env {
            let Some(key) = name.strip_prefix(ENV_PREFIX).map(str::to_ascii_lowercase) else {
                continue;
            };
            if !known.contains(&key) {
                continue;
            }
            let is_list = matches!(defaults.get(&key), Some(toml::Value::Array(_)));
            table.insert(key, env_value(&value, is_list));
        }
        let cfg: PipelineConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every configuration key, in declaration order.
    pub fn keys() -> Vec<String> {
        // Optional keys are absent from a serialised default, so list them here.
        const OPTIONAL: [&str; 15] = [
            "articles",
            "ontology",
            "meta_topics",
            "rules",
            "gold",
            "embeddings",
            "cassette",
            "record",
            "teacher_url",
            "binary_url",
            "stance_url",
            "embed_url",
            "ner_url",
            "seed",
            "ui_dir",
        ];
        let defaults = toml::Table::try_from(PipelineConfig::default()).expect("default config serialises");
        let mut keys: Vec<String> = defaults.keys().cloned().collect();
        keys.extend(OPTIONAL.iter().map(|s| s.to_string()));
        keys
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64, lo_open: bool| {
            let ok = if lo_open { v > 0.0 && v <= 1.0 } else { (0.0..=1.0).contains(&v) };
            if ok {
                Ok(())
            } else {
                Err(Error::config(format!("{name} = {v} is outside its range")))
            }
        };
        unit("teacher_keep", self.teacher_keep, true)?;
        unit("binary_gate", self.binary_gate, false)?;
        unit("stance_gate", self.stance_gate, false)?;
        unit("ner_threshold", self.ner_threshold, false)?;
        unit("calibration_fraction", self.calibration_fraction, false)?;
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return Err(Error::config(format!("holdout_fraction = {} is outside [0, 1)", self.holdout_fraction)));
        }
        if self.threads == 0 {
            return Err(Error::config("threads must be at least 1"));
        }
        if self.cassette.is_some() && self.record.is_some() {
            return Err(Error::config("cassette replay and recording are mutually exclusive"));
        }
        self.search().validate()?;
        self.sample_plan().validate()?;
        self.spot_check_plan().validate()
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            horizon: self.horizon,
            window_lengths: self.window_lengths.clone(),
            similarity_threshold: self.similarity_threshold,
            stance_gate: self.stance_gate,
        }
    }

    pub fn sample_plan(&self) -> SamplePlan {
        SamplePlan {
            total: self.sample_total,
            main_eval: self.sample_main_eval,
            double_coded: self.sample_double_coded,
            extension_per_annotator: self.sample_extension_per_annotator,
            main_question_share: self.sample_main_question_share,
        }
    }

    pub fn spot_check_plan(&self) -> SpotCheckPlan {
        SpotCheckPlan {
            n_total: self.spot_check_total,
            n_answered: self.spot_check_answered,
            n_unanswered: self.spot_check_unanswered,
        }
    }

    /// The seed, required by every command that samples.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::config("this command samples and needs a seed (--seed or QS_SEED)"))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

/// Environment values are TOML literals when they parse as one, plain
/// strings otherwise; list keys also accept bare comma-separated items.
fn env_value(raw: &str, is_list: bool) -> toml::Value {
    let parse = |s: &str| {
        format!("v = {s}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
    };
    if is_list && !raw.trim_start().starts_with('[') {
        if let Some(v) = parse(&format!("[{raw}]")) {
            return v;
        }
    }
    parse(raw).unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
