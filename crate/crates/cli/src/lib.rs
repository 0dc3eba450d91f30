//! Command-line front end: argument parsing, config assembly, stage dispatch
//! and the annotation server.

pub mod server;

use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qstance_core::config::{PipelineConfig, ProviderKind};
use qstance_core::pipeline::{self, Providers};
use qstance_core::report::resolve_table_names;
use qstance_core::{Error, ErrorKind};

#[derive(Debug, Parser)]
#[command(name = "qstance", version, about = "Interrogative stance pipeline for French news")]
pub struct Cli {
    /// Config file (flat key = value TOML); QS_* variables override it.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replay provider responses from this cassette directory.
    #[arg(long, global = true)]
    pub cassette: Option<PathBuf>,
    /// Record provider responses into this cassette directory.
    #[arg(long, global = true)]
    pub record: Option<PathBuf>,
    /// Skip malformed input lines instead of failing.
    #[arg(long, global = true)]
    pub lenient: bool,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory for every stage.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Use the bundled deterministic providers instead of HTTP services.
    #[arg(long, global = true)]
    pub mock: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Confidence,
    Similarity,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read, validate and segment the corpus.
    Ingest,
    /// Flag interrogative candidates and draw the calibration sample.
    Candidates,
    /// Label candidates with the teacher model.
    PseudoLabel,
    /// Write the student training and validation sets.
    ExportTrain,
    /// Run the two-step student classifier over every sentence.
    Infer,
    /// Search answers for question groups.
    Answers,
    /// Tag entities in questions and answers.
    Entities,
    /// Compute per-article indices.
    Indices,
    /// Write report tables.
    Report {
        /// Comma-separated table names (e.g. stance-global, 4, fig3); all by default.
        #[arg(long)]
        table: Option<String>,
    },
    /// Threshold sensitivity table.
    Sweep {
        #[arg(long, value_enum)]
        kind: SweepKind,
    },
    /// Draw the stratified coding sample.
    Sample,
    /// Draw the answer-search audit sheet.
    SpotCheck,
    /// Evaluate predictions against gold and coders against each other.
    Eval,
    /// Serve the annotation API.
    Serve {
        /// Listen address; defaults to serve_addr.
        #[arg(long)]
        addr: Option<String>,
    },
    /// Run every stage in order.
    Pipeline,
    /// Print the effective configuration.
    Config,
}

impl Cli {
    /// Config file, then QS_* variables, then command-line flags.
    pub fn config(&self, env: impl IntoIterator<Item = (String, String)>) -> qstance_core::Result<PipelineConfig> {
        let mut cfg = PipelineConfig::load(self.config.as_deref(), env)?;
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if let Some(c) = &self.cassette {
            cfg.cassette = Some(c.clone());
        }
        if let Some(r) = &self.record {
            cfg.record = Some(r.clone());
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        cfg.lenient |= self.lenient;
        if self.mock {
            cfg.provider = ProviderKind::Mock;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one command and returns its JSON summary.
pub fn run(cli: &Cli, cfg: &PipelineConfig) -> anyhow::Result<Value> {
    let providers = Providers::from_config(cfg)?;
    let value = match &cli.command {
        Command::Ingest => json!(pipeline::ingest(cfg)?),
        Command::Candidates => json!(pipeline::candidates(cfg)?),
        Command::PseudoLabel => json!({ "pseudo_labels": pipeline::pseudo_label(cfg, &providers)? }),
        Command::ExportTrain => json!(pipeline::export_train(cfg)?),
        Command::Infer => json!({ "predictions": pipeline::infer(cfg, &providers)? }),
        Command::Answers => json!(pipeline::answers(cfg, &providers)?),
        Command::Entities => json!({ "entity_records": pipeline::entities(cfg, &providers)? }),
        Command::Indices => json!({ "articles": pipeline::indices(cfg)?.len() }),
        Command::Report { table } => {
            let only = table.as_deref().map(resolve_table_names).transpose()?;
            let tables = pipeline::report(cfg, only.as_ref())?;
            if tables.is_empty() {
                return Err(Error::data("no table could be built; run the earlier stages first").into());
            }
            json!({ "tables": tables.iter().map(|t| t.file_name()).collect::<Vec<_>>() })
        }
        Command::Sweep { kind } => {
            let name = match kind {
                SweepKind::Confidence => "table5_confidence",
                SweepKind::Similarity => "table6_similarity",
            };
            let tables = pipeline::report(cfg, Some(&[name].into_iter().collect()))?;
            let t = tables
                .first()
                .ok_or_else(|| Error::data("sweep inputs are missing; run `infer` and `answers` first"))?;
            json!({ "table": t.file_name(), "rows": t.rows })
        }
        Command::Sample => {
            let m = pipeline::sample(cfg)?;
            json!({ "assignments": m.assignments.len(), "warnings": m.warnings })
        }
        Command::SpotCheck => json!(pipeline::spot_check(cfg)?),
        Command::Eval => json!(pipeline::eval(cfg)?),
        Command::Serve { addr } => {
            let addr = addr.clone().unwrap_or_else(|| cfg.serve_addr.clone());
            server::serve(cfg, &addr).context("annotation server failed")?;
            json!({ "served": addr })
        }
        Command::Pipeline => json!(pipeline::run_all(cfg, &providers)?),
        Command::Config => json!({ "config": cfg.to_toml() }),
    };
    providers.finish()?;
    Ok(value)
}

/// Exit status for an error: 2 config, 3 provider, 4 data, 1 anything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()).map(Error::kind) {
        Some(ErrorKind::Config) => 2,
        Some(ErrorKind::Provider) => 3,
        Some(ErrorKind::Data) => 4,
        None => 1,
    }
}

/// Machine-readable error line written to stderr on failure.
pub fn error_summary(err: &anyhow::Error) -> Value {
    let kind = match exit_code(err) {
        2 => "config",
        3 => "provider",
        4 => "data",
        _ => "internal",
    };
    json!({
        "error": kind,
        "exit_code": exit_code(err),
        "message": format!("{err:#}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cli = Cli::parse_from(["qstance", "--seed", "5", "--threads", "3", "--mock", "sample"]);
        let cfg = cli.config(vec![("QS_SEED".to_string(), "9".to_string())]).unwrap();
        assert_eq!(cfg.seed, Some(5));
        assert_eq!(cfg.threads, 3);
        assert_eq!(cfg.provider, ProviderKind::Mock);
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::config("x").into()), 2);
        assert_eq!(exit_code(&Error::data("x").into()), 4);
        assert_eq!(exit_code(&anyhow::Error::from(Error::data("x")).context("stage")), 4);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), 1);
        assert_eq!(error_summary(&Error::config("bad").into())["error"], "config");
    }

    #[test]
    fn missing_stage_is_a_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let cli = Cli::parse_from(["qstance", "--mock", "--seed", "1", "candidates"]);
        let mut cfg = cli.config(Vec::<(String, String)>::new()).unwrap();
        cfg.out_dir = dir.path().to_path_buf();
        assert_eq!(exit_code(&run(&cli, &cfg).unwrap_err()), 4);
    }
}
