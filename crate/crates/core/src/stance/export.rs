use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{TrainingRow, TrainingTask};
use crate::error::{Error, Result};
use crate::io::write_jsonl;

pub const DEFAULT_HOLDOUT: f64 = 0.10;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub validation: usize,
}

/// Per-label row counts of one task.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingSplit {
    pub train: BTreeMap<String, usize>,
    pub validation: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub seed: u64,
    pub holdout_fraction: f64,
    pub articles: SplitCounts,
    pub excluded_articles: usize,
    pub binary: TrainingSplit,
    pub stance: TrainingSplit,
}

#[derive(Serialize)]
struct ExportRow<'a> {
    context_text: &'a str,
    label: &'a str,
}

/// Splits article ids into (train, validation). The validation share is
/// `round(holdout × n)`; the shuffle runs over the sorted ids so input order
/// does not matter.
pub fn split_articles(ids: &BTreeSet<String>, holdout: f64, seed: u64) -> Result<(BTreeSet<String>, BTreeSet<String>)> {
    if !(0.0..1.0).contains(&holdout) {
        return Err(Error::config(format!("holdout fraction {holdout} outside [0, 1)")));
    }
    let mut order: Vec<&String> = ids.iter().collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = ((holdout * order.len() as f64).round() as usize).min(order.len());
    let validation = order[..n_val].iter().map(|s| (*s).clone()).collect();
    let train = order[n_val..].iter().map(|s| (*s).clone()).collect();
    Ok((train, validation))
}

/// Writes `{binary,stance}_{train,validation}.jsonl` and `manifest.json` into
/// `out_dir`. `contexts` maps each row key to its radius-3 context text.
pub fn export_training_set(
    rows: &[TrainingRow],
    contexts: &HashMap<(String, u32), String>,
    exclusion: &BTreeSet<String>,
    holdout: f64,
    seed: u64,
    out_dir: &Path,
) -> Result<TrainingManifest> {
    let kept: Vec<&TrainingRow> = rows.iter().filter(|r| !exclusion.contains(&r.article_id)).collect();
    if kept.is_empty() {
        return Err(Error::data("no training rows left after excluding evaluation articles"));
    }
    let excluded_articles = rows
        .iter()
        .filter(|r| exclusion.contains(&r.article_id))
        .map(|r| r.article_id.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    let ids: BTreeSet<String> = kept.iter().map(|r| r.article_id.clone()).collect();
    let (train_ids, val_ids) = split_articles(&ids, holdout, seed)?;

    let mut sorted = kept;
    sorted.sort_by(|a, b| (a.task, &a.article_id, a.sent_id).cmp(&(b.task, &b.article_id, b.sent_id)));

    let mut manifest = TrainingManifest {
        seed,
        holdout_fraction: holdout,
        articles: SplitCounts {
            train: train_ids.len(),
            validation: val_ids.len(),
        },
        excluded_articles,
        binary: TrainingSplit::default(),
        stance: TrainingSplit::default(),
    };
    let mut files: BTreeMap<(TrainingTask, bool), Vec<ExportRow>> = BTreeMap::new();
    for row in sorted {
        let context = contexts
            .get(&(row.article_id.clone(), row.sent_id))
            .ok_or_else(|| Error::data(format!("no context for {}#{}", row.article_id, row.sent_id)))?;
        let is_val = val_ids.contains(&row.article_id);
        let split = match row.task {
            TrainingTask::Binary => &mut manifest.binary,
            TrainingTask::Stance => &mut manifest.stance,
        };
        let counts = if is_val { &mut split.validation } else { &mut split.train };
        *counts.entry(row.label.clone()).or_default() += 1;
        files.entry((row.task, is_val)).or_default().push(ExportRow {
            context_text: context,
            label: &row.label,
        });
    }
    for task in [TrainingTask::Binary, TrainingTask::Stance] {
        for is_val in [false, true] {
            let name = format!(
                "{}_{}.jsonl",
                match task {
                    TrainingTask::Binary => "binary",
                    TrainingTask::Stance => "stance",
                },
                if is_val { "validation" } else { "train" }
            );
            let empty = Vec::new();
            write_jsonl(&out_dir.join(name), files.get(&(task, is_val)).unwrap_or(&empty))?;
        }
    }
    let path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}
