use serde::{Deserialize, Serialize};
use tracing::warn;

use super::search::DEGENERATE_NORM;
use crate::stance::Prediction;

/// A maximal run of consecutive question sentences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionGroup {
    pub article_id: String,
    pub group_id: u32,
    pub sent_ids: Vec<u32>,
    pub group_vector: Vec<f64>,
}

impl QuestionGroup {
    pub fn last_sent_id(&self) -> u32 {
        *self.sent_ids.last().expect("groups are never empty")
    }
}

/// Groups whose member vectors cancel out; they are left unsearched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateGroup {
    pub article_id: String,
    pub group_id: u32,
    pub sent_ids: Vec<u32>,
}

/// Contiguous runs of questions (stance assigned with confidence ≥ `stance_gate`).
/// `predictions` must be sorted by sent_id; `vectors[i]` is the vector of sentence i.
/// Group ids number the runs within the article, degenerate runs included.
pub fn group_questions(
    predictions: &[Prediction],
    vectors: &[Vec<f64>],
    stance_gate: f64,
) -> (Vec<QuestionGroup>, Vec<DegenerateGroup>) {
    let mut runs: Vec<Vec<u32>> = Vec::new();
    for p in predictions.iter().filter(|p| p.is_question(stance_gate)) {
        match runs.last_mut() {
            Some(run) if *run.last().unwrap() + 1 == p.sent_id => run.push(p.sent_id),
            _ => runs.push(vec![p.sent_id]),
        }
    }
    let article_id = predictions.first().map(|p| p.article_id.clone()).unwrap_or_default();
    let mut groups = Vec::new();
    let mut degenerate = Vec::new();
    for (group_id, sent_ids) in runs.into_iter().enumerate() {
        let group_id = group_id as u32;
        match unit_mean(sent_ids.iter().map(|&s| vectors[s as usize].as_slice())) {
            Some(group_vector) => groups.push(QuestionGroup {
                article_id: article_id.clone(),
                group_id,
                sent_ids,
                group_vector,
            }),
            None => {
                warn!(%article_id, group_id, "question group has a vanishing mean vector; left unanswered");
                degenerate.push(DegenerateGroup {
                    article_id: article_id.clone(),
                    group_id,
                    sent_ids,
                });
            }
        }
    }
    (groups, degenerate)
}

/// Mean of the given vectors scaled to unit length; None when the mean vanishes.
pub fn unit_mean<'a>(vectors: impl Iterator<Item = &'a [f64]>) -> Option<Vec<f64>> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for v in vectors {
        if sum.is_empty() {
            sum = vec![0.0; v.len()];
        }
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        count += 1;
    }
    if count == 0 {
        return None;
    }
    let norm = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm / count as f64 <= DEGENERATE_NORM {
        return None;
    }
    Some(sum.iter().map(|x| x / norm).collect())
}
