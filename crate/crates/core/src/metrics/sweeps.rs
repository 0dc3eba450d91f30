use serde::{Deserialize, Serialize};

use crate::answers::QaRecord;
use crate::error::{Error, Result};
use crate::stance::Prediction;

pub const CONFIDENCE_THRESHOLDS: [f64; 3] = [0.6, 0.7, 0.8];
pub const SIMILARITY_THRESHOLDS: [f64; 5] = [0.05, 0.40, 0.80, 0.95, 0.975];

/// Predictions of one article together with its sentence count.
#[derive(Debug, Clone, Copy)]
pub struct ArticlePredictions<'a> {
    pub article_id: &'a str,
    pub n_sentences: usize,
    pub predictions: &'a [Prediction],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceRow {
    pub threshold: f64,
    pub n_questions: usize,
    /// Percentage of all sentences.
    pub pct_sentences: f64,
    pub mean_id_a: f64,
}

/// A sentence counts at threshold `t` when both its binary and its stance
/// confidence reach `t`. Binary confidences below the gate used at inference
/// time never reached the stance stage and so cannot count.
pub fn counts_at(p: &Prediction, t: f64) -> bool {
    p.passes_gate(t) && p.is_question(t)
}

pub fn sweep_confidence(articles: &[ArticlePredictions], thresholds: &[f64]) -> Result<Vec<ConfidenceRow>> {
    let total_sentences: usize = articles.iter().map(|a| a.n_sentences).sum();
    if articles.is_empty() || total_sentences == 0 {
        return Err(Error::data("confidence sweep needs at least one article with sentences"));
    }
    let mut rows = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let mut n = 0usize;
        let mut id_sum = 0.0;
        for a in articles {
            if a.n_sentences == 0 {
                return Err(Error::data(format!("article {} has no sentences", a.article_id)));
            }
            let q = a.predictions.iter().filter(|p| counts_at(p, t)).count();
            n += q;
            id_sum += q as f64 / a.n_sentences as f64;
        }
        rows.push(ConfidenceRow {
            threshold: t,
            n_questions: n,
            pct_sentences: 100.0 * n as f64 / total_sentences as f64,
            mean_id_a: id_sum / articles.len() as f64,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRow {
    pub threshold: f64,
    /// Percentages of questions.
    pub answered: f64,
    pub unanswered: f64,
    pub internal: f64,
    pub via_quotes: f64,
}

/// Re-derives answered status from stored best scores, without searching again.
pub fn sweep_similarity(records: &[QaRecord], thresholds: &[f64]) -> Result<Vec<SimilarityRow>> {
    if records.is_empty() {
        return Err(Error::data("similarity sweep needs at least one QA record"));
    }
    if let Some(r) = records.iter().find(|r| r.has_answer && r.answer_sim.is_none()) {
        return Err(Error::data(format!(
            "QA record {}#{} is answered but has no stored similarity",
            r.article_id, r.sent_id
        )));
    }
    let n = records.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&t| {
            let (mut answered, mut quotes) = (0usize, 0usize);
            for r in records {
                if r.answer_sim.is_some_and(|s| s >= t) {
                    answered += 1;
                    quotes += usize::from(r.best_has_quotes);
                }
            }
            SimilarityRow {
                threshold: t,
                answered: 100.0 * answered as f64 / n,
                unanswered: 100.0 * (records.len() - answered) as f64 / n,
                internal: 100.0 * (answered - quotes) as f64 / n,
                via_quotes: 100.0 * quotes as f64 / n,
            }
        })
        .collect())
}
