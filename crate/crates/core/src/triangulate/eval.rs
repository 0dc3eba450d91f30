use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::gold::GoldUnit;
use crate::corpus::sentence_char_spans;
use crate::error::{Error, Result};
use crate::labels::StanceLabel;
use crate::metrics::ratio;
use crate::stance::Prediction;

/// Gold reading of one sentence, projected from unit spans.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSentence {
    pub article_id: String,
    pub sent_id: u32,
    pub positive: bool,
    pub stance: Option<StanceLabel>,
}

/// Projects units onto the sentences of one article. A sentence is positive
/// when any unit shares a character with it; its stance is the function of
/// the unit covering most of its characters (canonical label order on ties).
pub fn project_gold(article_id: &str, text: &str, units: &[&GoldUnit]) -> Vec<GoldSentence> {
    sentence_char_spans(text)
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let best = units
                .iter()
                .filter_map(|u| {
                    let inter = s.end.min(u.end).saturating_sub(s.start.max(u.start));
                    (inter > 0).then_some((inter, u.function))
                })
                .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
            GoldSentence {
                article_id: article_id.to_string(),
                sent_id: i as u32,
                positive: best.is_some(),
                stance: best.map(|b| b.1),
            }
        })
        .collect()
}

fn index_predictions(predictions: &[Prediction]) -> HashMap<(&str, u32), &Prediction> {
    predictions.iter().map(|p| ((p.article_id.as_str(), p.sent_id), p)).collect()
}

fn lookup<'a>(idx: &HashMap<(&str, u32), &'a Prediction>, g: &GoldSentence) -> Result<&'a Prediction> {
    idx.get(&(g.article_id.as_str(), g.sent_id))
        .copied()
        .ok_or_else(|| Error::data(format!("no prediction for gold sentence {}#{}", g.article_id, g.sent_id)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryReport {
    pub n_sentences: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    /// Names of metrics left undefined by a zero denominator.
    pub undefined: Vec<String>,
}

/// Sentence-level detector quality for the interrogative class. A sentence
/// is predicted positive when it passes `binary_gate`.
pub fn evaluate_binary(predictions: &[Prediction], gold: &[GoldSentence], binary_gate: f64) -> Result<BinaryReport> {
    let idx = index_predictions(predictions);
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for g in gold {
        let predicted = lookup(&idx, g)?.passes_gate(binary_gate);
        match (predicted, g.positive) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let n = gold.len();
    let mut report = BinaryReport {
        n_sentences: n,
        tp,
        fp,
        fn_,
        tn,
        accuracy: ratio(tp + tn, n),
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        f1: ratio(2 * tp, 2 * tp + fp + fn_),
        undefined: Vec::new(),
    };
    for (name, v) in [
        ("accuracy", report.accuracy),
        ("precision", report.precision),
        ("recall", report.recall),
        ("f1", report.f1),
    ] {
        if v.is_none() {
            report.undefined.push(name.to_string());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: StanceLabel,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// 2·TP / (2·TP + FP + FN); undefined only for a class absent from both sides.
    pub f1: Option<f64>,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StanceReport {
    pub conditional: bool,
    pub n_items: usize,
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: Option<f64>,
    pub micro_f1: Option<f64>,
    /// Classes left out of the macro average because their F1 is undefined.
    pub excluded_from_macro: Vec<StanceLabel>,
    /// Rows are gold stances, columns predicted stances in canonical order
    /// plus a final column for sentences that never reached the stance stage.
    pub confusion: Vec<Vec<usize>>,
}

impl StanceReport {
    /// Confusion rows scaled to sum to 1; rows without gold items are None.
    pub fn row_normalized(&self) -> Vec<Option<Vec<f64>>> {
        self.confusion
            .iter()
            .map(|row| {
                let n: usize = row.iter().sum();
                (n > 0).then(|| row.iter().map(|&c| c as f64 / n as f64).collect())
            })
            .collect()
    }
}

/// Six-way evaluation over gold-positive sentences. Unconditional mode keeps
/// every gold positive, counting gate rejections as misses; conditional mode
/// keeps only those the binary gate routed to the stance stage.
pub fn evaluate_stance(
    predictions: &[Prediction],
    gold: &[GoldSentence],
    binary_gate: f64,
    conditional: bool,
) -> Result<StanceReport> {
    let idx = index_predictions(predictions);
    let k = StanceLabel::ALL.len();
    let mut confusion = vec![vec![0usize; k + 1]; k];
    let mut n_items = 0;
    for g in gold.iter().filter(|g| g.positive) {
        let gold_label = g
            .stance
            .ok_or_else(|| Error::data(format!("gold positive {}#{} has no stance", g.article_id, g.sent_id)))?;
        let p = lookup(&idx, g)?;
        let predicted = p.stance.filter(|_| p.passes_gate(binary_gate));
        if conditional && predicted.is_none() {
            continue;
        }
        n_items += 1;
        confusion[gold_label.index()][predicted.map_or(k, StanceLabel::index)] += 1;
    }

    let mut per_class = Vec::with_capacity(k);
    let (mut tp_all, mut predicted_all) = (0, 0);
    for label in StanceLabel::ALL {
        let c = label.index();
        let tp = confusion[c][c];
        let support: usize = confusion[c].iter().sum();
        let predicted: usize = confusion.iter().map(|row| row[c]).sum();
        tp_all += tp;
        predicted_all += predicted;
        per_class.push(ClassMetrics {
            label,
            precision: ratio(tp, predicted),
            recall: ratio(tp, support),
            f1: ratio(2 * tp, predicted + support),
            support,
        });
    }
    let defined: Vec<f64> = per_class.iter().filter_map(|c| c.f1).collect();
    let excluded_from_macro = per_class.iter().filter(|c| c.f1.is_none()).map(|c| c.label).collect();
    Ok(StanceReport {
        conditional,
        n_items,
        macro_f1: (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64),
        micro_f1: ratio(2 * tp_all, predicted_all + n_items),
        excluded_from_macro,
        per_class,
        confusion,
    })
}

/// Projects the units of every article in `texts` and concatenates the
/// results in article order.
pub fn project_corpus(texts: &BTreeMap<String, String>, units: &[GoldUnit]) -> Vec<GoldSentence> {
    let mut by_article: BTreeMap<&str, Vec<&GoldUnit>> = BTreeMap::new();
    for u in units {
        by_article.entry(u.article_id.as_str()).or_default().push(u);
    }
    texts
        .iter()
        .flat_map(|(id, text)| project_gold(id, text, by_article.get(id.as_str()).map_or(&[][..], |v| v)))
        .collect()
}
