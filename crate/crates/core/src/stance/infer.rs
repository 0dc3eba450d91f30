use super::teacher::ItemFailure;
use super::{Prediction, TeacherMode};
use crate::corpus::ContextWindow;
use crate::error::{Error, Result};
use crate::providers::{LabelClient, Transport};

#[derive(Debug, Clone, Default)]
pub struct InferenceRun {
    pub predictions: Vec<Prediction>,
    pub failures: Vec<ItemFailure>,
}

/// Binary classification of every sentence, then stance classification of the
/// sentences whose binary verdict is positive with confidence ≥ `gate`.
/// Output is sorted by (article_id, sent_id).
pub fn infer_two_step<B: Transport, S: Transport>(
    contexts: &[ContextWindow],
    binary: &LabelClient<B>,
    stance: &LabelClient<S>,
    gate: f64,
) -> Result<InferenceRun> {
    if !(0.0..=1.0).contains(&gate) {
        return Err(Error::config(format!("binary gate {gate} outside [0, 1]")));
    }
    let mut run = InferenceRun::default();
    if contexts.is_empty() {
        return Ok(run);
    }
    let texts: Vec<String> = contexts.iter().map(|c| c.context_text.clone()).collect();
    let mut routed = Vec::new();
    for (ctx, verdict) in contexts.iter().zip(binary.binary(&texts)?) {
        match verdict {
            Ok(v) => {
                let p = Prediction {
                    article_id: ctx.article_id.clone(),
                    sent_id: ctx.sent_id,
                    binary_label: v.is_interrogative,
                    binary_conf: v.confidence,
                    stance: None,
                    stance_conf: None,
                };
                if p.passes_gate(gate) {
                    routed.push(run.predictions.len());
                }
                run.predictions.push(p);
            }
            Err(message) => run.failures.push(ItemFailure {
                article_id: ctx.article_id.clone(),
                sent_id: ctx.sent_id,
                stage: TeacherMode::Binary,
                message,
            }),
        }
    }
    if !routed.is_empty() {
        let by_key: std::collections::HashMap<(&str, u32), &ContextWindow> =
            contexts.iter().map(|c| ((c.article_id.as_str(), c.sent_id), c)).collect();
        let texts: Vec<String> = routed
            .iter()
            .map(|&i| {
                let p = &run.predictions[i];
                by_key[&(p.article_id.as_str(), p.sent_id)].context_text.clone()
            })
            .collect();
        for (i, verdict) in routed.into_iter().zip(stance.stance(&texts)?) {
            let p = &mut run.predictions[i];
            match verdict {
                Ok(v) => {
                    p.stance = Some(v.label);
                    p.stance_conf = Some(v.confidence);
                }
                Err(message) => run.failures.push(ItemFailure {
                    article_id: p.article_id.clone(),
                    sent_id: p.sent_id,
                    stage: TeacherMode::Stance,
                    message,
                }),
            }
        }
    }
    run.predictions
        .sort_by(|a, b| (&a.article_id, a.sent_id).cmp(&(&b.article_id, b.sent_id)));
    run.failures.sort_by(|a, b| (&a.article_id, a.sent_id).cmp(&(&b.article_id, b.sent_id)));
    Ok(run)
}
