use serde::{Deserialize, Serialize};

use super::{PseudoLabel, FLAG_BINARY_SNAPPED, FLAG_STANCE_SNAPPED};
use crate::corpus::ContextWindow;
use crate::error::{Error, Result};
use crate::io::LineError;
use crate::labels::{snap_confidence, StanceLabel};
use crate::providers::{ItemResult, LabelClient, Transport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TeacherMode {
    Binary,
    Stance,
}

/// One teacher answer, confidence already snapped onto the four-point scale.
#[derive(Debug, Clone, PartialEq)]
pub enum TeacherFragment {
    Binary {
        is_interrogative: bool,
        confidence: f64,
        snapped: bool,
    },
    Stance {
        label: StanceLabel,
        confidence: f64,
        snapped: bool,
    },
}

/// Queries the teacher for every item. One result per item, in input order.
pub fn teacher_label<T: Transport>(
    items: &[ContextWindow],
    mode: TeacherMode,
    client: &LabelClient<T>,
) -> Result<Vec<ItemResult<TeacherFragment>>> {
    if items.is_empty() {
        return Err(Error::data("teacher_label called with no items"));
    }
    let contexts: Vec<String> = items.iter().map(|c| c.context_text.clone()).collect();
    Ok(match mode {
        TeacherMode::Binary => client
            .binary(&contexts)?
            .into_iter()
            .map(|r| {
                r.map(|v| {
                    let (confidence, snapped) = snap_confidence(v.confidence);
                    TeacherFragment::Binary {
                        is_interrogative: v.is_interrogative,
                        confidence,
                        snapped,
                    }
                })
            })
            .collect(),
        TeacherMode::Stance => client
            .stance(&contexts)?
            .into_iter()
            .map(|r| {
                r.map(|v| {
                    let (confidence, snapped) = snap_confidence(v.confidence);
                    TeacherFragment::Stance {
                        label: v.label,
                        confidence,
                        snapped,
                    }
                })
            })
            .collect(),
    })
}

/// Pseudo-labels plus the items the teacher could not label.
#[derive(Debug, Clone, Default)]
pub struct TeacherRun {
    pub labels: Vec<PseudoLabel>,
    pub failures: Vec<ItemFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemFailure {
    pub article_id: String,
    pub sent_id: u32,
    pub stage: TeacherMode,
    pub message: String,
}

impl From<&ItemFailure> for LineError {
    fn from(f: &ItemFailure) -> Self {
        LineError {
            line: 0,
            message: format!("{}#{} ({:?}): {}", f.article_id, f.sent_id, f.stage, f.message),
        }
    }
}

/// Binary pass over all items, then a stance pass over the binary positives.
/// Output is sorted by (article_id, sent_id).
pub fn pseudo_label<T: Transport>(items: &[ContextWindow], client: &LabelClient<T>) -> Result<TeacherRun> {
    let mut run = TeacherRun::default();
    if items.is_empty() {
        return Ok(run);
    }
    let binary = teacher_label(items, TeacherMode::Binary, client)?;
    let mut positives = Vec::new();
    for (item, fragment) in items.iter().zip(binary) {
        match fragment {
            Ok(TeacherFragment::Binary {
                is_interrogative,
                confidence,
                snapped,
            }) => {
                let label = PseudoLabel {
                    article_id: item.article_id.clone(),
                    sent_id: item.sent_id,
                    is_interrogative,
                    binary_confidence: confidence,
                    stance: None,
                    stance_confidence: None,
                    flags: if snapped { vec![FLAG_BINARY_SNAPPED.to_string()] } else { Vec::new() },
                };
                if is_interrogative {
                    positives.push((item.clone(), run.labels.len()));
                }
                run.labels.push(label);
            }
            Ok(TeacherFragment::Stance { .. }) => unreachable!("binary pass returned a stance fragment"),
            Err(message) => run.failures.push(ItemFailure {
                article_id: item.article_id.clone(),
                sent_id: item.sent_id,
                stage: TeacherMode::Binary,
                message,
            }),
        }
    }
    if !positives.is_empty() {
        let windows: Vec<ContextWindow> = positives.iter().map(|(w, _)| w.clone()).collect();
        let stance = teacher_label(&windows, TeacherMode::Stance, client)?;
        for ((item, idx), fragment) in positives.into_iter().zip(stance) {
            match fragment {
                Ok(TeacherFragment::Stance {
                    label,
                    confidence,
                    snapped,
                }) => {
                    let pl = &mut run.labels[idx];
                    pl.stance = Some(label);
                    pl.stance_confidence = Some(confidence);
                    if snapped {
                        pl.flags.push(FLAG_STANCE_SNAPPED.to_string());
                    }
                }
                Ok(TeacherFragment::Binary { .. }) => unreachable!("stance pass returned a binary fragment"),
                Err(message) => run.failures.push(ItemFailure {
                    article_id: item.article_id,
                    sent_id: item.sent_id,
                    stage: TeacherMode::Stance,
                    message,
                }),
            }
        }
    }
    run.labels.sort_by(|a, b| (&a.article_id, a.sent_id).cmp(&(&b.article_id, b.sent_id)));
    run.failures.sort_by(|a, b| (&a.article_id, a.sent_id).cmp(&(&b.article_id, b.sent_id)));
    Ok(run)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainingTask {
    Binary,
    Stance,
}

/// One kept teacher label, ready for export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingRow {
    pub article_id: String,
    pub sent_id: u32,
    pub task: TrainingTask,
    pub label: String,
}

pub const BINARY_POSITIVE: &str = "interrogative";
pub const BINARY_NEGATIVE: &str = "non-interrogative";

/// Keeps binary rows with binary_confidence ≥ threshold and stance rows with
/// stance_confidence ≥ threshold. A label can yield one row of each kind.
pub fn filter_high_confidence<'a, I>(labels: I, threshold: f64) -> Result<Vec<TrainingRow>>
where
    I: IntoIterator<Item = &'a PseudoLabel>,
{
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::config(format!("teacher keep threshold {threshold} outside (0, 1]")));
    }
    let mut rows = Vec::new();
    for l in labels {
        if l.binary_confidence >= threshold {
            rows.push(TrainingRow {
                article_id: l.article_id.clone(),
                sent_id: l.sent_id,
                task: TrainingTask::Binary,
                label: if l.is_interrogative { BINARY_POSITIVE } else { BINARY_NEGATIVE }.to_string(),
            });
        }
        if let (true, Some(stance), Some(conf)) = (l.is_interrogative, l.stance, l.stance_confidence) {
            if conf >= threshold {
                rows.push(TrainingRow {
                    article_id: l.article_id.clone(),
                    sent_id: l.sent_id,
                    task: TrainingTask::Stance,
                    label: stance.as_str().to_string(),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::{ProviderError, MockProvider, MockRole};
    use serde_json::{json, Value};

    fn label(conf: f64, stance: Option<(StanceLabel, f64)>) -> PseudoLabel {
        PseudoLabel {
            article_id: "a".into(),
            sent_id: 0,
            is_interrogative: stance.is_some(),
            binary_confidence: conf,
            stance: stance.map(|s| s.0),
            stance_confidence: stance.map(|s| s.1),
            flags: vec![],
        }
    }

    fn window(i: u32) -> ContextWindow {
        ContextWindow {
            article_id: "a".into(),
            sent_id: i,
            context_text: format!("<tgt>S{i}</tgt>"),
            radius: 3,
        }
    }

    struct Canned(Value);
    impl Transport for Canned {
        fn post(&self, _: &str, _: &Value) -> std::result::Result<Value, ProviderError> {
            Ok(self.0.clone())
        }
    }

    #[test]
    fn keep_threshold_examples() {
        assert_eq!(filter_high_confidence([&label(0.8, None)], 0.7).unwrap().len(), 1);
        assert!(filter_high_confidence([&label(0.5, None)], 0.7).unwrap().is_empty());
        assert_eq!(filter_high_confidence([&label(0.95, None)], 0.95).unwrap().len(), 1);
        assert!(filter_high_confidence([&label(0.95, None)], 0.0).is_err());
        assert!(filter_high_confidence([&label(0.95, None)], 1.5).is_err());
    }

    #[test]
    fn binary_and_stance_rows_are_filtered_independently() {
        let l = label(0.5, Some((StanceLabel::Rhetorical, 0.95)));
        let rows = filter_high_confidence([&l], 0.7).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].task, TrainingTask::Stance);
        assert_eq!(rows[0].label, "rhetorical");
    }

    #[test]
    fn teacher_snaps_and_flags() {
        let client = LabelClient::new(Canned(json!({"results": [
            {"is_interrogative": true, "confidence": 0.8},
            {"is_interrogative": true, "confidence": 0.79},
            "not json at all"
        ]})));
        let out = teacher_label(&[window(0), window(1), window(2)], TeacherMode::Binary, &client).unwrap();
        assert_eq!(
            out[0],
            Ok(TeacherFragment::Binary {
                is_interrogative: true,
                confidence: 0.8,
                snapped: false
            })
        );
        assert_eq!(
            out[1],
            Ok(TeacherFragment::Binary {
                is_interrogative: true,
                confidence: 0.8,
                snapped: true
            })
        );
        assert!(out[2].is_err());
    }

    #[test]
    fn empty_items_are_rejected() {
        let client = LabelClient::new(MockProvider::new(MockRole::Teacher, 1));
        assert!(teacher_label(&[], TeacherMode::Binary, &client).is_err());
    }

    #[test]
    fn pseudo_labels_only_carry_stance_for_positives() {
        let client = LabelClient::new(MockProvider::new(MockRole::Teacher, 1)).with_limits(3, 2);
        let texts = ["Il pleut.", "Pourquoi ?", "Comment faire ?", "Le match est fini.", "Reste à savoir qui paiera."];
        let items: Vec<ContextWindow> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| ContextWindow {
                article_id: "a".into(),
                sent_id: i as u32,
                context_text: format!("<tgt>{t}</tgt>"),
                radius: 3,
            })
            .collect();
        let run = pseudo_label(&items, &client).unwrap();
        assert_eq!(run.labels.len(), 5);
        for l in &run.labels {
            assert_eq!(l.stance.is_some(), l.is_interrogative);
            assert!(crate::labels::TEACHER_CONFIDENCE_SCALE.contains(&l.binary_confidence));
        }
        assert!(run.labels[1].is_interrogative);
    }
}
