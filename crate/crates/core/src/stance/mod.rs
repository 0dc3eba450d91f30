//! Teacher pseudo-labelling, confidence filtering, training export and
//! two-step student inference.

mod export;
mod infer;
pub mod prompts;
mod teacher;

use serde::{Deserialize, Serialize};

pub use export::{export_training_set, DEFAULT_HOLDOUT, split_articles, SplitCounts, TrainingManifest, TrainingSplit};
pub use infer::{infer_two_step, InferenceRun};
pub use teacher::{
    filter_high_confidence, pseudo_label, teacher_label, ItemFailure, TeacherFragment, TeacherMode, TeacherRun, TrainingRow,
    TrainingTask, BINARY_NEGATIVE, BINARY_POSITIVE,
};

use crate::labels::StanceLabel;

pub const DEFAULT_TEACHER_KEEP: f64 = 0.7;
pub const DEFAULT_BINARY_GATE: f64 = 0.7;
pub const DEFAULT_STANCE_GATE: f64 = 0.7;

pub const FLAG_BINARY_SNAPPED: &str = "binary_confidence_snapped";
pub const FLAG_STANCE_SNAPPED: &str = "stance_confidence_snapped";

/// Teacher output for one sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoLabel {
    pub article_id: String,
    pub sent_id: u32,
    pub is_interrogative: bool,
    pub binary_confidence: f64,
    #[serde(default)]
    pub stance: Option<StanceLabel>,
    #[serde(default)]
    pub stance_confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl PseudoLabel {
    pub fn key(&self) -> (String, u32) {
        (self.article_id.clone(), self.sent_id)
    }
}

/// Student output for one sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub article_id: String,
    pub sent_id: u32,
    pub binary_label: bool,
    pub binary_conf: f64,
    #[serde(default)]
    pub stance: Option<StanceLabel>,
    #[serde(default)]
    pub stance_conf: Option<f64>,
}

impl Prediction {
    pub fn key(&self) -> (String, u32) {
        (self.article_id.clone(), self.sent_id)
    }

    /// Whether the binary stage routes this sentence to the stance classifier.
    pub fn passes_gate(&self, gate: f64) -> bool {
        self.binary_label && self.binary_conf >= gate
    }

    /// The prediction as it would look had inference run with `gate`.
    /// Only gates at or above the one used at inference time are meaningful.
    pub fn regated(&self, gate: f64) -> Prediction {
        let mut p = self.clone();
        if !p.passes_gate(gate) {
            p.stance = None;
            p.stance_conf = None;
        }
        p
    }

    /// Counted as a question downstream: stance assigned with enough confidence.
    pub fn is_question(&self, stance_gate: f64) -> bool {
        self.stance.is_some() && self.stance_conf.is_some_and(|c| c >= stance_gate)
    }

    /// Stance label if the sentence counts as a question at `stance_gate`.
    pub fn question_stance(&self, stance_gate: f64) -> Option<StanceLabel> {
        if self.is_question(stance_gate) {
            self.stance
        } else {
            None
        }
    }
}
