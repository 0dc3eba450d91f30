//! High-recall detection of interrogative candidates and calibration subsampling.

mod calibration;
mod rules;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use calibration::{calibration_sample, calibration_sample_per_source, calibration_size, CALIBRATION_FRACTION};
pub use rules::{fold_accents, RuleId, RuleSet};

use crate::corpus::SentenceRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub article_id: String,
    pub sent_id: u32,
    pub is_candidate: bool,
    pub matched_rules: BTreeSet<RuleId>,
    #[serde(default)]
    pub calibration_pick: bool,
}

impl CandidateRecord {
    pub fn key(&self) -> (String, u32) {
        (self.article_id.clone(), self.sent_id)
    }
}

pub fn detect_candidate(sentence: &SentenceRecord, rules: &RuleSet) -> CandidateRecord {
    let matched_rules = rules.matches(&sentence.text);
    CandidateRecord {
        article_id: sentence.article_id.clone(),
        sent_id: sentence.sent_id,
        is_candidate: !matched_rules.is_empty(),
        matched_rules,
        calibration_pick: false,
    }
}
