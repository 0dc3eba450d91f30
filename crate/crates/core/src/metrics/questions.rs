//! Question-level tallies: stance distribution and per-stance answerability.

use std::collections::BTreeMap;

use crate::answers::QaRecord;
use crate::labels::StanceLabel;
use crate::stance::Prediction;

/// Number of questions per stance, every stance present (zero if unseen).
pub fn stance_distribution<'a>(predictions: impl IntoIterator<Item = &'a Prediction>, stance_gate: f64) -> BTreeMap<StanceLabel, usize> {
    let mut counts: BTreeMap<StanceLabel, usize> = StanceLabel::ALL.iter().map(|&s| (s, 0)).collect();
    for p in predictions {
        if let Some(s) = p.question_stance(stance_gate) {
            *counts.get_mut(&s).expect("all stances seeded") += 1;
        }
    }
    counts
}

/// (questions, answered) per stance, every stance present.
pub fn stance_answerability<'a>(records: impl IntoIterator<Item = &'a QaRecord>) -> BTreeMap<StanceLabel, (usize, usize)> {
    let mut out: BTreeMap<StanceLabel, (usize, usize)> = StanceLabel::ALL.iter().map(|&s| (s, (0, 0))).collect();
    for r in records {
        let e = out.get_mut(&r.stance).expect("all stances seeded");
        e.0 += 1;
        e.1 += usize::from(r.has_answer);
    }
    out
}
