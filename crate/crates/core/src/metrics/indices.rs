use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::stats::ratio;
use crate::answers::QaRecord;
use crate::error::{Error, Result};
use crate::semantics::{classify_addressivity, AddressivityClass, EntityLabel, EntityRecord, MetaTopic};
use crate::stance::Prediction;

/// What the index computation needs to know about an article besides its questions.
#[derive(Debug, Clone, PartialEq)]
pub struct ArticleMeta {
    pub article_id: String,
    pub source: String,
    pub meta_topic: MetaTopic,
    pub n_sentences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleIndexRecord {
    pub article_id: String,
    pub source: String,
    pub meta_topic: MetaTopic,
    #[serde(rename = "S_a")]
    pub s_a: usize,
    #[serde(rename = "Q_a")]
    pub q_a: usize,
    #[serde(rename = "A_a")]
    pub a_a: usize,
    #[serde(rename = "ID_a")]
    pub id_a: f64,
    #[serde(rename = "Ans_a")]
    pub ans_a: Option<f64>,
    pub share_unanswered: Option<f64>,
    pub share_internal: Option<f64>,
    pub share_external: Option<f64>,
    pub addr_actor: Option<f64>,
    pub addr_group: Option<f64>,
    pub addr_issue: Option<f64>,
    pub pers_flag_count: usize,
    pub q_quote_count: usize,
    pub q_org_count: usize,
    pub q_loc_count: usize,
    pub q_event_count: usize,
    pub n_unanswered: usize,
    pub n_internal: usize,
    pub n_external: usize,
    pub n_actor: usize,
    pub n_group: usize,
    pub n_issue: usize,
}

/// Indices of one article. A question is a prediction with a stance of
/// confidence ≥ `stance_gate`; each needs a QA record and an entity record.
pub fn compute_article_indices(
    meta: &ArticleMeta,
    predictions: &[Prediction],
    qa: &[QaRecord],
    entities: &[EntityRecord],
    stance_gate: f64,
) -> Result<ArticleIndexRecord> {
    let qa: HashMap<u32, &QaRecord> = qa.iter().map(|r| (r.sent_id, r)).collect();
    let ents: HashMap<u32, &EntityRecord> = entities.iter().map(|r| (r.sent_id, r)).collect();
    let mut rec = ArticleIndexRecord {
        article_id: meta.article_id.clone(),
        source: meta.source.clone(),
        meta_topic: meta.meta_topic,
        s_a: meta.n_sentences,
        q_a: 0,
        a_a: 0,
        id_a: 0.0,
        ans_a: None,
        share_unanswered: None,
        share_internal: None,
        share_external: None,
        addr_actor: None,
        addr_group: None,
        addr_issue: None,
        pers_flag_count: 0,
        q_quote_count: 0,
        q_org_count: 0,
        q_loc_count: 0,
        q_event_count: 0,
        n_unanswered: 0,
        n_internal: 0,
        n_external: 0,
        n_actor: 0,
        n_group: 0,
        n_issue: 0,
    };
    if meta.n_sentences == 0 {
        return Err(Error::data(format!("article {} has no sentences", meta.article_id)));
    }
    for p in predictions.iter().filter(|p| p.is_question(stance_gate)) {
        let missing = |what: &str| {
            Error::data(format!(
                "no {what} record for question {}#{}; rerun the stage with the same stance gate",
                p.article_id, p.sent_id
            ))
        };
        let q = qa.get(&p.sent_id).ok_or_else(|| missing("QA"))?;
        let e = ents.get(&p.sent_id).ok_or_else(|| missing("entity"))?;
        rec.q_a += 1;
        match (q.has_answer, q.answer_has_quotes) {
            (false, _) => rec.n_unanswered += 1,
            (true, false) => rec.n_internal += 1,
            (true, true) => rec.n_external += 1,
        }
        match classify_addressivity(&e.question_entities) {
            AddressivityClass::ActorFocused => rec.n_actor += 1,
            AddressivityClass::GroupFocused => rec.n_group += 1,
            AddressivityClass::IssueFocused => rec.n_issue += 1,
        }
        let has = |l: EntityLabel| e.question_entities.iter().any(|m| m.label == l);
        rec.pers_flag_count += usize::from(has(EntityLabel::Person));
        rec.q_org_count += usize::from(has(EntityLabel::Organization));
        rec.q_loc_count += usize::from(has(EntityLabel::Location));
        rec.q_event_count += usize::from(has(EntityLabel::Event));
        rec.q_quote_count += usize::from(q.question_has_quotes);
    }
    if rec.q_a > rec.s_a {
        return Err(Error::data(format!("article {} has more questions than sentences", meta.article_id)));
    }
    rec.a_a = rec.n_internal + rec.n_external;
    rec.id_a = rec.q_a as f64 / rec.s_a as f64;
    rec.ans_a = ratio(rec.a_a, rec.q_a);
    rec.share_unanswered = ratio(rec.n_unanswered, rec.q_a);
    rec.share_internal = ratio(rec.n_internal, rec.q_a);
    rec.share_external = ratio(rec.n_external, rec.q_a);
    rec.addr_actor = ratio(rec.n_actor, rec.q_a);
    rec.addr_group = ratio(rec.n_group, rec.q_a);
    rec.addr_issue = ratio(rec.n_issue, rec.q_a);
    Ok(rec)
}

/// Question counts by dialogicity category, summed over articles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogicityTotals {
    pub unanswered: usize,
    pub internal: usize,
    pub external: usize,
}

impl DialogicityTotals {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ArticleIndexRecord>) -> Self {
        records.into_iter().fold(Self::default(), |acc, r| DialogicityTotals {
            unanswered: acc.unanswered + r.n_unanswered,
            internal: acc.internal + r.n_internal,
            external: acc.external + r.n_external,
        })
    }

    pub fn questions(&self) -> usize {
        self.unanswered + self.internal + self.external
    }

    pub fn answered(&self) -> usize {
        self.internal + self.external
    }

    pub fn answered_share(&self) -> Option<f64> {
        ratio(self.answered(), self.questions())
    }
}

/// Share of questions mentioning at least one person, pooled over records.
pub fn personalization<'a>(records: impl IntoIterator<Item = &'a ArticleIndexRecord>) -> Option<f64> {
    let (p, q) = records
        .into_iter()
        .fold((0, 0), |(p, q), r| (p + r.pers_flag_count, q + r.q_a));
    ratio(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::StanceLabel;
    use crate::semantics::EntityMention;

    fn meta(n: usize) -> ArticleMeta {
        ArticleMeta {
            article_id: "a".into(),
            source: "lematin.ch".into(),
            meta_topic: MetaTopic::LocalNews,
            n_sentences: n,
        }
    }

    fn pred(sent_id: u32, q: bool) -> Prediction {
        Prediction {
            article_id: "a".into(),
            sent_id,
            binary_label: q,
            binary_conf: 0.9,
            stance: q.then_some(StanceLabel::Rhetorical),
            stance_conf: q.then_some(0.9),
        }
    }

    fn qa(sent_id: u32, answered: bool, quotes: bool) -> QaRecord {
        QaRecord {
            article_id: "a".into(),
            sent_id,
            stance: StanceLabel::Rhetorical,
            stance_conf: 0.9,
            group_id: sent_id,
            has_answer: answered,
            answer_sim: Some(if answered { 0.9 } else { 0.2 }),
            answer_start: answered.then_some(sent_id + 1),
            answer_len: answered.then_some(1),
            answer_text: answered.then(|| "x".into()),
            question_has_quotes: false,
            answer_has_quotes: answered && quotes,
            best_has_quotes: quotes,
        }
    }

    fn ent(sent_id: u32, labels: &[EntityLabel]) -> EntityRecord {
        EntityRecord {
            article_id: "a".into(),
            sent_id,
            question_entities: labels
                .iter()
                .map(|&label| EntityMention {
                    text: "x".into(),
                    label,
                    score: 0.9,
                    start: 0,
                    end: 1,
                })
                .collect(),
            answer_entities: vec![],
        }
    }

    #[test]
    fn two_answered_questions_in_eight_sentences() {
        let preds: Vec<Prediction> = (0..8).map(|i| pred(i, i == 1 || i == 4)).collect();
        let r = compute_article_indices(
            &meta(8),
            &preds,
            &[qa(1, true, false), qa(4, true, true)],
            &[ent(1, &[EntityLabel::Person]), ent(4, &[])],
            0.7,
        )
        .unwrap();
        assert_eq!((r.q_a, r.s_a, r.a_a), (2, 8, 2));
        assert_eq!(r.id_a, 0.25);
        assert_eq!(r.ans_a, Some(1.0));
        assert_eq!((r.share_unanswered, r.share_internal, r.share_external), (Some(0.0), Some(0.5), Some(0.5)));
        assert_eq!((r.addr_actor, r.addr_issue), (Some(0.5), Some(0.5)));
        assert_eq!(r.pers_flag_count, 1);
    }

    #[test]
    fn no_questions() {
        let preds: Vec<Prediction> = (0..5).map(|i| pred(i, false)).collect();
        let r = compute_article_indices(&meta(5), &preds, &[], &[], 0.7).unwrap();
        assert_eq!(r.id_a, 0.0);
        assert_eq!(r.ans_a, None);
        assert_eq!(r.share_unanswered, None);
    }

    #[test]
    fn missing_qa_record_is_an_error() {
        let preds = vec![pred(0, true)];
        assert!(compute_article_indices(&meta(1), &preds, &[], &[ent(0, &[])], 0.7).is_err());
    }

    #[test]
    fn published_answered_share() {
        let t = DialogicityTotals {
            unanswered: 33_271,
            internal: 610_209,
            external: 116_702,
        };
        assert_eq!(t.questions(), 760_182);
        assert_eq!(t.answered(), 726_911);
        assert!((100.0 * t.answered_share().unwrap() - 95.6).abs() <= 0.05);
    }
}
