use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::corpus::SentenceRecord;
use crate::error::{Error, Result};
use crate::providers::{NerClient, RawMention, Transport};

pub const DEFAULT_NER_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityLabel {
    #[serde(rename = "person")]
    Person,
    #[serde(rename = "organization")]
    Organization,
    #[serde(rename = "location")]
    Location,
    #[serde(rename = "nationality or religious or political group")]
    NationalityReligiousPoliticalGroup,
    #[serde(rename = "generic social group")]
    GenericSocialGroup,
    #[serde(rename = "public or audience")]
    PublicOrAudience,
    #[serde(rename = "event")]
    Event,
}

impl EntityLabel {
    pub const ALL: [EntityLabel; 7] = [
        EntityLabel::Person,
        EntityLabel::Organization,
        EntityLabel::Location,
        EntityLabel::NationalityReligiousPoliticalGroup,
        EntityLabel::GenericSocialGroup,
        EntityLabel::PublicOrAudience,
        EntityLabel::Event,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityLabel::Person => "person",
            EntityLabel::Organization => "organization",
            EntityLabel::Location => "location",
            EntityLabel::NationalityReligiousPoliticalGroup => "nationality or religious or political group",
            EntityLabel::GenericSocialGroup => "generic social group",
            EntityLabel::PublicOrAudience => "public or audience",
            EntityLabel::Event => "event",
        }
    }

    /// The label list sent with every NER request.
    pub fn wire_labels() -> Vec<String> {
        Self::ALL.iter().map(|l| l.as_str().to_string()).collect()
    }

    pub fn is_actor(self) -> bool {
        matches!(self, EntityLabel::Person | EntityLabel::Organization | EntityLabel::Location)
    }

    pub fn is_collective(self) -> bool {
        matches!(
            self,
            EntityLabel::NationalityReligiousPoliticalGroup | EntityLabel::GenericSocialGroup | EntityLabel::PublicOrAudience
        )
    }
}

impl fmt::Display for EntityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::data(format!("unknown entity label {s:?}")))
    }
}

/// A retained mention; offsets are character positions in the annotated text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityMention {
    pub text: String,
    pub label: EntityLabel,
    pub score: f64,
    pub start: usize,
    pub end: usize,
}

/// Entities of one question sentence and of its answer span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub article_id: String,
    pub sent_id: u32,
    pub question_entities: Vec<EntityMention>,
    pub answer_entities: Vec<EntityMention>,
}

/// Drops mentions under `threshold`, with unknown labels, or with offsets
/// outside `text`. Output is sorted by (start, end).
pub fn retain_mentions(raw: Vec<RawMention>, text: &str, threshold: f64) -> Vec<EntityMention> {
    let len = text.chars().count();
    let mut out: Vec<EntityMention> = raw
        .into_iter()
        .filter(|m| m.score >= threshold)
        .filter_map(|m| {
            let Ok(label) = m.label.parse::<EntityLabel>() else {
                warn!(label = %m.label, "dropping mention with unknown label");
                return None;
            };
            if m.start >= m.end || m.end > len {
                warn!(start = m.start, end = m.end, len, "dropping mention with out-of-bounds offsets");
                return None;
            }
            Some(EntityMention {
                text: m.text,
                label,
                score: m.score,
                start: m.start,
                end: m.end,
            })
        })
        .collect();
    out.sort_by_key(|m| (m.start, m.end, m.label));
    out
}

/// Previous sentence (if any), the question and the next sentence (if any), space-joined.
pub fn question_context(sentences: &[SentenceRecord], sent_id: u32) -> Result<String> {
    let i = sentences
        .iter()
        .position(|s| s.sent_id == sent_id)
        .ok_or_else(|| Error::data(format!("unknown sent_id {sent_id}")))?;
    let lo = i.saturating_sub(1);
    let hi = (i + 1).min(sentences.len() - 1);
    Ok(sentences[lo..=hi].iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" "))
}

/// Annotates many texts in provider batches, thresholding each result.
pub fn annotate_texts<T: Transport>(texts: &[String], client: &NerClient<T>, threshold: f64) -> Result<Vec<Vec<EntityMention>>> {
    if texts.is_empty() {
        return Ok(Vec::new());
    }
    let raw = client.annotate(texts)?;
    Ok(raw
        .into_iter()
        .zip(texts)
        .map(|(mentions, text)| retain_mentions(mentions, text, threshold))
        .collect())
}

/// Entities in a question's ±1 sentence context.
pub fn annotate_question<T: Transport>(context: &str, client: &NerClient<T>, threshold: f64) -> Result<Vec<EntityMention>> {
    Ok(annotate_texts(&[context.to_string()], client, threshold)?.remove(0))
}

/// Entities in a bare answer span.
pub fn annotate_answer<T: Transport>(span_text: &str, client: &NerClient<T>, threshold: f64) -> Result<Vec<EntityMention>> {
    annotate_question(span_text, client, threshold)
}
