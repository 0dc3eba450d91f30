use serde::{Deserialize, Serialize};

use super::SentenceRecord;
use crate::error::{Error, Result};

pub const SENTENCE_DELIMITER: &str = " </s> ";
const TARGET_OPEN: &str = "<tgt>";
const TARGET_CLOSE: &str = "</tgt>";

/// A target sentence with up to `radius` same-article neighbours on each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextWindow {
    pub article_id: String,
    pub sent_id: u32,
    pub context_text: String,
    pub radius: usize,
}

/// Builds the context window of `sent_id` from the ordered sentences of one article.
/// Neighbours are clamped at the article boundaries.
pub fn build_context(sentences: &[SentenceRecord], sent_id: u32, radius: usize) -> Result<ContextWindow> {
    let pos = match sentences.get(sent_id as usize) {
        Some(s) if s.sent_id == sent_id => sent_id as usize,
        _ => sentences
            .iter()
            .position(|s| s.sent_id == sent_id)
            .ok_or_else(|| Error::data(format!("unknown sent_id {sent_id}")))?,
    };
    let lo = pos.saturating_sub(radius);
    let hi = (pos + radius).min(sentences.len() - 1);
    let parts: Vec<String> = (lo..=hi)
        .map(|i| {
            if i == pos {
                format!("{TARGET_OPEN}{}{TARGET_CLOSE}", sentences[i].text)
            } else {
                sentences[i].text.clone()
            }
        })
        .collect();
    Ok(ContextWindow {
        article_id: sentences[pos].article_id.clone(),
        sent_id,
        context_text: parts.join(SENTENCE_DELIMITER),
        radius,
    })
}

/// The text between the target markers, if present.
pub fn target_text(context: &str) -> Option<&str> {
    let start = context.find(TARGET_OPEN)? + TARGET_OPEN.len();
    let end = context[start..].find(TARGET_CLOSE)? + start;
    Some(&context[start..end])
}

/// Removes target markers and turns delimiters back into single spaces.
pub fn strip_context_markup(context: &str) -> String {
    context
        .replace(TARGET_OPEN, "")
        .replace(TARGET_CLOSE, "")
        .replace(SENTENCE_DELIMITER, " ")
}
