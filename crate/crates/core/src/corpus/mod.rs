//! Articles, sentences and the context windows the classifiers consume.

mod context;
mod ingest;
mod ontology;
mod segment;

use serde::{Deserialize, Serialize};

pub use context::{build_context, strip_context_markup, target_text, ContextWindow, SENTENCE_DELIMITER};
pub use ingest::{ingest_articles, ArticleReader, IngestReport, Ingested};
pub use ontology::{Ontology, OutletMeta, OutletType, Scale, SourceGroup};
pub use segment::{char_spans, segment, segment_spans, sentence_char_spans, Segmenter};

/// One news article as read from the corpus file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub article_id: String,
    pub source: String,
    pub published_at: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic_id: Option<i64>,
    #[serde(default = "default_lang")]
    pub lang: String,
    /// Unknown keys, carried through untouched.
    #[serde(flatten)]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

fn default_lang() -> String {
    "fr".to_string()
}

impl ArticleRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.article_id.trim().is_empty() {
            return Err("empty article_id".into());
        }
        if self.text.trim().is_empty() {
            return Err(format!("article {} has empty text", self.article_id));
        }
        Ok(())
    }
}

/// A sentence addressed by `(article_id, sent_id)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub article_id: String,
    pub sent_id: u32,
    pub text: String,
}

/// Groups a flat sentence list by article, preserving first-seen article order
/// and sorting sentences by `sent_id` inside each article.
pub fn group_by_article(sentences: Vec<SentenceRecord>) -> Vec<(String, Vec<SentenceRecord>)> {
    let mut order: Vec<String> = Vec::new();
    let mut map: std::collections::HashMap<String, Vec<SentenceRecord>> = Default::default();
    for s in sentences {
        if !map.contains_key(&s.article_id) {
            order.push(s.article_id.clone());
        }
        map.entry(s.article_id.clone()).or_default().push(s);
    }
    order
        .into_iter()
        .map(|id| {
            let mut v = map.remove(&id).unwrap_or_default();
            v.sort_by_key(|s| s.sent_id);
            (id, v)
        })
        .collect()
}
