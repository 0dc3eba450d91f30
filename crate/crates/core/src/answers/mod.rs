//! Question grouping and embedding-based answer-span search.

mod embed;
mod group;
mod quotes;
mod search;

use serde::{Deserialize, Serialize};

pub use embed::{
    embed_sentences, normalize_vectors, EmbeddedArticle, EmbeddingSource, FileEmbeddings, ProviderEmbeddings, VectorRecord,
    EMBEDDING_RADIUS,
};
pub use group::{group_questions, unit_mean, DegenerateGroup, QuestionGroup};
pub use quotes::{detect_quote_markers, QuoteMarkers};
pub use search::{
    best_window, search, ArticleVectors, SearchConfig, SpanSearch, WindowScore, DEFAULT_HORIZON,
    DEFAULT_SIMILARITY_THRESHOLD, DEFAULT_WINDOW_LENGTHS, DEGENERATE_NORM,
};

use crate::corpus::SentenceRecord;
use crate::error::{Error, Result};
use crate::labels::StanceLabel;
use crate::stance::Prediction;

/// Outcome of the search for one question group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerSpan {
    pub group_id: u32,
    pub found: bool,
    pub start: Option<u32>,
    pub length: Option<usize>,
    /// Best window score, kept for unanswered groups too; None without candidates.
    pub similarity: Option<f64>,
    pub text: Option<String>,
    pub has_quote_markers: bool,
    /// Quote flag of the best window whether or not it cleared the threshold.
    pub best_has_quotes: bool,
}

/// Runs the window search for `group` over the article's vectors.
pub fn find_answer_span(group: &QuestionGroup, article: &ArticleVectors, cfg: &SearchConfig) -> SpanSearch {
    search(&group.group_vector, group.last_sent_id() as usize, article, cfg)
}

fn span_text(sentences: &[SentenceRecord], start: usize, length: usize) -> String {
    sentences[start..start + length]
        .iter()
        .map(|s| s.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

impl AnswerSpan {
    pub fn from_search(group_id: u32, result: &SpanSearch, sentences: &[SentenceRecord], markers: &QuoteMarkers) -> Self {
        let best_has_quotes = result
            .best
            .is_some_and(|b| markers.detect(&span_text(sentences, b.start, b.length)));
        match (result.found, result.best) {
            (true, Some(b)) => AnswerSpan {
                group_id,
                found: true,
                start: Some(b.start as u32),
                length: Some(b.length),
                similarity: Some(b.similarity),
                text: Some(span_text(sentences, b.start, b.length)),
                has_quote_markers: best_has_quotes,
                best_has_quotes,
            },
            _ => AnswerSpan {
                group_id,
                found: false,
                start: None,
                length: None,
                similarity: result.best.map(|b| b.similarity),
                text: None,
                has_quote_markers: false,
                best_has_quotes,
            },
        }
    }

    fn unsearched(group_id: u32) -> Self {
        AnswerSpan {
            group_id,
            found: false,
            start: None,
            length: None,
            similarity: None,
            text: None,
            has_quote_markers: false,
            best_has_quotes: false,
        }
    }
}

/// One line of the QA output: a question sentence with its group's answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaRecord {
    pub article_id: String,
    pub sent_id: u32,
    pub stance: StanceLabel,
    pub stance_conf: f64,
    pub group_id: u32,
    pub has_answer: bool,
    pub answer_sim: Option<f64>,
    pub answer_start: Option<u32>,
    pub answer_len: Option<usize>,
    pub answer_text: Option<String>,
    pub question_has_quotes: bool,
    pub answer_has_quotes: bool,
    #[serde(default)]
    pub best_has_quotes: bool,
}

impl QaRecord {
    pub fn key(&self) -> (String, u32) {
        (self.article_id.clone(), self.sent_id)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ArticleAnswers {
    pub records: Vec<QaRecord>,
    pub groups: Vec<(QuestionGroup, AnswerSpan)>,
    pub degenerate: Vec<DegenerateGroup>,
}

/// Groups the article's questions, searches an answer for each group and
/// copies the group's outcome onto every member sentence.
pub fn answer_article(
    sentences: &[SentenceRecord],
    predictions: &[Prediction],
    vectors: &[Vec<f64>],
    cfg: &SearchConfig,
    markers: &QuoteMarkers,
) -> Result<ArticleAnswers> {
    if vectors.len() != sentences.len() {
        return Err(Error::data(format!(
            "{} vectors for {} sentences",
            vectors.len(),
            sentences.len()
        )));
    }
    if predictions.windows(2).any(|w| w[0].sent_id >= w[1].sent_id)
        || predictions.iter().any(|p| p.sent_id as usize >= sentences.len())
    {
        return Err(Error::data("predictions must be sorted by sent_id and within the article"));
    }
    let article = ArticleVectors::new(vectors)?;
    let (groups, degenerate) = group_questions(predictions, vectors, cfg.stance_gate);
    let by_sent: std::collections::HashMap<u32, &Prediction> = predictions.iter().map(|p| (p.sent_id, p)).collect();

    let mut out = ArticleAnswers::default();
    let mut emit = |sent_id: u32, span: &AnswerSpan| {
        let p = by_sent[&sent_id];
        out.records.push(QaRecord {
            article_id: p.article_id.clone(),
            sent_id,
            stance: p.stance.expect("grouped sentences carry a stance"),
            stance_conf: p.stance_conf.expect("grouped sentences carry a stance confidence"),
            group_id: span.group_id,
            has_answer: span.found,
            answer_sim: span.similarity,
            answer_start: span.start,
            answer_len: span.length,
            answer_text: span.text.clone(),
            question_has_quotes: markers.detect(&sentences[sent_id as usize].text),
            answer_has_quotes: span.has_quote_markers,
            best_has_quotes: span.best_has_quotes,
        });
    };
    let mut spans = Vec::new();
    for group in groups {
        let result = find_answer_span(&group, &article, cfg);
        let span = AnswerSpan::from_search(group.group_id, &result, sentences, markers);
        for &s in &group.sent_ids {
            emit(s, &span);
        }
        spans.push((group, span));
    }
    for g in &degenerate {
        let span = AnswerSpan::unsearched(g.group_id);
        for &s in &g.sent_ids {
            emit(s, &span);
        }
    }
    out.records.sort_by_key(|r| r.sent_id);
    out.groups = spans;
    out.degenerate = degenerate;
    Ok(out)
}
