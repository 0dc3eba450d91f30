use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tracing::debug;

use super::search::DEGENERATE_NORM;
use crate::corpus::{build_context, SentenceRecord};
use crate::error::{Error, Result};
use crate::io::JsonlReader;
use crate::providers::{EmbedClient, Transport};

/// Radius of the context embedded for each sentence.
pub const EMBEDDING_RADIUS: usize = 1;
const UNIT_TOLERANCE: f64 = 1e-6;

/// Supplies raw (not necessarily normalised) vectors for the sentences of one article.
pub trait EmbeddingSource: Send + Sync {
    fn embed_article(&self, sentences: &[SentenceRecord]) -> Result<Vec<Vec<f64>>>;
}

/// Embeds each sentence's ±1 context window through the embedding provider.
pub struct ProviderEmbeddings<T> {
    client: EmbedClient<T>,
}

impl<T: Transport> ProviderEmbeddings<T> {
    pub fn new(client: EmbedClient<T>) -> Self {
        ProviderEmbeddings { client }
    }
}

impl<T: Transport> EmbeddingSource for ProviderEmbeddings<T> {
    fn embed_article(&self, sentences: &[SentenceRecord]) -> Result<Vec<Vec<f64>>> {
        let texts = sentences
            .iter()
            .map(|s| build_context(sentences, s.sent_id, EMBEDDING_RADIUS).map(|c| c.context_text))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.client.embed(&texts)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorRecord {
    pub article_id: String,
    pub sent_id: u32,
    pub vector: Vec<f64>,
}

/// Precomputed vectors keyed by (article_id, sent_id), read from JSON lines.
pub struct FileEmbeddings {
    vectors: HashMap<(String, u32), Vec<f64>>,
}

impl FileEmbeddings {
    pub fn from_path(path: &Path) -> Result<Self> {
        let mut vectors = HashMap::new();
        for item in JsonlReader::<VectorRecord>::open(path)? {
            let (_, r) = item?;
            vectors.insert((r.article_id, r.sent_id), r.vector);
        }
        Ok(FileEmbeddings { vectors })
    }

    pub fn from_records(records: impl IntoIterator<Item = VectorRecord>) -> Self {
        FileEmbeddings {
            vectors: records.into_iter().map(|r| ((r.article_id, r.sent_id), r.vector)).collect(),
        }
    }
}

impl EmbeddingSource for FileEmbeddings {
    fn embed_article(&self, sentences: &[SentenceRecord]) -> Result<Vec<Vec<f64>>> {
        sentences
            .iter()
            .map(|s| {
                self.vectors
                    .get(&(s.article_id.clone(), s.sent_id))
                    .cloned()
                    .ok_or_else(|| Error::data(format!("no vector for {}#{}", s.article_id, s.sent_id)))
            })
            .collect()
    }
}

/// Unit vectors of one article plus the sentence indices that needed rescaling.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedArticle {
    pub vectors: Vec<Vec<f64>>,
    pub renormalized: Vec<usize>,
}

/// Checks dimensions and rescales any vector that is not unit length.
/// A zero vector is an error, never silently normalised.
pub fn normalize_vectors(raw: Vec<Vec<f64>>) -> Result<EmbeddedArticle> {
    let dim = raw.first().map_or(0, Vec::len);
    let mut renormalized = Vec::new();
    let mut vectors = Vec::with_capacity(raw.len());
    for (i, mut v) in raw.into_iter().enumerate() {
        if v.len() != dim {
            return Err(Error::data(format!(
                "embedding dimension mismatch: sentence 0 has {dim}, sentence {i} has {}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::data(format!("embedding of sentence {i} has non-finite components")));
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= DEGENERATE_NORM {
            return Err(Error::data(format!("embedding of sentence {i} is a zero vector")));
        }
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            v.iter_mut().for_each(|x| *x /= norm);
            renormalized.push(i);
        }
        vectors.push(v);
    }
    if !renormalized.is_empty() {
        debug!(count = renormalized.len(), "rescaled embeddings to unit length");
    }
    Ok(EmbeddedArticle { vectors, renormalized })
}

/// One unit vector per sentence of the article.
pub fn embed_sentences(sentences: &[SentenceRecord], source: &dyn EmbeddingSource) -> Result<EmbeddedArticle> {
    let raw = source.embed_article(sentences)?;
    if raw.len() != sentences.len() {
        return Err(Error::data(format!(
            "embedding source returned {} vectors for {} sentences",
            raw.len(),
            sentences.len()
        )));
    }
    normalize_vectors(raw)
}
