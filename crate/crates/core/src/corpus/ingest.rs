use std::collections::HashSet;
use std::path::Path;

use serde::Serialize;
use tracing::warn;

use super::{ArticleRecord, Ontology, OutletMeta};
use crate::error::{Error, Result};
use crate::io::{JsonlReader, LineError};

/// Streaming reader over an articles file that enforces the record invariants.
pub struct ArticleReader {
    inner: JsonlReader<ArticleRecord>,
    path: String,
    seen: HashSet<String>,
}

impl ArticleReader {
    pub fn open(path: &Path) -> Result<Self> {
        Ok(ArticleReader {
            inner: JsonlReader::open(path)?,
            path: path.display().to_string(),
            seen: HashSet::new(),
        })
    }
}

impl Iterator for ArticleReader {
    type Item = Result<(usize, ArticleRecord)>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, article) = match self.inner.next()? {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        let invalid = |message: String| Error::Record {
            path: self.path.clone(),
            line,
            message,
        };
        if let Err(msg) = article.validate() {
            return Some(Err(invalid(msg)));
        }
        if !self.seen.insert(article.article_id.clone()) {
            return Some(Err(invalid(format!("duplicate article_id {:?}", article.article_id))));
        }
        Some(Ok((line, article)))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub articles: usize,
    pub rejected: Vec<LineError>,
    /// Sources absent from the ontology, sorted.
    pub unknown_sources: Vec<String>,
    pub articles_without_ontology: usize,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    /// Articles in file order, each with its (left-outer) ontology join.
    pub articles: Vec<(ArticleRecord, Option<OutletMeta>)>,
    pub report: IngestReport,
}

/// Reads an articles file and joins each article to its outlet entry.
///
/// Malformed or invalid lines abort ingestion unless `lenient` is set, in which
/// case they are skipped and listed in the report.
pub fn ingest_articles(path: &Path, ontology: &Ontology, lenient: bool) -> Result<Ingested> {
    let mut articles = Vec::new();
    let mut report = IngestReport::default();
    let mut unknown = std::collections::BTreeSet::new();
    for item in ArticleReader::open(path)? {
        match item {
            Ok((_, article)) => {
                let meta = ontology.get(&article.source).cloned();
                if meta.is_none() {
                    report.articles_without_ontology += 1;
                    if unknown.insert(article.source.clone()) {
                        warn!(source = %article.source, "source not in ontology");
                    }
                }
                articles.push((article, meta));
            }
            Err(Error::Record { line, message, .. }) if lenient => {
                warn!(line, %message, "skipping malformed article");
                report.rejected.push(LineError { line, message });
            }
            Err(e) => return Err(e),
        }
    }
    report.articles = articles.len();
    report.unknown_sources = unknown.into_iter().collect();
    Ok(Ingested { articles, report })
}
