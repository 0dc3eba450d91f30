use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_HORIZON: usize = 15;
pub const DEFAULT_WINDOW_LENGTHS: [usize; 5] = [1, 2, 3, 4, 5];
pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.40;

/// Norm under which a vector counts as zero.
pub const DEGENERATE_NORM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub horizon: usize,
    pub window_lengths: Vec<usize>,
    pub similarity_threshold: f64,
    pub stance_gate: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            horizon: DEFAULT_HORIZON,
            window_lengths: DEFAULT_WINDOW_LENGTHS.to_vec(),
            similarity_threshold: DEFAULT_SIMILARITY_THRESHOLD,
            stance_gate: crate::stance::DEFAULT_STANCE_GATE,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(Error::config("horizon must be at least 1"));
        }
        if self.window_lengths.is_empty()
            || self.window_lengths[0] == 0
            || self.window_lengths.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::config("window lengths must be positive and strictly ascending"));
        }
        if !(-1.0..=1.0).contains(&self.similarity_threshold) {
            return Err(Error::config("similarity threshold outside [-1, 1]"));
        }
        if !(0.0..=1.0).contains(&self.stance_gate) {
            return Err(Error::config("stance gate outside [0, 1]"));
        }
        Ok(())
    }
}

/// Sentence vectors of one article with cumulative sums for O(dim) window means.
#[derive(Debug, Clone)]
pub struct ArticleVectors {
    dim: usize,
    n: usize,
    // (n + 1) × dim, row i holds the sum of vectors 0..i.
    prefix: Vec<f64>,
}

impl ArticleVectors {
    pub fn new(vectors: &[Vec<f64>]) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::data("article vectors differ in dimension"));
        }
        let n = vectors.len();
        let mut prefix = vec![0.0; (n + 1) * dim];
        for (i, v) in vectors.iter().enumerate() {
            let (done, rest) = prefix.split_at_mut((i + 1) * dim);
            let prev = &done[i * dim..];
            for k in 0..dim {
                rest[k] = prev[k] + v[k];
            }
        }
        Ok(ArticleVectors { dim, n, prefix })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.prefix[i * self.dim..(i + 1) * self.dim]
    }

    /// Mean of vectors `start .. start + len`.
    pub fn window_mean(&self, start: usize, len: usize) -> Vec<f64> {
        let (lo, hi) = (self.row(start), self.row(start + len));
        hi.iter().zip(lo).map(|(h, l)| (h - l) / len as f64).collect()
    }

    /// Cosine between a unit vector and the window mean, or None for a vanishing mean.
    fn window_cosine(&self, unit: &[f64], start: usize, len: usize) -> Option<f64> {
        let (lo, hi) = (self.row(start), self.row(start + len));
        let mut dot = 0.0;
        let mut sq = 0.0;
        for k in 0..self.dim {
            let s = hi[k] - lo[k];
            dot += unit[k] * s;
            sq += s * s;
        }
        // The 1/len factor cancels in the cosine; only the zero test needs it.
        let norm = sq.sqrt();
        if norm / len as f64 <= DEGENERATE_NORM {
            None
        } else {
            Some(dot / norm)
        }
    }
}

/// Best-scoring window after a question group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowScore {
    pub start: usize,
    pub length: usize,
    pub similarity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanSearch {
    pub found: bool,
    /// None only when no candidate window exists.
    pub best: Option<WindowScore>,
}

/// Scores every window of an allowed length lying in
/// `[last_question + 1, min(last_question + horizon, n - 1)]`.
/// Keeps the first strict maximum scanning start then length ascending, so
/// ties go to the earliest start and then the shortest window.
pub fn best_window(group_vector: &[f64], last_question: usize, article: &ArticleVectors, cfg: &SearchConfig) -> Option<WindowScore> {
    if article.n == 0 {
        return None;
    }
    let first = last_question + 1;
    let last = (last_question + cfg.horizon).min(article.n - 1);
    let mut best: Option<WindowScore> = None;
    for start in first..=last {
        for &length in &cfg.window_lengths {
            if start + length - 1 > last {
                break;
            }
            let Some(similarity) = article.window_cosine(group_vector, start, length) else {
                continue;
            };
            if best.is_none_or(|b| similarity > b.similarity) {
                best = Some(WindowScore {
                    start,
                    length,
                    similarity,
                });
            }
        }
    }
    best
}

pub fn search(group_vector: &[f64], last_question: usize, article: &ArticleVectors, cfg: &SearchConfig) -> SpanSearch {
    let best = best_window(group_vector, last_question, article, cfg);
    SpanSearch {
        found: best.is_some_and(|b| b.similarity >= cfg.similarity_threshold),
        best,
    }
}
