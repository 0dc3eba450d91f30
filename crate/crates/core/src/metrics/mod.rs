//! Article indices, grouped aggregates, sensitivity sweeps and the answer audit sample.

pub mod aggregate;
pub mod indices;
pub mod questions;
pub mod spot_check;
pub mod stats;
pub mod sweeps;

pub use aggregate::{aggregate, AggregateRow, Dimension, Quantity, Weighting};
pub use indices::{compute_article_indices, personalization, ArticleIndexRecord, ArticleMeta, DialogicityTotals};
pub use questions::{stance_answerability, stance_distribution};
pub use spot_check::{
    spot_check_candidates, spot_check_sample, SpotCheckCandidate, SpotCheckPlan, SpotCheckRow, SpotCheckSample, VERDICTS,
};
pub use stats::{f1, percentile, ratio, summarize, Summary};
pub use sweeps::{
    counts_at, sweep_confidence, sweep_similarity, ArticlePredictions, ConfidenceRow, SimilarityRow,
    CONFIDENCE_THRESHOLDS, SIMILARITY_THRESHOLDS,
};
