//! Gold annotation schema, coding-sample design, span alignment, agreement
//! between coders, and model evaluation against gold.

mod align;
mod eval;
mod gold;
mod kappa;
mod sample;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use align::{align_spans, corpus_jaccard, span_jaccard, AlignMode, Alignment, MatchedPair};
pub use eval::{
    evaluate_binary, evaluate_stance, project_corpus, project_gold, BinaryReport, ClassMetrics, GoldSentence, StanceReport,
};
pub use gold::{Addressee, FieldError, GoldUnit, InteractionalContext, MacroAxis, QuestionForm};
pub use kappa::{cohen_kappa, label_accuracy};
pub use sample::{
    dominant_stance, profiles_from_pseudo_labels, stratified_sample, ArticleProfile, Assignment, SampleManifest, SamplePlan,
    SampleRole,
};

use crate::error::Result;
use crate::labels::StanceLabel;

/// Agreement between two coders over a set of double-coded articles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n_articles: usize,
    pub n_units_a: usize,
    pub n_units_b: usize,
    pub n_matched_units: usize,
    pub jaccard_overlap: Option<f64>,
    pub label_accuracy: Option<f64>,
    pub cohen_kappa: Option<f64>,
    /// Rows: first coder's function, columns: second coder's, canonical order.
    pub confusion: Vec<Vec<usize>>,
}

/// Aligns the units of `annotator_a` and `annotator_b` in each listed article
/// and pools overlap and label agreement. Units by other coders are ignored;
/// an article neither coder marked still counts as double-coded.
pub fn agreement(
    article_ids: &[String],
    annotator_a: &str,
    annotator_b: &str,
    units: &[GoldUnit],
    mode: AlignMode,
) -> Result<AgreementReport> {
    let mut by_article: BTreeMap<&str, (Vec<&GoldUnit>, Vec<&GoldUnit>)> =
        article_ids.iter().map(|id| (id.as_str(), Default::default())).collect();
    for u in units {
        if let Some(entry) = by_article.get_mut(u.article_id.as_str()) {
            if u.annotator_id == annotator_a {
                entry.0.push(u);
            } else if u.annotator_id == annotator_b {
                entry.1.push(u);
            }
        }
    }
    let k = StanceLabel::ALL.len();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut alignments = Vec::with_capacity(by_article.len());
    let mut pairs = Vec::new();
    let (mut n_a, mut n_b) = (0, 0);
    for (a, b) in by_article.values_mut() {
        let key = |u: &&GoldUnit| (u.start, u.end, u.unit_id.clone());
        a.sort_by_key(key);
        b.sort_by_key(key);
        n_a += a.len();
        n_b += b.len();
        let sa: Vec<_> = a.iter().map(|u| u.start..u.end).collect();
        let sb: Vec<_> = b.iter().map(|u| u.start..u.end).collect();
        let al = align_spans(&sa, &sb, mode);
        for p in &al.pairs {
            let (x, y) = (a[p.a].function, b[p.b].function);
            confusion[x.index()][y.index()] += 1;
            pairs.push((x, y));
        }
        alignments.push(al);
    }
    Ok(AgreementReport {
        n_articles: by_article.len(),
        n_units_a: n_a,
        n_units_b: n_b,
        n_matched_units: pairs.len(),
        jaccard_overlap: corpus_jaccard(&alignments).ok(),
        label_accuracy: label_accuracy(&pairs),
        cohen_kappa: cohen_kappa(&pairs).ok(),
        confusion,
    })
}
