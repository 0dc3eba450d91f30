//! Report tables. Each builder turns stage outputs into a header plus
//! pre-formatted rows; writing is left to the caller.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::corpus::{Ontology, SourceGroup};
use crate::error::{Error, Result};
use crate::io::{fmt_f, fmt_opt, write_csv_rows};
use crate::labels::StanceLabel;
use crate::metrics::{ratio, ArticleIndexRecord, ConfidenceRow, DialogicityTotals, SimilarityRow, SpotCheckRow};
use crate::semantics::MetaTopic;
use crate::triangulate::{AgreementReport, BinaryReport, StanceReport};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, header: &[&str]) -> Self {
        Table {
            name,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    /// First cell of every row.
    pub fn row_keys(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r[0].as_str()).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let header: Vec<&str> = self.header.iter().map(String::as_str).collect();
        write_csv_rows(&dir.join(self.file_name()), &header, &self.rows)
    }
}

/// Every table name the report can produce, in output order.
pub const TABLE_NAMES: [&str; 13] = [
    "table1_stance_global",
    "table2_meta_topics",
    "table3_outlets",
    "table4_stance_answerability",
    "table4_dialogicity",
    "table5_confidence",
    "table6_similarity",
    "table7_predicted_answered",
    "table7_predicted_unanswered",
    "table8_model_iaa",
    "table9_stance_per_class",
    "figure3_confusion",
    "aggregates",
];

fn pct(part: usize, whole: usize) -> String {
    fmt_opt(ratio(part, whole).map(|r| 100.0 * r), 1)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

pub fn stance_global(distribution: &BTreeMap<StanceLabel, usize>) -> Table {
    let mut t = Table::new("table1_stance_global", &["Stance", "N", "% of interrogatives"]);
    let total: usize = distribution.values().sum();
    for label in StanceLabel::ALL {
        let n = distribution.get(&label).copied().unwrap_or(0);
        t.push(vec![label.as_str().into(), n.to_string(), pct(n, total)]);
    }
    t
}

/// One row per assignable meta-topic, empty groups included with blank cells.
pub fn meta_topics(records: &[ArticleIndexRecord]) -> Table {
    let mut t = Table::new(
        "table2_meta_topics",
        &[
            "Meta-topic",
            "Articles",
            "Mean interrogative index",
            "% questions with ORG",
            "% with LOC / EVENT",
        ],
    );
    for topic in MetaTopic::ASSIGNABLE {
        let members: Vec<&ArticleIndexRecord> = records.iter().filter(|r| r.meta_topic == topic).collect();
        let n = members.len();
        let mean = (n > 0).then(|| members.iter().map(|r| r.id_a).sum::<f64>() / n as f64);
        let q: usize = members.iter().map(|r| r.q_a).sum();
        let sum = |f: fn(&ArticleIndexRecord) -> usize| members.iter().map(|r| f(r)).sum::<usize>();
        let (org, loc, event) = (sum(|r| r.q_org_count), sum(|r| r.q_loc_count), sum(|r| r.q_event_count));
        let loc_event = if q == 0 {
            String::new()
        } else {
            format!("{} / {}", pct(loc, q), pct(event, q))
        };
        t.push(vec![
            topic.title().into(),
            n.to_string(),
            fmt_opt(mean, 4),
            pct(org, q),
            loc_event,
        ]);
    }
    t
}

/// Every ontology outlet sorted by scale then domain, followed by corpus
/// sources the ontology does not list.
pub fn outlets(ontology: &Ontology, articles_per_source: &BTreeMap<String, usize>) -> Table {
    let mut t = Table::new("table3_outlets", &["Source", "Articles", "Country/region", "Scale", "Type"]);
    let mut listed: Vec<_> = ontology.iter().collect();
    listed.sort_by(|a, b| (a.scale, &a.source).cmp(&(b.scale, &b.source)));
    for m in listed {
        t.push(vec![
            m.source.clone(),
            articles_per_source.get(&m.source).copied().unwrap_or(0).to_string(),
            m.country_region.clone(),
            capitalize(m.scale.as_str()),
            capitalize(m.outlet_type.as_str()),
        ]);
    }
    for (source, n) in articles_per_source {
        if ontology.get(source).is_none() {
            t.push(vec![source.clone(), n.to_string(), String::new(), String::new(), String::new()]);
        }
    }
    t
}

pub fn stance_answerability(by_stance: &BTreeMap<StanceLabel, (usize, usize)>) -> Table {
    let mut t = Table::new("table4_stance_answerability", &["Stance", "N questions", "% answered"]);
    let (mut n_all, mut a_all) = (0, 0);
    for label in StanceLabel::ALL {
        let (n, a) = by_stance.get(&label).copied().unwrap_or((0, 0));
        n_all += n;
        a_all += a;
        t.push(vec![label.as_str().into(), n.to_string(), pct(a, n)]);
    }
    t.push(vec!["All stances".into(), n_all.to_string(), pct(a_all, n_all)]);
    t
}

pub fn dialogicity(totals: &DialogicityTotals) -> Table {
    let mut t = Table::new("table4_dialogicity", &["Category", "N", "% of interrogatives"]);
    let q = totals.questions();
    for (name, n) in [
        ("Unanswered", totals.unanswered),
        ("Answered (internal)", totals.internal),
        ("Answered (via quotes)", totals.external),
    ] {
        t.push(vec![name.into(), n.to_string(), pct(n, q)]);
    }
    t
}

pub fn confidence_sweep(rows: &[ConfidenceRow]) -> Table {
    let mut t = Table::new(
        "table5_confidence",
        &["Confidence", "N questions", "% of sentences", "Mean ID_a"],
    );
    for r in rows {
        t.push(vec![
            fmt_threshold(r.threshold, 1),
            r.n_questions.to_string(),
            fmt_f(r.pct_sentences, 2),
            fmt_f(r.mean_id_a, 4),
        ]);
    }
    t
}

pub fn similarity_sweep(rows: &[SimilarityRow]) -> Table {
    let mut t = Table::new(
        "table6_similarity",
        &["Similarity", "answered", "unanswered", "internal", "via quotes"],
    );
    for r in rows {
        t.push(vec![
            fmt_threshold(r.threshold, 2),
            fmt_f(r.answered, 1),
            fmt_f(r.unanswered, 1),
            fmt_f(r.internal, 1),
            fmt_f(r.via_quotes, 1),
        ]);
    }
    t
}

const ANSWERED_VERDICTS: [(&str, &str); 4] = [
    ("clear", "Clear answer"),
    ("partial", "Partial answer"),
    ("elsewhere", "Answer elsewhere in article"),
    ("none", "No genuine answer"),
];

fn count_cell(n: usize, total: usize) -> String {
    match ratio(n, total) {
        Some(r) => format!("{n} ({:.0}%)", 100.0 * r),
        None => n.to_string(),
    }
}

/// Audit outcome tables. Rows without a verdict are ignored; an unknown
/// verdict is a data error.
pub fn spot_check_tables(rows: &[SpotCheckRow]) -> Result<(Table, Table)> {
    let mut audited: Vec<(&SpotCheckRow, &str)> = Vec::new();
    for r in rows {
        let v = r.verdict.trim();
        if v.is_empty() {
            continue;
        }
        let v = ANSWERED_VERDICTS
            .iter()
            .map(|(k, _)| *k)
            .find(|k| k.eq_ignore_ascii_case(v))
            .ok_or_else(|| Error::data(format!("unknown verdict {v:?} for {}#{}", r.article_id, r.group_id)))?;
        audited.push((r, v));
    }
    let count = |predicted: &str, stratum: Option<SourceGroup>, verdicts: &[&str]| {
        audited
            .iter()
            .filter(|(r, v)| r.predicted == predicted && stratum.is_none_or(|s| r.stratum == s) && verdicts.contains(v))
            .count()
    };
    let columns = [Some(SourceGroup::Local), Some(SourceGroup::National), None];

    let mut answered = Table::new("table7_predicted_answered", &["Predicted answered", "Local", "National", "Total"]);
    for (key, title) in ANSWERED_VERDICTS {
        let mut row = vec![title.to_string()];
        for s in columns {
            let total = count("answered", s, &["clear", "partial", "elsewhere", "none"]);
            row.push(count_cell(count("answered", s, &[key]), total));
        }
        answered.push(row);
    }

    let mut unanswered = Table::new(
        "table7_predicted_unanswered",
        &["Predicted unanswered", "Local", "National", "Total"],
    );
    for (title, verdicts) in [
        ("Correctly unanswered", &["none"][..]),
        ("Missed answer exists", &["clear", "partial", "elsewhere"][..]),
    ] {
        let mut row = vec![title.to_string()];
        for s in columns {
            let total = count("unanswered", s, &["clear", "partial", "elsewhere", "none"]);
            row.push(count_cell(count("unanswered", s, verdicts), total));
        }
        unanswered.push(row);
    }
    Ok((answered, unanswered))
}

/// Model quality and coder agreement in long form.
pub fn model_and_agreement(
    binary: Option<&BinaryReport>,
    stance: Option<&StanceReport>,
    agreement: Option<&AgreementReport>,
) -> Table {
    let mut t = Table::new("table8_model_iaa", &["Section", "Metric", "Value"]);
    let mut push = |section: &str, metric: &str, value: String| {
        t.push(vec![section.into(), metric.into(), value]);
    };
    if let Some(b) = binary {
        let s = "Binary interrogative detector";
        push(s, "Evaluation sentences", b.n_sentences.to_string());
        push(s, "Accuracy", fmt_opt(b.accuracy, 3));
        push(s, "Precision (interrogative)", fmt_opt(b.precision, 3));
        push(s, "Recall (interrogative)", fmt_opt(b.recall, 3));
        push(s, "F1 (interrogative)", fmt_opt(b.f1, 3));
    }
    if let Some(r) = stance {
        let s = "Six-way stance classifier";
        push(s, "Evaluation interrogatives", r.n_items.to_string());
        push(s, "Macro-F1", fmt_opt(r.macro_f1, 3));
        push(s, "Micro-F1", fmt_opt(r.micro_f1, 3));
    }
    if let Some(a) = agreement {
        let s = "Inter-annotator agreement (stance)";
        push(s, "Double-coded articles", a.n_articles.to_string());
        push(s, "Matched interrogative units", a.n_matched_units.to_string());
        push(s, "Jaccard overlap (spans)", fmt_opt(a.jaccard_overlap, 3));
        push(s, "Accuracy (stance labels)", fmt_opt(a.label_accuracy, 3));
        push(s, "Cohen’s κ", fmt_opt(a.cohen_kappa, 3));
    }
    t
}

pub fn stance_per_class(report: &StanceReport) -> Table {
    let mut t = Table::new("table9_stance_per_class", &["Stance", "Precision", "Recall", "F1", "Support"]);
    for c in &report.per_class {
        t.push(vec![
            c.label.title().into(),
            fmt_opt(c.precision, 2),
            fmt_opt(c.recall, 2),
            fmt_opt(c.f1, 2),
            c.support.to_string(),
        ]);
    }
    t
}

/// Row-normalised confusion among gate-passing gold positives. A gold class
/// with no routed items gets a row of blanks.
pub fn confusion_figure(report: &StanceReport) -> Table {
    let mut header = vec!["Gold"];
    header.extend(StanceLabel::ALL.iter().map(|l| l.title()));
    let mut t = Table::new("figure3_confusion", &header);
    let k = StanceLabel::ALL.len();
    for (label, row) in StanceLabel::ALL.iter().zip(report.row_normalized()) {
        let mut cells = vec![label.title().to_string()];
        match row {
            Some(r) => cells.extend(r[..k].iter().map(|v| fmt_f(*v, 3))),
            None => cells.extend(std::iter::repeat_n(String::new(), k)),
        }
        t.push(cells);
    }
    t
}

/// Long-form per-group summaries produced by the aggregation operator.
pub fn aggregates(rows: &[crate::metrics::AggregateRow]) -> Table {
    let mut t = Table::new(
        "aggregates",
        &["dimension", "key", "quantity", "n_articles", "n_questions", "mean", "median", "sd", "p90"],
    );
    for r in rows {
        t.push(vec![
            r.dimension.clone(),
            r.key.clone(),
            r.quantity.clone(),
            r.n_articles.to_string(),
            r.n_questions.to_string(),
            fmt_f(r.mean, 6),
            fmt_f(r.median, 6),
            fmt_f(r.sd, 6),
            fmt_f(r.p90, 6),
        ]);
    }
    t
}

/// Names accepted by `--table`: a full table name, its suffix
/// (`stance-global`), `table4`, `t4`, `4`, `figure3`, `fig3`, or a
/// comma-separated list of these.
/// Threshold as printed in the sweep tables: trailing zeros dropped, but at
/// least `min_decimals` kept (0.6, 0.40, 0.975).
fn fmt_threshold(t: f64, min_decimals: usize) -> String {
    let full = format!("{t:.4}");
    let (int, frac) = full.split_once('.').unwrap_or((&full, ""));
    let mut frac = frac.trim_end_matches('0').to_string();
    while frac.len() < min_decimals {
        frac.push('0');
    }
    format!("{int}.{frac}")
}

pub fn resolve_table_names(names: &str) -> Result<BTreeSet<&'static str>> {
    let mut out = BTreeSet::new();
    for part in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let p = part.to_ascii_lowercase().replace('-', "_");
        let prefix = if p.chars().all(|c| c.is_ascii_digit()) {
            format!("table{p}")
        } else if let Some(d) = p.strip_prefix("fig").map(|r| r.trim_start_matches("ure")) {
            format!("figure{d}")
        } else if let Some(d) = p.strip_prefix('t').filter(|d| d.chars().all(|c| c.is_ascii_digit())) {
            format!("table{d}")
        } else {
            p.clone()
        };
        let matched: Vec<&'static str> = TABLE_NAMES
            .iter()
            .copied()
            .filter(|n| {
                *n == p || n.split('_').next() == Some(prefix.as_str()) || n.split_once('_').is_some_and(|(_, rest)| rest == p)
            })
            .collect();
        if matched.is_empty() {
            return Err(Error::config(format!("unknown table {part:?}; known: {}", TABLE_NAMES.join(", "))));
        }
        out.extend(matched);
    }
    Ok(out)
}
