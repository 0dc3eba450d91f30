use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::indices::ArticleIndexRecord;
use super::stats::summarize;
use crate::corpus::Ontology;
use crate::error::{Error, Result};

/// Article-level grouping keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dimension {
    Outlet,
    Country,
    Scale,
    MetaTopic,
    SourceGroup,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Outlet,
        Dimension::Country,
        Dimension::Scale,
        Dimension::MetaTopic,
        Dimension::SourceGroup,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Outlet => "outlet",
            Dimension::Country => "country",
            Dimension::Scale => "scale",
            Dimension::MetaTopic => "meta-topic",
            Dimension::SourceGroup => "source-group",
        }
    }

    /// Group key of a record; records from unlisted outlets fall under "unknown".
    pub fn key(self, record: &ArticleIndexRecord, ontology: &Ontology) -> String {
        let meta = ontology.get(&record.source);
        match self {
            Dimension::Outlet => record.source.clone(),
            Dimension::Country => meta.map_or("unknown".into(), |m| m.country_region.clone()),
            Dimension::Scale => meta.map_or("unknown".into(), |m| m.scale.as_str().to_string()),
            Dimension::MetaTopic => record.meta_topic.as_str().to_string(),
            Dimension::SourceGroup => meta.map_or("unknown".into(), |m| m.source_group().as_str().to_string()),
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        match s.as_str() {
            "outlet" | "source" => Ok(Dimension::Outlet),
            "country" | "country-region" => Ok(Dimension::Country),
            "scale" => Ok(Dimension::Scale),
            "meta-topic" | "topic" => Ok(Dimension::MetaTopic),
            "source-group" => Ok(Dimension::SourceGroup),
            _ => Err(Error::config(format!("unknown aggregation dimension {s:?}"))),
        }
    }
}

/// Article-level quantities that can be aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    InterrogativeIndex,
    Answerability,
    ShareUnanswered,
    ShareInternal,
    ShareExternal,
    AddrActor,
    AddrGroup,
    AddrIssue,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::InterrogativeIndex,
        Quantity::Answerability,
        Quantity::ShareUnanswered,
        Quantity::ShareInternal,
        Quantity::ShareExternal,
        Quantity::AddrActor,
        Quantity::AddrGroup,
        Quantity::AddrIssue,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::InterrogativeIndex => "interrogative-index",
            Quantity::Answerability => "answerability",
            Quantity::ShareUnanswered => "share-unanswered",
            Quantity::ShareInternal => "share-internal",
            Quantity::ShareExternal => "share-external",
            Quantity::AddrActor => "addr-actor",
            Quantity::AddrGroup => "addr-group",
            Quantity::AddrIssue => "addr-issue",
        }
    }

    /// None where the quantity is undefined (no questions).
    pub fn value(self, r: &ArticleIndexRecord) -> Option<f64> {
        match self {
            Quantity::InterrogativeIndex => Some(r.id_a),
            Quantity::Answerability => r.ans_a,
            Quantity::ShareUnanswered => r.share_unanswered,
            Quantity::ShareInternal => r.share_internal,
            Quantity::ShareExternal => r.share_external,
            Quantity::AddrActor => r.addr_actor,
            Quantity::AddrGroup => r.addr_group,
            Quantity::AddrIssue => r.addr_issue,
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        Quantity::ALL
            .into_iter()
            .find(|q| q.as_str() == s)
            .or(match s.as_str() {
                "id-a" | "id" => Some(Quantity::InterrogativeIndex),
                "ans-a" | "ans" => Some(Quantity::Answerability),
                _ => None,
            })
            .ok_or_else(|| Error::config(format!("unknown aggregate quantity {s:?}")))
    }
}

/// Each article counts once, or each article counts as many times as it has questions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    #[default]
    Article,
    Question,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub dimension: String,
    pub key: String,
    pub quantity: String,
    pub n_articles: usize,
    pub n_questions: usize,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    pub p90: f64,
}

/// Per-group summary of `quantity`; groups without a defined value are omitted.
/// Rows are sorted by key.
pub fn aggregate(
    records: &[ArticleIndexRecord],
    dimension: Dimension,
    quantity: Quantity,
    ontology: &Ontology,
    weighting: Weighting,
) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<String, Vec<&ArticleIndexRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(dimension.key(r, ontology)).or_default().push(r);
    }
    groups
        .into_iter()
        .filter_map(|(key, members)| {
            let pairs: Vec<(f64, f64)> = members
                .iter()
                .filter_map(|r| {
                    let w = match weighting {
                        Weighting::Article => 1.0,
                        Weighting::Question => r.q_a as f64,
                    };
                    quantity.value(r).map(|v| (v, w))
                })
                .collect();
            let s = summarize(&pairs)?;
            Some(AggregateRow {
                dimension: dimension.as_str().to_string(),
                key,
                quantity: quantity.as_str().to_string(),
                n_articles: s.n,
                n_questions: members
                    .iter()
                    .filter(|r| quantity.value(r).is_some())
                    .map(|r| r.q_a)
                    .sum(),
                mean: s.mean,
                median: s.median,
                sd: s.sd,
                p90: s.p90,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::MetaTopic;

    pub(crate) fn record(id: &str, source: &str, q: usize, s: usize, a: usize) -> ArticleIndexRecord {
        ArticleIndexRecord {
            article_id: id.into(),
            source: source.into(),
            meta_topic: MetaTopic::Technology,
            s_a: s,
            q_a: q,
            a_a: a,
            id_a: q as f64 / s as f64,
            ans_a: (q > 0).then(|| a as f64 / q as f64),
            share_unanswered: None,
            share_internal: None,
            share_external: None,
            addr_actor: None,
            addr_group: None,
            addr_issue: None,
            pers_flag_count: 0,
            q_quote_count: 0,
            q_org_count: 0,
            q_loc_count: 0,
            q_event_count: 0,
            n_unanswered: q - a,
            n_internal: a,
            n_external: 0,
            n_actor: 0,
            n_group: 0,
            n_issue: q,
        }
    }

    #[test]
    fn same_outlet_mean() {
        let rs = [record("a", "lacote.ch", 2, 10, 1), record("b", "lacote.ch", 4, 10, 4)];
        let rows = aggregate(&rs, Dimension::Outlet, Quantity::InterrogativeIndex, &Ontology::bundled(), Weighting::Article);
        assert_eq!(rows.len(), 1);
        assert!((rows[0].mean - 0.3).abs() < 1e-12);
        assert_eq!(rows[0].n_articles, 2);
    }

    #[test]
    fn null_answerability_excluded_and_empty_groups_omitted() {
        let rs = [record("a", "lacote.ch", 0, 10, 0), record("b", "arcinfo.ch", 0, 5, 0), record("c", "lacote.ch", 2, 10, 1)];
        let rows = aggregate(&rs, Dimension::Outlet, Quantity::Answerability, &Ontology::bundled(), Weighting::Article);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].key, "lacote.ch");
        assert_eq!(rows[0].n_articles, 1);
        assert_eq!(rows[0].mean, 0.5);
        let rows = aggregate(&rs, Dimension::Outlet, Quantity::InterrogativeIndex, &Ontology::bundled(), Weighting::Article);
        assert_eq!(rows.len(), 2);
    }

    #[test]
    fn question_weighting() {
        let rs = [record("a", "lacote.ch", 1, 10, 1), record("b", "lacote.ch", 3, 10, 0)];
        let rows = aggregate(&rs, Dimension::Outlet, Quantity::Answerability, &Ontology::bundled(), Weighting::Question);
        assert_eq!(rows[0].mean, 0.25);
    }

    #[test]
    fn ontology_dimensions() {
        let rs = [
            record("a", "lacote.ch", 2, 10, 1),
            record("b", "francetvinfo.fr", 1, 10, 1),
            record("c", "nowhere.example", 1, 10, 1),
        ];
        let onto = Ontology::bundled();
        let rows = aggregate(&rs, Dimension::SourceGroup, Quantity::InterrogativeIndex, &onto, Weighting::Article);
        let keys: Vec<&str> = rows.iter().map(|r| r.key.as_str()).collect();
        assert_eq!(keys, ["local", "national", "unknown"]);
        let rows = aggregate(&rs, Dimension::Country, Quantity::InterrogativeIndex, &onto, Weighting::Article);
        assert_eq!(rows.iter().map(|r| r.n_articles).sum::<usize>(), 3);
    }

    #[test]
    fn unknown_dimension() {
        assert!("planet".parse::<Dimension>().is_err());
        assert_eq!("meta_topic".parse::<Dimension>().unwrap(), Dimension::MetaTopic);
    }
}
