//! Audit sample of answer-search decisions, balanced across source strata.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::answers::QaRecord;
use crate::corpus::SourceGroup;
use crate::error::{Error, Result};

/// Audit verdicts an auditor may write into the manifest.
pub const VERDICTS: [&str; 4] = ["clear", "partial", "elsewhere", "none"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotCheckPlan {
    pub n_total: usize,
    pub n_answered: usize,
    pub n_unanswered: usize,
}

impl Default for SpotCheckPlan {
    fn default() -> Self {
        SpotCheckPlan {
            n_total: 50,
            n_answered: 40,
            n_unanswered: 10,
        }
    }
}

impl SpotCheckPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_answered + self.n_unanswered != self.n_total || self.n_total == 0 {
            return Err(Error::config(format!(
                "spot-check plan {}+{} does not add up to {}",
                self.n_answered, self.n_unanswered, self.n_total
            )));
        }
        Ok(())
    }
}

/// One question group eligible for auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct SpotCheckCandidate {
    pub article_id: String,
    pub group_id: u32,
    pub stratum: SourceGroup,
    pub answered: bool,
    pub sent_ids: Vec<u32>,
    pub question_text: String,
    pub answer_start: Option<u32>,
    pub answer_len: Option<usize>,
    pub answer_text: Option<String>,
    pub answer_sim: Option<f64>,
}

/// Manifest row. `verdict` and `notes` are left blank for the auditor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheckRow {
    pub stratum: SourceGroup,
    pub article_id: String,
    pub group_id: u32,
    pub sent_ids: String,
    pub predicted: String,
    pub question_text: String,
    pub answer_start: Option<u32>,
    pub answer_len: Option<usize>,
    pub answer_sim: Option<f64>,
    pub answer_text: Option<String>,
    pub verdict: String,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpotCheckSample {
    pub rows: Vec<SpotCheckRow>,
    pub warnings: Vec<String>,
}

/// Collapses QA records into groups. `question_text` maps (article, sentence) to text.
pub fn spot_check_candidates(
    records: &[QaRecord],
    strata: &HashMap<String, SourceGroup>,
    question_text: &HashMap<(String, u32), String>,
) -> Result<Vec<SpotCheckCandidate>> {
    let mut groups: BTreeMap<(String, u32), Vec<&QaRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.article_id.clone(), r.group_id)).or_default().push(r);
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((article_id, group_id), mut members) in groups {
        members.sort_by_key(|r| r.sent_id);
        let stratum = *strata
            .get(&article_id)
            .ok_or_else(|| Error::data(format!("article {article_id} has no source stratum")))?;
        let first = members[0];
        let mut text = Vec::with_capacity(members.len());
        for m in &members {
            let t = question_text
                .get(&(article_id.clone(), m.sent_id))
                .ok_or_else(|| Error::data(format!("no sentence text for {article_id}#{}", m.sent_id)))?;
            text.push(t.as_str());
        }
        out.push(SpotCheckCandidate {
            stratum,
            group_id,
            answered: first.has_answer,
            sent_ids: members.iter().map(|m| m.sent_id).collect(),
            question_text: text.join(" "),
            answer_start: first.answer_start,
            answer_len: first.answer_len,
            answer_text: first.answer_text.clone(),
            answer_sim: first.answer_sim,
            article_id,
        });
    }
    Ok(out)
}

struct Cell {
    stratum: SourceGroup,
    answered: bool,
    quota: usize,
    taken: Vec<usize>,
}

/// Draws the audit sample: one group per article, quotas split evenly over the
/// two strata (the local stratum takes the odd unit). Shortfalls are filled
/// first from the same status in the other stratum, then the other status in
/// the same stratum, then from anything left, each with a warning.
pub fn spot_check_sample(candidates: &[SpotCheckCandidate], plan: SpotCheckPlan, seed: u64) -> Result<SpotCheckSample> {
    plan.validate()?;
    let n_articles = candidates.iter().map(|c| &c.article_id).collect::<HashSet<_>>().len();
    if n_articles < plan.n_total {
        return Err(Error::data(format!(
            "spot check needs {} distinct articles, only {n_articles} have question groups",
            plan.n_total
        )));
    }

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        (&candidates[a].article_id, candidates[a].group_id).cmp(&(&candidates[b].article_id, candidates[b].group_id))
    });
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let half = |n: usize| (n - n / 2, n / 2);
    let (ul, un) = half(plan.n_unanswered);
    let (al, an) = half(plan.n_answered);
    // Scarcer unanswered cells draw first so shared articles do not starve them.
    let mut cells = vec![
        Cell { stratum: SourceGroup::Local, answered: false, quota: ul, taken: vec![] },
        Cell { stratum: SourceGroup::National, answered: false, quota: un, taken: vec![] },
        Cell { stratum: SourceGroup::Local, answered: true, quota: al, taken: vec![] },
        Cell { stratum: SourceGroup::National, answered: true, quota: an, taken: vec![] },
    ];
    let mut used_articles: HashSet<&str> = HashSet::new();
    let mut warnings = Vec::new();

    let mut fill = |cells: &mut Vec<Cell>, pass: u8, warnings: &mut Vec<String>| {
        for cell in cells.iter_mut() {
            let before = cell.taken.len();
            for &i in &order {
                if cell.taken.len() >= cell.quota {
                    break;
                }
                let c = &candidates[i];
                let ok = match pass {
                    0 => c.stratum == cell.stratum && c.answered == cell.answered,
                    1 => c.stratum != cell.stratum && c.answered == cell.answered,
                    2 => c.stratum == cell.stratum && c.answered != cell.answered,
                    _ => true,
                };
                if ok && used_articles.insert(c.article_id.as_str()) {
                    cell.taken.push(i);
                }
            }
            let added = cell.taken.len() - before;
            if pass > 0 && added > 0 {
                let how = match pass {
                    1 => "same status from the other stratum",
                    2 => "the other status in the same stratum",
                    _ => "any remaining group",
                };
                warnings.push(format!(
                    "{} {} cell short; filled {added} with {how}",
                    cell.stratum.as_str(),
                    if cell.answered { "answered" } else { "unanswered" },
                ));
            }
        }
    };
    for pass in 0..4 {
        fill(&mut cells, pass, &mut warnings);
        if cells.iter().all(|c| c.taken.len() >= c.quota) {
            break;
        }
    }
    for w in &warnings {
        warn!("{w}");
    }

    let mut rows: Vec<SpotCheckRow> = cells
        .iter()
        .flat_map(|c| c.taken.iter())
        .map(|&i| {
            let c = &candidates[i];
            SpotCheckRow {
                stratum: c.stratum,
                article_id: c.article_id.clone(),
                group_id: c.group_id,
                sent_ids: c.sent_ids.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
                predicted: if c.answered { "answered" } else { "unanswered" }.into(),
                question_text: c.question_text.clone(),
                answer_start: c.answer_start,
                answer_len: c.answer_len,
                answer_sim: c.answer_sim,
                answer_text: c.answer_text.clone(),
                verdict: String::new(),
                notes: String::new(),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.stratum, &a.predicted, &a.article_id, a.group_id).cmp(&(b.stratum, &b.predicted, &b.article_id, b.group_id))
    });
    Ok(SpotCheckSample { rows, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(article: usize, stratum: SourceGroup, answered: bool) -> SpotCheckCandidate {
        SpotCheckCandidate {
            article_id: format!("{}-{article:03}", stratum.as_str()),
            group_id: 0,
            stratum,
            answered,
            sent_ids: vec![1],
            question_text: "Pourquoi ?".into(),
            answer_start: answered.then_some(2),
            answer_len: answered.then_some(1),
            answer_text: answered.then(|| "Parce que.".into()),
            answer_sim: Some(if answered { 0.9 } else { 0.2 }),
        }
    }

    fn population(unanswered_per_stratum: usize) -> Vec<SpotCheckCandidate> {
        let mut v = Vec::new();
        for s in SourceGroup::ALL {
            for i in 0..60 {
                v.push(cand(i, s, i >= unanswered_per_stratum));
            }
        }
        v
    }

    fn count(s: &SpotCheckSample, stratum: SourceGroup, predicted: &str) -> usize {
        s.rows.iter().filter(|r| r.stratum == stratum && r.predicted == predicted).count()
    }

    #[test]
    fn default_plan_layout() {
        let s = spot_check_sample(&population(20), SpotCheckPlan::default(), 7).unwrap();
        assert_eq!(s.rows.len(), 50);
        for g in SourceGroup::ALL {
            assert_eq!(count(&s, g, "answered"), 20);
            assert_eq!(count(&s, g, "unanswered"), 5);
        }
        let articles: HashSet<_> = s.rows.iter().map(|r| &r.article_id).collect();
        assert_eq!(articles.len(), 50);
        assert!(s.warnings.is_empty());
        assert!(s.rows.iter().all(|r| r.verdict.is_empty()));
    }

    #[test]
    fn seeded() {
        let p = population(20);
        let a = spot_check_sample(&p, SpotCheckPlan::default(), 3).unwrap();
        let b = spot_check_sample(&p, SpotCheckPlan::default(), 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scarce_unanswered_falls_back() {
        let mut p = population(0);
        // 4 local + 4 national unanswered groups
        for (_, c) in p.iter_mut().enumerate().filter(|(i, _)| i % 60 < 4) {
            c.answered = false;
        }
        let s = spot_check_sample(&p, SpotCheckPlan::default(), 1).unwrap();
        let unanswered = s.rows.iter().filter(|r| r.predicted == "unanswered").count();
        assert_eq!(unanswered, 8);
        assert_eq!(s.rows.len(), 50);
        assert!(!s.warnings.is_empty());
    }

    #[test]
    fn too_few_articles() {
        let p: Vec<_> = (0..49).map(|i| cand(i, SourceGroup::Local, true)).collect();
        assert!(spot_check_sample(&p, SpotCheckPlan::default(), 1).is_err());
    }
}
