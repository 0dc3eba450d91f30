use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::corpus::SourceGroup;
use crate::error::{Error, Result};
use crate::labels::StanceLabel;
use crate::stance::PseudoLabel;

/// Sizes of the human-coding sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub total: usize,
    /// Single-coded evaluation articles, with and without questions.
    pub main_eval: usize,
    pub double_coded: usize,
    pub extension_per_annotator: usize,
    /// Share of the evaluation set drawn from question-containing articles.
    pub main_question_share: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            total: 700,
            main_eval: 400,
            double_coded: 100,
            extension_per_annotator: 100,
            main_question_share: 0.5,
        }
    }
}

impl SamplePlan {
    pub fn validate(&self) -> Result<()> {
        let sum = self.main_eval + self.double_coded + 2 * self.extension_per_annotator;
        if sum != self.total {
            return Err(Error::config(format!("sample components add up to {sum}, not {}", self.total)));
        }
        if !(0.0..=1.0).contains(&self.main_question_share) {
            return Err(Error::config("main_question_share must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleRole {
    MainEval,
    Double,
    ExtensionA,
    ExtensionB,
}

impl SampleRole {
    pub const ALL: [SampleRole; 4] = [SampleRole::MainEval, SampleRole::Double, SampleRole::ExtensionA, SampleRole::ExtensionB];

    pub fn as_str(self) -> &'static str {
        match self {
            SampleRole::MainEval => "main-eval",
            SampleRole::Double => "double",
            SampleRole::ExtensionA => "extension-a",
            SampleRole::ExtensionB => "extension-b",
        }
    }
}

impl fmt::Display for SampleRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Pseudo-label summary of one candidate article.
#[derive(Debug, Clone, PartialEq)]
pub struct ArticleProfile {
    pub article_id: String,
    pub source_group: SourceGroup,
    pub stance_counts: BTreeMap<StanceLabel, usize>,
}

impl ArticleProfile {
    pub fn has_questions(&self) -> bool {
        self.stance_counts.values().any(|&n| n > 0)
    }

    /// Most frequent stance; ties go to the earlier label in canonical order.
    pub fn dominant_stance(&self) -> Option<StanceLabel> {
        dominant_stance(&self.stance_counts)
    }
}

pub fn dominant_stance(counts: &BTreeMap<StanceLabel, usize>) -> Option<StanceLabel> {
    let mut best: Option<(StanceLabel, usize)> = None;
    for (&label, &n) in counts {
        if n > 0 && best.is_none_or(|(_, b)| n > b) {
            best = Some((label, n));
        }
    }
    best.map(|b| b.0)
}

/// Builds profiles from teacher labels. Articles without any interrogative
/// label are kept as question-free.
pub fn profiles_from_pseudo_labels(articles: &[(String, SourceGroup)], labels: &[PseudoLabel]) -> Vec<ArticleProfile> {
    let mut counts: BTreeMap<&str, BTreeMap<StanceLabel, usize>> = BTreeMap::new();
    for l in labels {
        if let (true, Some(s)) = (l.is_interrogative, l.stance) {
            *counts.entry(l.article_id.as_str()).or_default().entry(s).or_default() += 1;
        }
    }
    articles
        .iter()
        .map(|(id, g)| ArticleProfile {
            article_id: id.clone(),
            source_group: *g,
            stance_counts: counts.get(id.as_str()).cloned().unwrap_or_default(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub article_id: String,
    pub source_group: SourceGroup,
    pub role: SampleRole,
    pub question_containing: bool,
    pub dominant_stance: Option<StanceLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleManifest {
    pub seed: u64,
    pub plan: SamplePlan,
    pub assignments: Vec<Assignment>,
    pub warnings: Vec<String>,
}

impl SampleManifest {
    pub fn count(&self, role: SampleRole, group: Option<SourceGroup>) -> usize {
        self.assignments
            .iter()
            .filter(|a| a.role == role && group.is_none_or(|g| a.source_group == g))
            .count()
    }

    pub fn articles(&self, role: SampleRole) -> impl Iterator<Item = &str> {
        self.assignments.iter().filter(move |a| a.role == role).map(|a| a.article_id.as_str())
    }
}

fn split_half(n: usize) -> [usize; 2] {
    [n - n / 2, n / 2]
}

fn scale(quota: usize, have: usize, need: usize) -> usize {
    if have >= need {
        quota
    } else {
        quota * have / need
    }
}

/// Draws the coding sample: each component is split evenly between the two
/// source strata, and question-containing draws cycle through dominant-stance
/// strata in canonical order so rare stances are covered. A stratum too small
/// for its quota is scaled down proportionally with a warning.
pub fn stratified_sample(profiles: &[ArticleProfile], plan: SamplePlan, seed: u64) -> Result<SampleManifest> {
    plan.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sorted: Vec<&ArticleProfile> = profiles.iter().collect();
    sorted.sort_by(|a, b| a.article_id.cmp(&b.article_id));
    sorted.dedup_by(|a, b| a.article_id == b.article_id);

    let main_q = (plan.main_eval as f64 * plan.main_question_share).round() as usize;
    let main_nq = plan.main_eval - main_q;
    let quotas = [
        split_half(main_q),
        split_half(plan.double_coded),
        split_half(plan.extension_per_annotator),
        split_half(plan.extension_per_annotator),
    ];
    let nq_quota = split_half(main_nq);

    let mut assignments = Vec::new();
    let mut warnings = Vec::new();
    for (gi, group) in SourceGroup::ALL.into_iter().enumerate() {
        let members: Vec<&ArticleProfile> = sorted.iter().copied().filter(|p| p.source_group == group).collect();
        if members.is_empty() {
            return Err(Error::data(format!("no candidate articles in the {} stratum", group.as_str())));
        }
        let mut pools: BTreeMap<StanceLabel, VecDeque<&ArticleProfile>> = BTreeMap::new();
        let mut no_q: Vec<&ArticleProfile> = Vec::new();
        for p in members {
            match p.dominant_stance() {
                Some(s) => pools.entry(s).or_default().push_back(p),
                None => no_q.push(p),
            }
        }
        for pool in pools.values_mut() {
            pool.make_contiguous().shuffle(&mut rng);
        }
        no_q.shuffle(&mut rng);

        let have_q: usize = pools.values().map(VecDeque::len).sum();
        let need_q: usize = quotas.iter().map(|q| q[gi]).sum();
        if have_q < need_q {
            let msg = format!(
                "{} stratum has {have_q} question-containing articles for {need_q} slots; scaling down",
                group.as_str()
            );
            warn!("{msg}");
            warnings.push(msg);
        }
        // Double coding first, then the extensions, then evaluation.
        let order = [
            (SampleRole::Double, quotas[1][gi]),
            (SampleRole::ExtensionA, quotas[2][gi]),
            (SampleRole::ExtensionB, quotas[3][gi]),
            (SampleRole::MainEval, quotas[0][gi]),
        ];
        for (role, quota) in order {
            for p in round_robin(&mut pools, scale(quota, have_q, need_q)) {
                assignments.push(Assignment {
                    article_id: p.article_id.clone(),
                    source_group: group,
                    role,
                    question_containing: true,
                    dominant_stance: p.dominant_stance(),
                });
            }
        }

        let want_nq = nq_quota[gi];
        if no_q.len() < want_nq {
            let msg = format!(
                "{} stratum has {} question-free articles for {want_nq} slots",
                group.as_str(),
                no_q.len()
            );
            warn!("{msg}");
            warnings.push(msg);
        }
        for p in no_q.into_iter().take(want_nq) {
            assignments.push(Assignment {
                article_id: p.article_id.clone(),
                source_group: group,
                role: SampleRole::MainEval,
                question_containing: false,
                dominant_stance: None,
            });
        }
    }
    assignments.sort_by(|a, b| (a.role, a.source_group, &a.article_id).cmp(&(b.role, b.source_group, &b.article_id)));
    Ok(SampleManifest {
        seed,
        plan,
        assignments,
        warnings,
    })
}

fn round_robin<'a>(pools: &mut BTreeMap<StanceLabel, VecDeque<&'a ArticleProfile>>, n: usize) -> Vec<&'a ArticleProfile> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let before = out.len();
        for pool in pools.values_mut() {
            if out.len() == n {
                break;
            }
            if let Some(p) = pool.pop_front() {
                out.push(p);
            }
        }
        if out.len() == before {
            break;
        }
    }
    out
}
