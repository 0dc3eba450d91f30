use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tracing::{info, warn};

use super::{Layout, Providers, Role};
use crate::annotate::build_tasks;
use crate::answers::{answer_article, embed_sentences, EmbeddingSource, FileEmbeddings, ProviderEmbeddings, QaRecord, QuoteMarkers};
use crate::candidates::{calibration_sample, calibration_sample_per_source, detect_candidate, CandidateRecord, RuleSet};
use crate::config::PipelineConfig;
use crate::corpus::{build_context, group_by_article, ingest_articles, segment, ArticleRecord, ContextWindow, IngestReport, Ontology, SentenceRecord, SourceGroup};
use crate::error::{Error, Result};
use crate::io::{read_csv, read_jsonl, write_csv_rows, write_jsonl};
use crate::metrics::{
    aggregate, compute_article_indices, spot_check_candidates, spot_check_sample, stance_answerability, stance_distribution,
    sweep_confidence, sweep_similarity, ArticleIndexRecord, ArticleMeta, ArticlePredictions, Dimension, DialogicityTotals,
    Quantity, SpotCheckRow, Weighting,
};
use crate::providers::{EmbedClient, LabelClient, NerClient};
use crate::report::{self, Table};
use crate::semantics::{annotate_texts, question_context, EntityLabel, EntityRecord, MetaTopicMap};
use crate::stance::{export_training_set, filter_high_confidence, infer_two_step, pseudo_label as teacher_pass, ItemFailure, PseudoLabel, Prediction, TrainingManifest};
use crate::triangulate::{
    agreement, evaluate_binary, evaluate_stance, profiles_from_pseudo_labels, project_corpus, stratified_sample, AgreementReport,
    BinaryReport, GoldUnit, SampleManifest, SampleRole, StanceReport,
};

const LABEL_BATCH: usize = 32;
const EMBED_BATCH: usize = 64;
const NER_BATCH: usize = 16;

fn pool(cfg: &PipelineConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
}

fn ontology(cfg: &PipelineConfig) -> Result<Ontology> {
    match &cfg.ontology {
        Some(p) => Ontology::from_path(p),
        None => Ok(Ontology::bundled()),
    }
}

fn require(path: &std::path::Path, stage: &str) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::data(format!("{} is missing; run `{stage}` first", path.display())))
    }
}

fn load_articles(layout: &Layout) -> Result<Vec<ArticleRecord>> {
    require(&layout.articles(), "ingest")?;
    read_jsonl(&layout.articles())
}

fn load_sentences(layout: &Layout) -> Result<Vec<(String, Vec<SentenceRecord>)>> {
    require(&layout.sentences(), "ingest")?;
    Ok(group_by_article(read_jsonl(&layout.sentences())?))
}

fn load_predictions(layout: &Layout) -> Result<Vec<Prediction>> {
    require(&layout.predictions(), "infer")?;
    read_jsonl(&layout.predictions())
}

fn load_qa(layout: &Layout) -> Result<Vec<QaRecord>> {
    require(&layout.qa(), "answers")?;
    read_jsonl(&layout.qa())
}

fn load_manifest(layout: &Layout) -> Result<SampleManifest> {
    require(&layout.sample_manifest(), "sample")?;
    let raw = std::fs::read_to_string(layout.sample_manifest()).map_err(|e| Error::io(layout.sample_manifest(), e))?;
    Ok(serde_json::from_str(&raw)?)
}

fn write_json<T: Serialize>(path: &std::path::Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn by_article<T: Clone>(items: &[T], key: impl Fn(&T) -> &str) -> HashMap<String, Vec<T>> {
    let mut out: HashMap<String, Vec<T>> = HashMap::new();
    for it in items {
        out.entry(key(it).to_string()).or_default().push(it.clone());
    }
    out
}

fn strata(articles: &[ArticleRecord], onto: &Ontology) -> HashMap<String, SourceGroup> {
    articles
        .iter()
        .filter_map(|a| onto.get(&a.source).map(|m| (a.article_id.clone(), m.source_group())))
        .collect()
}

/// Reads and validates the corpus, segments it and records the ontology join.
pub fn ingest(cfg: &PipelineConfig) -> Result<IngestReport> {
    let layout = Layout::new(&cfg.out_dir);
    let path = cfg
        .articles
        .as_deref()
        .ok_or_else(|| Error::config("no articles file configured"))?;
    let onto = ontology(cfg)?;
    let ingested = ingest_articles(path, &onto, cfg.lenient)?;
    let articles: Vec<&ArticleRecord> = ingested.articles.iter().map(|(a, _)| a).collect();
    let sentences: Vec<Vec<SentenceRecord>> = pool(cfg)?.install(|| articles.par_iter().map(|a| segment(a)).collect());
    write_jsonl(&layout.articles(), articles.iter().copied())?;
    write_jsonl(&layout.sentences(), sentences.iter().flatten())?;
    write_json(&layout.ingest_report(), &ingested.report)?;
    info!(
        articles = articles.len(),
        sentences = sentences.iter().map(Vec::len).sum::<usize>(),
        "ingested"
    );
    Ok(ingested.report)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CandidatesSummary {
    pub sentences: usize,
    pub candidates: usize,
    pub calibration: usize,
}

/// Rule-based candidate flags plus the seeded calibration draw of non-candidates.
pub fn candidates(cfg: &PipelineConfig) -> Result<CandidatesSummary> {
    let layout = Layout::new(&cfg.out_dir);
    let seed = cfg.require_seed()?;
    let rules = match &cfg.rules {
        Some(p) => RuleSet::from_path(p)?,
        None => RuleSet::bundled(),
    }
    .with_accent_folding(cfg.accent_folding)?;
    let groups = load_sentences(&layout)?;
    let source: HashMap<String, String> = load_articles(&layout)?
        .into_iter()
        .map(|a| (a.article_id, a.source))
        .collect();
    let mut records: Vec<CandidateRecord> = pool(cfg)?.install(|| {
        groups
            .par_iter()
            .flat_map_iter(|(_, sents)| sents.iter().map(|s| detect_candidate(s, &rules)))
            .collect()
    });
    let n_candidates = records.iter().filter(|r| r.is_candidate).count();
    let non_candidates = records.iter().filter(|r| !r.is_candidate).map(|r| r.key());
    let picks = if cfg.calibration_per_source {
        let mut per_source: BTreeMap<String, usize> = BTreeMap::new();
        for r in records.iter().filter(|r| r.is_candidate) {
            *per_source.entry(source[&r.article_id].clone()).or_default() += 1;
        }
        let keyed = non_candidates.map(|k| (source[&k.0].clone(), k));
        calibration_sample_per_source(keyed, &per_source, cfg.calibration_fraction, seed)
    } else {
        calibration_sample(non_candidates, n_candidates, cfg.calibration_fraction, seed)
    };
    for r in &mut records {
        r.calibration_pick = picks.contains(&r.key());
    }
    write_jsonl(&layout.candidates(), &records)?;
    let summary = CandidatesSummary {
        sentences: records.len(),
        candidates: n_candidates,
        calibration: picks.len(),
    };
    info!(?summary, "candidates");
    Ok(summary)
}

fn contexts_for(
    groups: &[(String, Vec<SentenceRecord>)],
    radius: usize,
    keep: impl Fn(&SentenceRecord) -> bool,
) -> Result<Vec<ContextWindow>> {
    let mut out = Vec::new();
    for (_, sents) in groups {
        for s in sents.iter().filter(|s| keep(s)) {
            out.push(build_context(sents, s.sent_id, radius)?);
        }
    }
    Ok(out)
}

/// Teacher labels for every candidate and calibration pick.
pub fn pseudo_label(cfg: &PipelineConfig, providers: &Providers) -> Result<usize> {
    let layout = Layout::new(&cfg.out_dir);
    let groups = load_sentences(&layout)?;
    require(&layout.candidates(), "candidates")?;
    let selected: BTreeSet<(String, u32)> = read_jsonl::<CandidateRecord>(&layout.candidates())?
        .into_iter()
        .filter(|c| c.is_candidate || c.calibration_pick)
        .map(|c| c.key())
        .collect();
    let items = contexts_for(&groups, cfg.classification_radius, |s| {
        selected.contains(&(s.article_id.clone(), s.sent_id))
    })?;
    let client = LabelClient::new(providers.transport(Role::Teacher)?).with_limits(LABEL_BATCH, cfg.threads);
    let run = teacher_pass(&items, &client)?;
    if !run.failures.is_empty() {
        warn!(failures = run.failures.len(), "teacher could not label some items");
    }
    write_jsonl(&layout.pseudo_labels(), &run.labels)?;
    write_jsonl(&layout.teacher_failures(), &run.failures)?;
    info!(labels = run.labels.len(), "pseudo-labelled");
    Ok(run.labels.len())
}

/// Stratified coding sample drawn from teacher-labelled article profiles.
pub fn sample(cfg: &PipelineConfig) -> Result<SampleManifest> {
    let layout = Layout::new(&cfg.out_dir);
    let seed = cfg.require_seed()?;
    let onto = ontology(cfg)?;
    let articles = load_articles(&layout)?;
    require(&layout.pseudo_labels(), "pseudo-label")?;
    let labels: Vec<PseudoLabel> = read_jsonl(&layout.pseudo_labels())?;
    let mut eligible = Vec::new();
    for a in &articles {
        match onto.get(&a.source) {
            Some(m) => eligible.push((a.article_id.clone(), m.source_group())),
            None => warn!(article = %a.article_id, source = %a.source, "outlet not in ontology; not sampled"),
        }
    }
    let profiles = profiles_from_pseudo_labels(&eligible, &labels);
    let manifest = stratified_sample(&profiles, cfg.sample_plan(), seed)?;
    write_json(&layout.sample_manifest(), &manifest)?;
    let rows: Vec<Vec<String>> = manifest
        .assignments
        .iter()
        .map(|a| {
            vec![
                a.article_id.clone(),
                a.source_group.as_str().into(),
                a.role.as_str().into(),
                a.question_containing.to_string(),
                a.dominant_stance.map(|s| s.as_str().to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv_rows(
        &layout.sample_csv(),
        &["article_id", "source_group", "role", "question_containing", "dominant_stance"],
        &rows,
    )?;
    Ok(manifest)
}

/// High-confidence teacher labels split into train and validation sets,
/// with the gold evaluation articles held out.
pub fn export_train(cfg: &PipelineConfig) -> Result<TrainingManifest> {
    let layout = Layout::new(&cfg.out_dir);
    let seed = cfg.require_seed()?;
    require(&layout.pseudo_labels(), "pseudo-label")?;
    let labels: Vec<PseudoLabel> = read_jsonl(&layout.pseudo_labels())?;
    let rows = filter_high_confidence(&labels, cfg.teacher_keep)?;
    let exclusion: BTreeSet<String> = load_manifest(&layout)?
        .articles(SampleRole::MainEval)
        .map(str::to_string)
        .collect();
    let wanted: BTreeSet<(String, u32)> = rows.iter().map(|r| (r.article_id.clone(), r.sent_id)).collect();
    let mut contexts = HashMap::new();
    for w in contexts_for(&load_sentences(&layout)?, cfg.classification_radius, |s| {
        wanted.contains(&(s.article_id.clone(), s.sent_id))
    })? {
        contexts.insert((w.article_id, w.sent_id), w.context_text);
    }
    export_training_set(&rows, &contexts, &exclusion, cfg.holdout_fraction, seed, &layout.training_dir())
}

/// Two-step student inference over every sentence.
pub fn infer(cfg: &PipelineConfig, providers: &Providers) -> Result<usize> {
    let layout = Layout::new(&cfg.out_dir);
    let groups = load_sentences(&layout)?;
    let contexts = contexts_for(&groups, cfg.classification_radius, |_| true)?;
    let binary = LabelClient::new(providers.transport(Role::Binary)?).with_limits(LABEL_BATCH, cfg.threads);
    let stance = LabelClient::new(providers.transport(Role::Stance)?).with_limits(LABEL_BATCH, cfg.threads);
    let run = infer_two_step(&contexts, &binary, &stance, cfg.binary_gate)?;
    if !run.failures.is_empty() {
        warn!(failures = run.failures.len(), "inference failed for some sentences");
    }
    write_jsonl(&layout.predictions(), &run.predictions)?;
    write_jsonl::<ItemFailure, _>(&layout.inference_failures(), &run.failures)?;
    info!(predictions = run.predictions.len(), "inferred");
    Ok(run.predictions.len())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnswersSummary {
    pub articles: usize,
    pub questions: usize,
    pub groups: usize,
    pub answered_groups: usize,
    pub degenerate_groups: usize,
    pub renormalized_vectors: usize,
}

#[derive(Serialize)]
struct GroupRow<'a> {
    article_id: &'a str,
    sent_ids: &'a [u32],
    degenerate: bool,
    #[serde(flatten)]
    span: Option<&'a crate::answers::AnswerSpan>,
}

/// Groups questions and searches the following sentences for each group's answer.
pub fn answers(cfg: &PipelineConfig, providers: &Providers) -> Result<AnswersSummary> {
    let layout = Layout::new(&cfg.out_dir);
    let search = cfg.search();
    search.validate()?;
    let groups = load_sentences(&layout)?;
    let preds = by_article(&load_predictions(&layout)?, |p| &p.article_id);
    let source: Box<dyn EmbeddingSource> = match &cfg.embeddings {
        Some(p) => Box::new(FileEmbeddings::from_path(p)?),
        None => Box::new(ProviderEmbeddings::new(
            EmbedClient::new(providers.transport(Role::Embed)?).with_limits(EMBED_BATCH, 1),
        )),
    };
    let markers = QuoteMarkers::default();
    let results = pool(cfg)?.install(|| {
        groups
            .par_iter()
            .map(|(id, sents)| {
                let mut p = preds.get(id).cloned().unwrap_or_default();
                p.sort_by_key(|p| p.sent_id);
                let embedded = embed_sentences(sents, source.as_ref())?;
                let answers = answer_article(sents, &p, &embedded.vectors, &search, &markers)?;
                Ok((embedded.renormalized.len(), answers))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut summary = AnswersSummary {
        articles: groups.len(),
        ..Default::default()
    };
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for (renormalized, a) in &results {
        summary.renormalized_vectors += renormalized;
        summary.questions += a.records.len();
        summary.groups += a.groups.len() + a.degenerate.len();
        summary.answered_groups += a.groups.iter().filter(|(_, s)| s.found).count();
        summary.degenerate_groups += a.degenerate.len();
        records.extend(a.records.iter().cloned());
        let mut article_rows: Vec<(u32, GroupRow)> = a
            .groups
            .iter()
            .map(|(g, s)| {
                (
                    g.group_id,
                    GroupRow {
                        article_id: &g.article_id,
                        sent_ids: &g.sent_ids,
                        degenerate: false,
                        span: Some(s),
                    },
                )
            })
            .chain(a.degenerate.iter().map(|d| {
                (
                    d.group_id,
                    GroupRow {
                        article_id: &d.article_id,
                        sent_ids: &d.sent_ids,
                        degenerate: true,
                        span: None,
                    },
                )
            }))
            .collect();
        article_rows.sort_by_key(|(id, _)| *id);
        rows.extend(article_rows.into_iter().map(|(_, r)| r));
    }
    write_jsonl(&layout.qa(), &records)?;
    write_jsonl(&layout.answer_groups(), &rows)?;
    write_json(&layout.answers_report(), &summary)?;
    info!(?summary, "answers");
    Ok(summary)
}

/// Named entities of each question's ±1 context and of its answer span.
pub fn entities(cfg: &PipelineConfig, providers: &Providers) -> Result<usize> {
    let layout = Layout::new(&cfg.out_dir);
    let groups: HashMap<String, Vec<SentenceRecord>> = load_sentences(&layout)?.into_iter().collect();
    let qa = load_qa(&layout)?;
    let client = NerClient::new(providers.transport(Role::Ner)?, EntityLabel::wire_labels()).with_limits(NER_BATCH, cfg.threads);
    let mut question_texts = Vec::with_capacity(qa.len());
    for r in &qa {
        let sents = groups
            .get(&r.article_id)
            .ok_or_else(|| Error::data(format!("QA record for unknown article {}", r.article_id)))?;
        question_texts.push(question_context(sents, r.sent_id)?);
    }
    let answer_texts: Vec<String> = qa.iter().filter_map(|r| r.answer_text.clone()).collect();
    let questions = annotate_texts(&question_texts, &client, cfg.ner_threshold)?;
    let mut answers = annotate_texts(&answer_texts, &client, cfg.ner_threshold)?.into_iter();
    let records: Vec<EntityRecord> = qa
        .iter()
        .zip(questions)
        .map(|(r, q)| EntityRecord {
            article_id: r.article_id.clone(),
            sent_id: r.sent_id,
            question_entities: q,
            answer_entities: if r.answer_text.is_some() {
                answers.next().unwrap_or_default()
            } else {
                Vec::new()
            },
        })
        .collect();
    write_jsonl(&layout.entities(), &records)?;
    Ok(records.len())
}

/// Per-article indices joined with meta-topics.
pub fn indices(cfg: &PipelineConfig) -> Result<Vec<ArticleIndexRecord>> {
    let layout = Layout::new(&cfg.out_dir);
    let articles = load_articles(&layout)?;
    let topics = match &cfg.meta_topics {
        Some(p) => MetaTopicMap::from_path(p)?,
        None => MetaTopicMap::default(),
    };
    let n_sentences: HashMap<String, usize> = load_sentences(&layout)?
        .into_iter()
        .map(|(id, s)| (id, s.len()))
        .collect();
    let preds = by_article(&load_predictions(&layout)?, |p| &p.article_id);
    let qa = by_article(&load_qa(&layout)?, |r| &r.article_id);
    require(&layout.entities(), "entities")?;
    let ents = by_article(&read_jsonl::<EntityRecord>(&layout.entities())?, |r| &r.article_id);
    let empty = Vec::new();
    let mut records = Vec::with_capacity(articles.len());
    for a in &articles {
        let meta = ArticleMeta {
            article_id: a.article_id.clone(),
            source: a.source.clone(),
            meta_topic: topics.lookup(a.topic_id),
            n_sentences: n_sentences.get(&a.article_id).copied().unwrap_or(0),
        };
        records.push(compute_article_indices(
            &meta,
            preds.get(&a.article_id).unwrap_or(&empty),
            qa.get(&a.article_id).map_or(&[][..], Vec::as_slice),
            ents.get(&a.article_id).map_or(&[][..], Vec::as_slice),
            cfg.stance_gate,
        )?);
    }
    write_jsonl(&layout.indices_jsonl(), &records)?;
    let mut w = csv::Writer::from_writer(crate::io::create(&layout.indices_csv())?);
    for r in &records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(layout.indices_csv(), e))?;
    Ok(records)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SpotCheckSummary {
    pub rows: usize,
    pub warnings: Vec<String>,
    /// An audited sheet was already present and was left untouched.
    pub kept_existing: bool,
}

/// Audit sheet of answer-search decisions. An existing sheet that already
/// carries verdicts is never overwritten.
pub fn spot_check(cfg: &PipelineConfig) -> Result<SpotCheckSummary> {
    let layout = Layout::new(&cfg.out_dir);
    if layout.spot_check().exists() {
        let existing: Vec<SpotCheckRow> = read_csv(&layout.spot_check())?;
        if existing.iter().any(|r| !r.verdict.trim().is_empty()) {
            warn!(path = %layout.spot_check().display(), "audited spot-check sheet present; keeping it");
            return Ok(SpotCheckSummary {
                rows: existing.len(),
                warnings: Vec::new(),
                kept_existing: true,
            });
        }
    }
    let seed = cfg.require_seed()?;
    let articles = load_articles(&layout)?;
    let strata = strata(&articles, &ontology(cfg)?);
    let qa: Vec<QaRecord> = load_qa(&layout)?
        .into_iter()
        .filter(|r| strata.contains_key(&r.article_id))
        .collect();
    let texts: HashMap<(String, u32), String> = load_sentences(&layout)?
        .into_iter()
        .flat_map(|(_, s)| s)
        .map(|s| ((s.article_id, s.sent_id), s.text))
        .collect();
    let cands = spot_check_candidates(&qa, &strata, &texts)?;
    let sample = spot_check_sample(&cands, cfg.spot_check_plan(), seed)?;
    let mut w = csv::Writer::from_writer(crate::io::create(&layout.spot_check())?);
    for r in &sample.rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(layout.spot_check(), e))?;
    Ok(SpotCheckSummary {
        rows: sample.rows.len(),
        warnings: sample.warnings,
        kept_existing: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub eval_articles: usize,
    pub binary: BinaryReport,
    pub stance: StanceReport,
    pub stance_conditional: StanceReport,
    pub agreement: Option<AgreementReport>,
}

/// Student predictions against gold on the main evaluation articles, and
/// agreement between the two coders on the double-coded ones.
pub fn eval(cfg: &PipelineConfig) -> Result<EvalReport> {
    let layout = Layout::new(&cfg.out_dir);
    let gold_path = cfg.gold.as_deref().ok_or_else(|| Error::config("no gold units file configured"))?;
    let units: Vec<GoldUnit> = read_jsonl(gold_path)?;
    let texts: BTreeMap<String, String> = load_articles(&layout)?
        .into_iter()
        .map(|a| (a.article_id, a.text))
        .collect();
    for u in &units {
        let errors = u.validate(texts.get(&u.article_id).map(String::as_str));
        if let Some(e) = errors.first() {
            return Err(Error::data(format!("gold unit {}/{}: {}: {}", u.article_id, u.unit_id, e.field, e.message)));
        }
    }
    let manifest = load_manifest(&layout)?;
    let annotators = [cfg.annotator_a.clone(), cfg.annotator_b.clone()];
    let coder: BTreeMap<String, String> = build_tasks(&manifest, &annotators)
        .into_iter()
        .filter(|t| t.role == SampleRole::MainEval)
        .map(|t| (t.article_id, t.annotators[0].clone()))
        .collect();
    let eval_texts: BTreeMap<String, String> = texts
        .iter()
        .filter(|(id, _)| coder.contains_key(*id))
        .map(|(id, t)| (id.clone(), t.clone()))
        .collect();
    let eval_units: Vec<GoldUnit> = units
        .iter()
        .filter(|u| coder.get(&u.article_id) == Some(&u.annotator_id))
        .cloned()
        .collect();
    let gold = project_corpus(&eval_texts, &eval_units);
    let preds = load_predictions(&layout)?;
    let double: Vec<String> = manifest.articles(SampleRole::Double).map(str::to_string).collect();
    let report = EvalReport {
        eval_articles: eval_texts.len(),
        binary: evaluate_binary(&preds, &gold, cfg.binary_gate)?,
        stance: evaluate_stance(&preds, &gold, cfg.binary_gate, false)?,
        stance_conditional: evaluate_stance(&preds, &gold, cfg.binary_gate, true)?,
        agreement: if double.is_empty() {
            None
        } else {
            Some(agreement(&double, &cfg.annotator_a, &cfg.annotator_b, &units, cfg.align_mode)?)
        },
    };
    write_json(&layout.eval(), &report)?;
    Ok(report)
}

/// Builds every requested table whose inputs exist and writes it under
/// `tables/`. Returns the tables written.
pub fn report(cfg: &PipelineConfig, only: Option<&BTreeSet<&'static str>>) -> Result<Vec<Table>> {
    let layout = Layout::new(&cfg.out_dir);
    let wanted = |name: &str| only.is_none_or(|set| set.contains(name));
    let wants_any = |names: &[&str]| names.iter().any(|n| wanted(n));
    let mut tables = Vec::new();

    if wants_any(&["table1_stance_global", "table5_confidence"]) && layout.predictions().exists() {
        let preds = load_predictions(&layout)?;
        tables.push(report::stance_global(&stance_distribution(&preds, cfg.stance_gate)));
        let groups = load_sentences(&layout)?;
        let by = by_article(&preds, |p| &p.article_id);
        let empty = Vec::new();
        let articles: Vec<ArticlePredictions> = groups
            .iter()
            .map(|(id, s)| ArticlePredictions {
                article_id: id,
                n_sentences: s.len(),
                predictions: by.get(id).unwrap_or(&empty),
            })
            .collect();
        tables.push(report::confidence_sweep(&sweep_confidence(&articles, &cfg.confidence_sweep)?));
    }
    if wants_any(&["table2_meta_topics", "table4_dialogicity", "aggregates"]) && layout.indices_jsonl().exists() {
        let records: Vec<ArticleIndexRecord> = read_jsonl(&layout.indices_jsonl())?;
        tables.push(report::meta_topics(&records));
        tables.push(report::dialogicity(&DialogicityTotals::from_records(&records)));
        let onto = ontology(cfg)?;
        let mut rows = Vec::new();
        for d in Dimension::ALL {
            for q in Quantity::ALL {
                rows.extend(aggregate(&records, d, q, &onto, Weighting::Article));
            }
        }
        tables.push(report::aggregates(&rows));
    }
    if wanted("table3_outlets") && layout.articles().exists() {
        let mut per_source: BTreeMap<String, usize> = BTreeMap::new();
        for a in load_articles(&layout)? {
            *per_source.entry(a.source).or_default() += 1;
        }
        tables.push(report::outlets(&ontology(cfg)?, &per_source));
    }
    if wants_any(&["table4_stance_answerability", "table6_similarity"]) && layout.qa().exists() {
        let qa = load_qa(&layout)?;
        tables.push(report::stance_answerability(&stance_answerability(&qa)));
        tables.push(report::similarity_sweep(&sweep_similarity(&qa, &cfg.similarity_sweep)?));
    }
    if wants_any(&["table7_predicted_answered", "table7_predicted_unanswered"]) && layout.spot_check().exists() {
        let rows: Vec<SpotCheckRow> = read_csv(&layout.spot_check())?;
        let (a, u) = report::spot_check_tables(&rows)?;
        tables.push(a);
        tables.push(u);
    }
    if wants_any(&["table8_model_iaa", "table9_stance_per_class", "figure3_confusion"]) && layout.eval().exists() {
        let raw = std::fs::read_to_string(layout.eval()).map_err(|e| Error::io(layout.eval(), e))?;
        let ev: EvalReport = serde_json::from_str(&raw)?;
        tables.push(report::model_and_agreement(Some(&ev.binary), Some(&ev.stance), ev.agreement.as_ref()));
        tables.push(report::stance_per_class(&ev.stance));
        tables.push(report::confusion_figure(&ev.stance_conditional));
    }

    tables.retain(|t| wanted(t.name));
    tables.sort_by_key(|t| report::TABLE_NAMES.iter().position(|n| *n == t.name));
    let dir = layout.tables_dir();
    for t in &tables {
        t.write(&dir)?;
    }
    info!(tables = tables.len(), "report written");
    Ok(tables)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub articles: usize,
    pub candidates: CandidatesSummary,
    pub pseudo_labels: usize,
    pub predictions: usize,
    pub answers: AnswersSummary,
    pub entity_records: usize,
    pub spot_check_rows: usize,
    pub evaluated: bool,
    pub tables: Vec<String>,
    pub cassette_entries: usize,
}

/// Every stage in order. Evaluation runs only when a gold file is configured.
pub fn run_all(cfg: &PipelineConfig, providers: &Providers) -> Result<RunSummary> {
    let mut s = RunSummary {
        articles: ingest(cfg)?.articles,
        candidates: candidates(cfg)?,
        pseudo_labels: pseudo_label(cfg, providers)?,
        ..Default::default()
    };
    sample(cfg)?;
    export_train(cfg)?;
    s.predictions = infer(cfg, providers)?;
    s.answers = answers(cfg, providers)?;
    s.entity_records = entities(cfg, providers)?;
    indices(cfg)?;
    s.spot_check_rows = spot_check(cfg)?.rows;
    if cfg.gold.is_some() {
        eval(cfg)?;
        s.evaluated = true;
    }
    s.tables = report(cfg, None)?.into_iter().map(|t| t.file_name()).collect();
    s.cassette_entries = providers.finish()?;
    Ok(s)
}
