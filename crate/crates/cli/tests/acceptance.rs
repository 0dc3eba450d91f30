//! Acceptance suite. Runs every headline criterion and prints one line each;
//! exits non-zero if any fails.

#[path = "../../core/tests/support/answer_oracle.rs"]
mod answer_oracle;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use answer_oracle::{oracle_search, random_article};
use qstance_core::answers::{find_answer_span, unit_mean, ArticleVectors, QaRecord, QuestionGroup, SearchConfig};
use qstance_core::candidates::{detect_candidate, RuleId, RuleSet};
use qstance_core::config::PipelineConfig;
use qstance_core::corpus::{segment, ArticleRecord, SentenceRecord, SourceGroup};
use qstance_core::io::read_jsonl;
use qstance_core::metrics::{
    compute_article_indices, f1, spot_check_sample, sweep_confidence, sweep_similarity, ArticleMeta,
    ArticlePredictions, DialogicityTotals, SpotCheckCandidate, SpotCheckPlan,
};
use qstance_core::pipeline::{self, Providers};
use qstance_core::semantics::{EntityLabel, EntityMention, EntityRecord, MetaTopic};
use qstance_core::stance::Prediction;
use qstance_core::triangulate::{cohen_kappa, stratified_sample, ArticleProfile, SamplePlan, SampleRole};
use qstance_core::StanceLabel;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture_dir() -> PathBuf {
    workspace().join("fixtures/corpus50")
}

// ---------------------------------------------------------------------------
// answer search

fn answer_search_matches_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7_000_001);
    let dims = [8, 64, 1024];
    let cfg = SearchConfig::default();
    let mut groups = 0;
    let mut found = 0;
    for i in 0..1000 {
        let dim = dims[i % 3];
        let n = rng.random_range(2..=40);
        let vectors = random_article(&mut rng, n, dim);
        let len = rng.random_range(1..=3.min(n - 1));
        let first = rng.random_range(0..=n - 1 - len);
        let members: Vec<usize> = (first..first + len).collect();
        let group = QuestionGroup {
            article_id: format!("r{i}"),
            group_id: 0,
            sent_ids: members.iter().map(|&m| m as u32).collect(),
            group_vector: unit_mean(members.iter().map(|&m| vectors[m].as_slice())).ok_or("degenerate group")?,
        };
        let article = ArticleVectors::new(&vectors).map_err(|e| e.to_string())?;
        let got = find_answer_span(&group, &article, &cfg);
        let want = oracle_search(&vectors, &members, cfg.horizon, &cfg.window_lengths, cfg.similarity_threshold);
        groups += 1;
        found += usize::from(want.found);
        ensure(got.found == want.found, || format!("article {i}: found {} vs oracle {}", got.found, want.found))?;
        match (got.best, want.best) {
            (None, None) => {}
            (Some(b), Some((s, l, sim))) => {
                ensure((b.start, b.length) == (s, l), || {
                    format!("article {i}: window ({}, {}) vs oracle ({s}, {l})", b.start, b.length)
                })?;
                ensure((b.similarity - sim).abs() <= 1e-6, || {
                    format!("article {i}: similarity {} vs oracle {sim}", b.similarity)
                })?;
            }
            (g, w) => return Err(format!("article {i}: best {g:?} vs oracle {w:?}")),
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{groups} groups agree, {found} answered, {:.1}s", elapsed.as_secs_f64()))
}

// ---------------------------------------------------------------------------
// candidate recall

fn candidate_recall() -> Outcome {
    let rules = RuleSet::bundled();
    let articles: Vec<ArticleRecord> = read_jsonl(&fixture_dir().join("articles.jsonl")).map_err(|e| e.to_string())?;
    let mut with_qmark = 0;
    for a in &articles {
        for s in segment(a) {
            if s.text.contains('?') {
                with_qmark += 1;
                let c = detect_candidate(&s, &rules);
                ensure(c.matched_rules.contains(&RuleId::Qmark), || format!("missed: {}", s.text))?;
            }
        }
    }
    ensure(with_qmark > 0, || "fixture has no question marks".into())?;

    let exemplars: [(&str, RuleId); 16] = [
        ("Comment la commune compte-t-elle financer le projet.", RuleId::InitialPattern),
        ("Pourquoi le chantier a pris du retard, nul ne le sait.", RuleId::InitialPattern),
        ("Combien de temps faudra-t-il attendre.", RuleId::InitialPattern),
        ("Est-ce que la réforme passera l'hiver.", RuleId::InitialPattern),
        ("Y a-t-il encore une chance de sauver la saison.", RuleId::InitialPattern),
        ("Faut-il s'inquiéter de cette hausse.", RuleId::InitialPattern),
        ("Peut-on vraiment parler de succès.", RuleId::InitialPattern),
        ("Doit-on revoir toute la stratégie.", RuleId::InitialPattern),
        ("Que faire face à la pénurie de médecins.", RuleId::InitialPattern),
        ("On peut se demander si cela suffira.", RuleId::VerbPattern),
        ("On est en droit de se demander ce qui a changé.", RuleId::VerbPattern),
        ("Le syndicat s'interroge sur la suite du dossier.", RuleId::VerbPattern),
        ("Cette décision pose la question du financement.", RuleId::NounPattern),
        ("La question demeure entière pour les habitants.", RuleId::NounPattern),
        ("Plusieurs questions sans réponse subsistent.", RuleId::NounPattern),
        ("Reste à savoir qui paiera.", RuleId::NounPattern),
    ];
    for (text, family) in exemplars {
        let c = detect_candidate(&sentence(text), &rules);
        ensure(c.is_candidate && c.matched_rules.contains(&family), || {
            format!("{text:?}: got {:?}, expected {family:?}", c.matched_rules)
        })?;
    }

    let decl = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/declaratives_fr.txt"))
        .map_err(|e| e.to_string())?;
    let lines: Vec<&str> = decl.lines().filter(|l| !l.trim().is_empty()).collect();
    ensure(lines.len() == 100, || format!("declarative fixture has {} lines", lines.len()))?;
    let false_qmark = lines
        .iter()
        .filter(|l| detect_candidate(&sentence(l), &rules).matched_rules.contains(&RuleId::Qmark))
        .count();
    ensure(false_qmark == 0, || format!("{false_qmark} declaratives flagged by the qmark rule"))?;
    Ok(format!("{with_qmark} qmark sentences, {} exemplars, 0/100 declaratives", exemplars.len()))
}

fn sentence(text: &str) -> SentenceRecord {
    SentenceRecord {
        article_id: "x".into(),
        sent_id: 0,
        text: text.into(),
    }
}

// ---------------------------------------------------------------------------
// index arithmetic

fn pred(sent_id: u32, binary: bool, stance: Option<(StanceLabel, f64)>) -> Prediction {
    Prediction {
        article_id: "a1".into(),
        sent_id,
        binary_label: binary,
        binary_conf: 0.9,
        stance: stance.map(|s| s.0),
        stance_conf: stance.map(|s| s.1),
    }
}

fn qa(sent_id: u32, answered: bool, answer_quotes: bool, question_quotes: bool) -> QaRecord {
    QaRecord {
        article_id: "a1".into(),
        sent_id,
        stance: StanceLabel::Rhetorical,
        stance_conf: 0.9,
        group_id: sent_id,
        has_answer: answered,
        answer_sim: Some(if answered { 0.9 } else { 0.1 }),
        answer_start: answered.then_some(sent_id + 1),
        answer_len: answered.then_some(1),
        answer_text: answered.then(|| "r".into()),
        question_has_quotes: question_quotes,
        answer_has_quotes: answer_quotes,
        best_has_quotes: answer_quotes,
    }
}

fn ents(sent_id: u32, labels: &[EntityLabel]) -> EntityRecord {
    EntityRecord {
        article_id: "a1".into(),
        sent_id,
        question_entities: labels
            .iter()
            .enumerate()
            .map(|(i, &label)| EntityMention {
                text: "e".into(),
                label,
                score: 0.9,
                start: i,
                end: i + 1,
            })
            .collect(),
        answer_entities: vec![],
    }
}

fn index_arithmetic() -> Outcome {
    use EntityLabel::*;
    let meta = ArticleMeta {
        article_id: "a1".into(),
        source: "arcinfo.ch".into(),
        meta_topic: MetaTopic::LocalNews,
        n_sentences: 8,
    };
    let predictions = vec![
        pred(0, false, None),
        pred(1, true, Some((StanceLabel::Rhetorical, 0.9))),
        pred(2, true, Some((StanceLabel::InformationSeeking, 0.8))),
        pred(3, true, Some((StanceLabel::Leading, 0.75))),
        pred(4, true, Some((StanceLabel::Tag, 0.65))),
        pred(5, true, Some((StanceLabel::FramingProcedural, 0.7))),
    ];
    let qas = vec![qa(1, false, false, false), qa(2, true, false, false), qa(3, true, true, true), qa(5, true, false, false)];
    let es = vec![ents(1, &[Person]), ents(2, &[GenericSocialGroup]), ents(3, &[Event]), ents(5, &[Organization, Location])];
    let r = compute_article_indices(&meta, &predictions, &qas, &es, 0.7).map_err(|e| e.to_string())?;
    // Worked by hand: sentences 1, 2, 3 and 5 are questions at the 0.7 gate.
    let want = [
        ("S_a", r.s_a as f64, 8.0),
        ("Q_a", r.q_a as f64, 4.0),
        ("A_a", r.a_a as f64, 3.0),
        ("ID_a", r.id_a, 0.5),
        ("Ans_a", r.ans_a.unwrap_or(f64::NAN), 0.75),
        ("unanswered", r.share_unanswered.unwrap_or(f64::NAN), 0.25),
        ("internal", r.share_internal.unwrap_or(f64::NAN), 0.5),
        ("external", r.share_external.unwrap_or(f64::NAN), 0.25),
        ("actor", r.addr_actor.unwrap_or(f64::NAN), 0.5),
        ("group", r.addr_group.unwrap_or(f64::NAN), 0.25),
        ("issue", r.addr_issue.unwrap_or(f64::NAN), 0.25),
        ("persons", r.pers_flag_count as f64, 1.0),
        ("quotes", r.q_quote_count as f64, 1.0),
        ("org", r.q_org_count as f64, 1.0),
        ("loc", r.q_loc_count as f64, 1.0),
        ("event", r.q_event_count as f64, 1.0),
    ];
    for (name, got, expected) in want {
        ensure(got == expected, || format!("{name}: {got} != {expected}"))?;
    }

    let empty = ArticleMeta {
        article_id: "a2".into(),
        n_sentences: 5,
        ..meta.clone()
    };
    let r0 = compute_article_indices(&empty, &[], &[], &[], 0.7).map_err(|e| e.to_string())?;
    ensure(r0.id_a == 0.0 && r0.ans_a.is_none() && r0.share_internal.is_none(), || {
        format!("question-free article: {r0:?}")
    })?;

    // Dialogicity shares close to one on arbitrary articles.
    let mut runner = TestRunner::new(PropConfig {
        cases: 256,
        ..PropConfig::default()
    });
    let strategy = (1usize..30, proptest::collection::vec((any::<bool>(), any::<bool>()), 1..30));
    runner
        .run(&strategy, |(extra, outcomes)| {
            let n = outcomes.len();
            let meta = ArticleMeta {
                n_sentences: n + extra,
                ..meta.clone()
            };
            let preds: Vec<Prediction> =
                (0..n).map(|i| pred(i as u32, true, Some((StanceLabel::Rhetorical, 0.9)))).collect();
            let qas: Vec<QaRecord> = outcomes.iter().enumerate().map(|(i, &(a, q))| qa(i as u32, a, q, false)).collect();
            let es: Vec<EntityRecord> = (0..n).map(|i| ents(i as u32, &[])).collect();
            let r = compute_article_indices(&meta, &preds, &qas, &es, 0.7).unwrap();
            let sum = r.share_unanswered.unwrap() + r.share_internal.unwrap() + r.share_external.unwrap();
            prop_assert!((sum - 1.0).abs() <= 1e-9, "shares sum to {}", sum);
            Ok(())
        })
        .map_err(|e| format!("dialogicity shares: {e}"))?;

    let totals = DialogicityTotals {
        unanswered: 33_271,
        internal: 610_209,
        external: 116_702,
    };
    ensure(totals.questions() == 760_182 && totals.answered() == 726_911, || "count fixture is off".into())?;
    let pct = 100.0 * totals.answered_share().unwrap();
    ensure((pct - 95.6).abs() <= 0.05, || format!("answered share {pct:.3}%"))?;
    Ok(format!("hand fixture exact, shares sum to 1, 726911/760182 = {pct:.2}%"))
}

// ---------------------------------------------------------------------------
// metric arithmetic

/// Kappa from the confusion matrix, written out directly.
fn kappa_oracle(pairs: &[(u8, u8)], k: usize) -> f64 {
    let n = pairs.len() as f64;
    let mut m = vec![vec![0.0; k]; k];
    for &(a, b) in pairs {
        m[a as usize][b as usize] += 1.0;
    }
    let p_o: f64 = (0..k).map(|i| m[i][i]).sum::<f64>() / n;
    let row = |i: usize| m[i].iter().sum::<f64>() / n;
    let col = |j: usize| (0..k).map(|i| m[i][j]).sum::<f64>() / n;
    let p_e: f64 = (0..k).map(|i| row(i) * col(i)).sum();
    (p_o - p_e) / (1.0 - p_e)
}

fn metric_arithmetic() -> Outcome {
    let f = f1(0.76, 0.80).ok_or("f1 undefined")?;
    ensure((f - 0.78).abs() <= 0.005, || format!("F1 {f}"))?;

    // 20 yes/yes, 5 yes/no, 10 no/yes, 15 no/no: p_o 0.7, p_e 0.5.
    let mut textbook = vec![(0u8, 0u8); 20];
    textbook.extend(vec![(0, 1); 5]);
    textbook.extend(vec![(1, 0); 10]);
    textbook.extend(vec![(1, 1); 15]);
    let k = cohen_kappa(&textbook).map_err(|e| e.to_string())?;
    ensure((k - 0.4).abs() <= 1e-12, || format!("textbook kappa {k}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..200 {
        let labels = rng.random_range(2..=6usize);
        let n = rng.random_range(5..200);
        let pairs: Vec<(u8, u8)> = (0..n)
            .map(|_| {
                let a = rng.random_range(0..labels) as u8;
                let b = if rng.random_bool(0.6) { a } else { rng.random_range(0..labels) as u8 };
                (a, b)
            })
            .collect();
        let distinct: BTreeSet<u8> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        if distinct.len() < 2 {
            continue;
        }
        let got = cohen_kappa(&pairs).map_err(|e| e.to_string())?;
        let want = kappa_oracle(&pairs, labels);
        ensure((got - want).abs() <= 1e-12, || format!("case {case}: kappa {got} vs oracle {want}"))?;
    }

    let perfect: Vec<(StanceLabel, StanceLabel)> = StanceLabel::ALL.iter().cycle().take(30).map(|&l| (l, l)).collect();
    let kp = cohen_kappa(&perfect).map_err(|e| e.to_string())?;
    ensure(kp == 1.0, || format!("perfect agreement kappa {kp}"))?;
    let single = vec![(StanceLabel::Tag, StanceLabel::Tag); 4];
    ensure(cohen_kappa(&single).map_err(|e| e.to_string())? == 1.0, || "single-label kappa".into())?;
    Ok(format!("F1 {f:.4}, kappa = oracle on 200 fixtures, perfect = 1"))
}

// ---------------------------------------------------------------------------
// sweeps

fn sweep_properties() -> Outcome {
    let mut runner = TestRunner::new(PropConfig {
        cases: 256,
        ..PropConfig::default()
    });
    let article = proptest::collection::vec((0.0f64..=1.0, any::<bool>(), 0.0f64..=1.0, 0usize..6), 1..25);
    runner
        .run(&proptest::collection::vec(article, 1..8), |arts| {
            let owned: Vec<Vec<Prediction>> = arts
                .iter()
                .enumerate()
                .map(|(a, sents)| {
                    sents
                        .iter()
                        .enumerate()
                        .map(|(i, &(bc, bl, sc, label))| Prediction {
                            article_id: format!("a{a}"),
                            sent_id: i as u32,
                            binary_label: bl,
                            binary_conf: bc,
                            stance: (bl && bc >= 0.5).then_some(StanceLabel::ALL[label]),
                            stance_conf: (bl && bc >= 0.5).then_some(sc),
                        })
                        .collect()
                })
                .collect();
            let ids: Vec<String> = (0..owned.len()).map(|a| format!("a{a}")).collect();
            let input: Vec<ArticlePredictions> = owned
                .iter()
                .zip(&ids)
                .map(|(p, id)| ArticlePredictions {
                    article_id: id,
                    n_sentences: p.len(),
                    predictions: p,
                })
                .collect();
            let rows = sweep_confidence(&input, &[0.6, 0.7, 0.8]).unwrap();
            prop_assert!(rows.windows(2).all(|w| w[0].n_questions >= w[1].n_questions));
            Ok(())
        })
        .map_err(|e| format!("confidence sweep: {e}"))?;

    // Matched scores at 0.9 and up, unmatched ones under 0.05.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let records: Vec<QaRecord> = (0..400)
        .map(|i| {
            let answered = i % 10 != 0;
            let mut r = qa(i, answered, answered && i % 7 == 0, false);
            r.article_id = format!("b{}", i / 4);
            r.answer_sim = Some(if answered {
                rng.random_range(0.9..0.999)
            } else {
                rng.random_range(-0.2..0.04)
            });
            r
        })
        .collect();
    let thresholds = [0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80];
    let rows = sweep_similarity(&records, &thresholds).map_err(|e| e.to_string())?;
    let first = &rows[0];
    for r in &rows {
        ensure(
            (r.answered, r.unanswered, r.internal, r.via_quotes)
                == (first.answered, first.unanswered, first.internal, first.via_quotes),
            || format!("shares change at {}: {r:?} vs {first:?}", r.threshold),
        )?;
    }
    let all = sweep_similarity(&records, &[0.05, 0.40, 0.80, 0.95, 0.975]).map_err(|e| e.to_string())?;
    ensure(all.windows(2).all(|w| w[0].answered >= w[1].answered), || "answered share rises".into())?;
    Ok(format!("confidence N non-increasing, answered {:.1}% flat over 0.05-0.80", first.answered))
}

// ---------------------------------------------------------------------------
// sampling

fn population() -> Vec<ArticleProfile> {
    (0..2400)
        .map(|i| {
            let mut counts = BTreeMap::new();
            if i % 2 == 0 {
                counts.insert(StanceLabel::ALL[(i / 2) % 6], 1 + i % 3);
            }
            ArticleProfile {
                article_id: format!("p{i:05}"),
                source_group: if i % 4 < 2 { SourceGroup::Local } else { SourceGroup::National },
                stance_counts: counts,
            }
        })
        .collect()
}

fn spot_candidates() -> Vec<SpotCheckCandidate> {
    (0..240)
        .map(|i| SpotCheckCandidate {
            article_id: format!("s{i:04}"),
            group_id: 0,
            stratum: if i % 2 == 0 { SourceGroup::Local } else { SourceGroup::National },
            answered: i % 5 != 0,
            sent_ids: vec![2],
            question_text: "Pourquoi ?".into(),
            answer_start: Some(3),
            answer_len: Some(1),
            answer_text: Some("Parce que.".into()),
            answer_sim: Some(0.8),
        })
        .collect()
}

fn sampling_contracts() -> Outcome {
    let pop = population();
    let m = stratified_sample(&pop, SamplePlan::default(), 42).map_err(|e| e.to_string())?;
    let expected = [
        (SampleRole::MainEval, 400),
        (SampleRole::Double, 100),
        (SampleRole::ExtensionA, 100),
        (SampleRole::ExtensionB, 100),
    ];
    for (role, n) in expected {
        ensure(m.count(role, None) == n, || format!("{role}: {} articles", m.count(role, None)))?;
        for g in SourceGroup::ALL {
            ensure(m.count(role, Some(g)) == n / 2, || {
                format!("{role} {}: {} articles", g.as_str(), m.count(role, Some(g)))
            })?;
        }
    }
    let distinct: BTreeSet<&str> = m.assignments.iter().map(|a| a.article_id.as_str()).collect();
    ensure(distinct.len() == 700, || format!("{} distinct articles", distinct.len()))?;
    ensure(m.warnings.is_empty(), || format!("warnings {:?}", m.warnings))?;
    let again = stratified_sample(&pop, SamplePlan::default(), 42).map_err(|e| e.to_string())?;
    ensure(again == m, || "same seed gave a different manifest".into())?;
    let other = stratified_sample(&pop, SamplePlan::default(), 43).map_err(|e| e.to_string())?;
    ensure(other.assignments != m.assignments, || "seed has no effect".into())?;

    let cands = spot_candidates();
    let s = spot_check_sample(&cands, SpotCheckPlan::default(), 42).map_err(|e| e.to_string())?;
    let mut cells: HashMap<(SourceGroup, &str), usize> = HashMap::new();
    for r in &s.rows {
        *cells.entry((r.stratum, r.predicted.as_str())).or_default() += 1;
    }
    for g in SourceGroup::ALL {
        let a = cells.get(&(g, "answered")).copied().unwrap_or(0);
        let u = cells.get(&(g, "unanswered")).copied().unwrap_or(0);
        ensure((a, u) == (20, 5), || format!("{}: {a} answered, {u} unanswered", g.as_str()))?;
    }
    let arts: BTreeSet<&str> = s.rows.iter().map(|r| r.article_id.as_str()).collect();
    ensure(s.rows.len() == 50 && arts.len() == 50, || format!("{} rows over {} articles", s.rows.len(), arts.len()))?;
    let s2 = spot_check_sample(&cands, SpotCheckPlan::default(), 42).map_err(|e| e.to_string())?;
    ensure(s2 == s, || "spot check not reproducible".into())?;
    Ok("400/100/100/100 at 50/50, spot check 20+5 per stratum".into())
}

// ---------------------------------------------------------------------------
// end-to-end determinism

fn fixture_config(out: &Path, threads: usize) -> Result<PipelineConfig, String> {
    let mut cfg = PipelineConfig::load(Some(&fixture_dir().join("pipeline.toml")), Vec::<(String, String)>::new())
        .map_err(|e| e.to_string())?;
    cfg.out_dir = out.to_path_buf();
    cfg.threads = threads;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// `sha256  relative/path` per output file, sorted by path.
fn hash_tree(root: &Path) -> Result<Vec<String>, String> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        for entry in std::fs::read_dir(dir)? {
            let p = entry?.path();
            if p.is_dir() {
                walk(&p, out)?;
            } else {
                out.push(p);
            }
        }
        Ok(())
    }
    let mut files = Vec::new();
    walk(root, &mut files).map_err(|e| e.to_string())?;
    let mut lines: Vec<String> = files
        .iter()
        .map(|p| {
            let rel = p.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
            let bytes = std::fs::read(p).map_err(|e| e.to_string())?;
            Ok(format!("{}  {rel}", hex::encode(Sha256::digest(&bytes))))
        })
        .collect::<Result<_, String>>()?;
    lines.sort_by(|a, b| a[66..].cmp(&b[66..]));
    Ok(lines)
}

fn run_fixture(out: &Path, threads: usize) -> Result<Duration, String> {
    let cfg = fixture_config(out, threads)?;
    let started = Instant::now();
    let providers = Providers::from_config(&cfg).map_err(|e| e.to_string())?;
    pipeline::run_all(&cfg, &providers).map_err(|e| e.to_string())?;
    Ok(started.elapsed())
}

fn end_to_end(outs: &mut Vec<tempfile::TempDir>) -> Outcome {
    let golden_path = fixture_dir().join("golden.sha256");
    let golden: Vec<String> = std::fs::read_to_string(&golden_path)
        .map_err(|e| format!("{}: {e}", golden_path.display()))?
        .lines()
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    let mut slowest = Duration::ZERO;
    for threads in [1, 1, 8] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let took = run_fixture(dir.path(), threads)?;
        ensure(took < Duration::from_secs(30), || format!("run with {threads} threads took {took:?}"))?;
        slowest = slowest.max(took);
        let got = hash_tree(dir.path())?;
        if got != golden {
            let diff: Vec<&String> = got.iter().filter(|l| !golden.contains(l)).collect();
            return Err(format!("{threads} threads: {} files differ from golden, e.g. {:?}", diff.len(), diff.first()));
        }
        outs.push(dir);
    }
    Ok(format!("{} files match golden over 3 runs, slowest {:.2}s", golden.len(), slowest.as_secs_f64()))
}

// ---------------------------------------------------------------------------
// report schemas

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<String>), String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let header = r.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let mut keys = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        keys.push(rec.get(0).unwrap_or_default().to_string());
    }
    Ok((header, keys))
}

fn report_schemas(out: Option<&Path>) -> Outcome {
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => return Err("no pipeline output to report on".into()),
    };
    let tables = dir.join("tables");
    let stances = ["framing-procedural", "information-seeking", "rhetorical", "leading", "tag", "echo-clarification"];
    let stance_titles =
        ["Framing-procedural", "Information-seeking", "Rhetorical", "Leading", "Tag", "Echo-clarification"];
    let mut with_all: Vec<&str> = stances.to_vec();
    with_all.push("All stances");
    let schemas: Vec<(&str, Vec<&str>, Vec<&str>)> = vec![
        ("table1_stance_global.csv", vec!["Stance", "N", "% of interrogatives"], stances.to_vec()),
        (
            "table2_meta_topics.csv",
            vec!["Meta-topic", "Articles", "Mean interrogative index", "% questions with ORG", "% with LOC / EVENT"],
            vec![
                "Local news",
                "Professional sports",
                "Lifestyle, entertainment & people",
                "Faits divers",
                "National / local politics",
                "Technology",
                "Business & economy",
                "Geopolitics",
            ],
        ),
        ("table4_stance_answerability.csv", vec!["Stance", "N questions", "% answered"], with_all),
        (
            "table4_dialogicity.csv",
            vec!["Category", "N", "% of interrogatives"],
            vec!["Unanswered", "Answered (internal)", "Answered (via quotes)"],
        ),
        (
            "table5_confidence.csv",
            vec!["Confidence", "N questions", "% of sentences", "Mean ID_a"],
            vec!["0.6", "0.7", "0.8"],
        ),
        (
            "table6_similarity.csv",
            vec!["Similarity", "answered", "unanswered", "internal", "via quotes"],
            vec!["0.05", "0.40", "0.80", "0.95", "0.975"],
        ),
        (
            "table8_model_iaa.csv",
            vec!["Section", "Metric", "Value"],
            vec![
                "Binary interrogative detector",
                "Binary interrogative detector",
                "Binary interrogative detector",
                "Binary interrogative detector",
                "Binary interrogative detector",
                "Six-way stance classifier",
                "Six-way stance classifier",
                "Six-way stance classifier",
                "Inter-annotator agreement (stance)",
                "Inter-annotator agreement (stance)",
                "Inter-annotator agreement (stance)",
                "Inter-annotator agreement (stance)",
                "Inter-annotator agreement (stance)",
            ],
        ),
        ("table9_stance_per_class.csv", vec!["Stance", "Precision", "Recall", "F1", "Support"], stance_titles.to_vec()),
    ];
    for (file, header, keys) in &schemas {
        let (h, k) = read_table(&tables.join(file))?;
        ensure(h == *header, || format!("{file}: header {h:?}"))?;
        let mut got = k.clone();
        let mut want: Vec<String> = keys.iter().map(|s| s.to_string()).collect();
        got.sort();
        want.sort();
        ensure(got == want, || format!("{file}: row keys {k:?}"))?;
    }
    // Model and agreement metrics sit in the second column.
    let mut r = csv::Reader::from_path(tables.join("table8_model_iaa.csv")).map_err(|e| e.to_string())?;
    let metrics: Vec<String> = r
        .records()
        .map(|rec| rec.map(|rec| rec.get(1).unwrap_or_default().to_string()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let want = [
        "Evaluation sentences",
        "Accuracy",
        "Precision (interrogative)",
        "Recall (interrogative)",
        "F1 (interrogative)",
        "Evaluation interrogatives",
        "Macro-F1",
        "Micro-F1",
        "Double-coded articles",
        "Matched interrogative units",
        "Jaccard overlap (spans)",
        "Accuracy (stance labels)",
        "Cohen’s κ",
    ];
    ensure(metrics == want, || format!("table8 metrics {metrics:?}"))?;
    Ok(format!("{} tables match their schemas", schemas.len()))
}

// ---------------------------------------------------------------------------

fn main() {
    let mut outs = Vec::new();
    let mut results: Vec<(&str, Outcome)> = vec![
        ("answer search matches brute-force oracle", answer_search_matches_oracle()),
        ("candidate recall", candidate_recall()),
        ("index arithmetic", index_arithmetic()),
        ("metric arithmetic", metric_arithmetic()),
        ("sweep properties", sweep_properties()),
        ("sampling contracts", sampling_contracts()),
        ("end-to-end determinism", end_to_end(&mut outs)),
    ];
    results.push(("report schemas", report_schemas(outs.first().map(|d| d.path()))));
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
