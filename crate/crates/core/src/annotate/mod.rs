//! Task bookkeeping behind the annotation service: assignment, optimistic
//! versioning of saved units, blinding of double-coded work, and live
//! agreement. Units persist to the same JSON-lines file the batch
//! evaluation reads.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::sentence_char_spans;
use crate::error::Error;
use crate::io::{read_jsonl, write_jsonl};
use crate::labels::StanceLabel;
use crate::stance::Prediction;
use crate::triangulate::{
    agreement, AgreementReport, AlignMode, Addressee, FieldError, GoldUnit, InteractionalContext, MacroAxis,
    QuestionForm, SampleManifest, SampleRole,
};

pub const UNITS_FILE: &str = "gold_units.jsonl";
pub const STATE_FILE: &str = "annotation_state.json";

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("unknown task {0}")]
    UnknownTask(String),
    #[error("unknown article {0}")]
    UnknownArticle(String),
    #[error("unknown annotator {0}")]
    UnknownAnnotator(String),
    #[error("task {task} is not assigned to {annotator}")]
    NotAssigned { task: String, annotator: String },
    #[error("stale version {given}; current version is {current}")]
    Conflict { given: u64, current: u64 },
    #[error("task is {0} for this annotator")]
    WrongStatus(TaskStatus),
    #[error("units of other annotators stay hidden until every coder completes the task")]
    Blinded,
    #[error("invalid units")]
    Invalid(Vec<FieldError>),
    #[error(transparent)]
    Storage(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskStatus {
    Pending,
    InProgress,
    Complete,
}

impl std::fmt::Display for TaskStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TaskStatus::Pending => "pending",
            TaskStatus::InProgress => "in-progress",
            TaskStatus::Complete => "complete",
        })
    }
}

/// Work of one annotator on one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coding {
    pub status: TaskStatus,
    pub version: u64,
}

impl Default for Coding {
    fn default() -> Self {
        Coding {
            status: TaskStatus::Pending,
            version: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub task_id: String,
    pub ordinal: usize,
    pub article_id: String,
    pub role: SampleRole,
    pub annotators: Vec<String>,
    pub codings: BTreeMap<String, Coding>,
}

impl Task {
    pub fn status(&self) -> TaskStatus {
        let all = |s| self.codings.values().all(|c| c.status == s);
        if all(TaskStatus::Pending) {
            TaskStatus::Pending
        } else if all(TaskStatus::Complete) {
            TaskStatus::Complete
        } else {
            TaskStatus::InProgress
        }
    }

    pub fn is_double(&self) -> bool {
        self.annotators.len() == 2
    }
}

/// What an annotator sees when handed a task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskView {
    pub task_id: String,
    pub ordinal: usize,
    pub article_id: String,
    pub role: SampleRole,
    pub double_coded: bool,
    pub status: TaskStatus,
    pub version: u64,
    /// Model output for the article, shown as suggestions only.
    pub prelabels: Vec<Prediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum NextTask {
    Assigned { task: TaskView },
    Done,
}

/// Unit as submitted by the interface; article and annotator come from the task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitDraft {
    #[serde(default)]
    pub unit_id: Option<String>,
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub interactional_context: InteractionalContext,
    pub addressee: Addressee,
    pub form: QuestionForm,
    pub function: StanceLabel,
    pub macro_axes: Vec<MacroAxis>,
    pub answer_realized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub sent_id: u32,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleView {
    pub article_id: String,
    pub text: String,
    pub sentences: Vec<SentenceSpan>,
    pub prelabels: Vec<Prediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorProgress {
    pub pending: usize,
    pub in_progress: usize,
    pub complete: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub tasks: usize,
    pub complete_tasks: usize,
    pub double_coded_complete: usize,
    pub double_coded_total: usize,
    pub annotators: BTreeMap<String, AnnotatorProgress>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LiveAgreement {
    InsufficientData,
    Ok {
        /// True while double-coded tasks remain incomplete.
        partial: bool,
        report: AgreementReport,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct PersistedState {
    codings: BTreeMap<String, BTreeMap<String, Coding>>,
}

/// Tasks built from a sample manifest, with their saved units.
#[derive(Debug)]
pub struct AnnotationStore {
    dir: PathBuf,
    annotators: [String; 2],
    tasks: Vec<Task>,
    texts: BTreeMap<String, String>,
    prelabels: BTreeMap<String, Vec<Prediction>>,
    /// (task_id, annotator) → units.
    units: BTreeMap<(String, String), Vec<GoldUnit>>,
    align_mode: AlignMode,
}

type StoreResult<T> = std::result::Result<T, AnnotateError>;

/// Task list of a manifest. Evaluation articles alternate between the two
/// annotators; double-coded ones go to both; each extension to its owner.
pub fn build_tasks(manifest: &SampleManifest, annotators: &[String; 2]) -> Vec<Task> {
    let mut main_seen = 0usize;
    manifest
        .assignments
        .iter()
        .enumerate()
        .map(|(ordinal, a)| {
            let assigned = match a.role {
                SampleRole::MainEval => {
                    main_seen += 1;
                    vec![annotators[(main_seen - 1) % 2].clone()]
                }
                SampleRole::Double => annotators.to_vec(),
                SampleRole::ExtensionA => vec![annotators[0].clone()],
                SampleRole::ExtensionB => vec![annotators[1].clone()],
            };
            Task {
                task_id: format!("t{ordinal:04}"),
                ordinal,
                article_id: a.article_id.clone(),
                role: a.role,
                codings: assigned.iter().map(|n| (n.clone(), Coding::default())).collect(),
                annotators: assigned,
            }
        })
        .collect()
}

impl AnnotationStore {
    /// Opens the store in `dir`, restoring statuses, versions and units from
    /// earlier sessions when present.
    pub fn open(
        dir: &Path,
        manifest: &SampleManifest,
        annotators: [String; 2],
        texts: BTreeMap<String, String>,
        predictions: Vec<Prediction>,
    ) -> crate::Result<Self> {
        let mut tasks = build_tasks(manifest, &annotators);
        for t in &tasks {
            if !texts.contains_key(&t.article_id) {
                return Err(Error::data(format!("sampled article {} has no text", t.article_id)));
            }
        }
        let mut prelabels: BTreeMap<String, Vec<Prediction>> = BTreeMap::new();
        for p in predictions {
            if texts.contains_key(&p.article_id) {
                prelabels.entry(p.article_id.clone()).or_default().push(p);
            }
        }
        for v in prelabels.values_mut() {
            v.sort_by_key(|p| p.sent_id);
        }

        let state_path = dir.join(STATE_FILE);
        if state_path.exists() {
            let raw = std::fs::read_to_string(&state_path).map_err(|e| Error::io(&state_path, e))?;
            let state: PersistedState = serde_json::from_str(&raw)?;
            for t in &mut tasks {
                if let Some(saved) = state.codings.get(&t.task_id) {
                    for (who, coding) in &mut t.codings {
                        if let Some(c) = saved.get(who) {
                            *coding = c.clone();
                        }
                    }
                }
            }
        }
        let by_article: BTreeMap<&str, &Task> = tasks.iter().map(|t| (t.article_id.as_str(), t)).collect();
        let mut units: BTreeMap<(String, String), Vec<GoldUnit>> = BTreeMap::new();
        let units_path = dir.join(UNITS_FILE);
        if units_path.exists() {
            for u in read_jsonl::<GoldUnit>(&units_path)? {
                let task = by_article
                    .get(u.article_id.as_str())
                    .ok_or_else(|| Error::data(format!("stored unit for unsampled article {}", u.article_id)))?;
                units.entry((task.task_id.clone(), u.annotator_id.clone())).or_default().push(u);
            }
        }
        Ok(AnnotationStore {
            dir: dir.to_path_buf(),
            annotators,
            tasks,
            texts,
            prelabels,
            units,
            align_mode: AlignMode::Greedy,
        })
    }

    pub fn with_align_mode(mut self, mode: AlignMode) -> Self {
        self.align_mode = mode;
        self
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn units_path(&self) -> PathBuf {
        self.dir.join(UNITS_FILE)
    }

    fn check_annotator(&self, annotator: &str) -> StoreResult<()> {
        if self.annotators.iter().any(|a| a == annotator) {
            Ok(())
        } else {
            Err(AnnotateError::UnknownAnnotator(annotator.to_string()))
        }
    }

    fn task_index(&self, task_id: &str) -> StoreResult<usize> {
        self.tasks
            .iter()
            .position(|t| t.task_id == task_id)
            .ok_or_else(|| AnnotateError::UnknownTask(task_id.to_string()))
    }

    fn view(&self, t: &Task, annotator: &str) -> TaskView {
        let coding = &t.codings[annotator];
        TaskView {
            task_id: t.task_id.clone(),
            ordinal: t.ordinal,
            article_id: t.article_id.clone(),
            role: t.role,
            double_coded: t.is_double(),
            status: coding.status,
            version: coding.version,
            prelabels: self.prelabels.get(&t.article_id).cloned().unwrap_or_default(),
        }
    }

    /// An unfinished task already opened by this annotator, else the
    /// lowest-ordinal pending one, which becomes in-progress.
    pub fn next_task(&mut self, annotator: &str) -> StoreResult<NextTask> {
        self.check_annotator(annotator)?;
        let mine = |t: &&Task, s: TaskStatus| t.codings.get(annotator).is_some_and(|c| c.status == s);
        let pick = self
            .tasks
            .iter()
            .find(|t| mine(t, TaskStatus::InProgress))
            .or_else(|| self.tasks.iter().find(|t| mine(t, TaskStatus::Pending)))
            .map(|t| t.ordinal);
        let Some(i) = pick else {
            return Ok(NextTask::Done);
        };
        let coding = self.tasks[i].codings.get_mut(annotator).expect("assigned");
        if coding.status == TaskStatus::Pending {
            coding.status = TaskStatus::InProgress;
            self.persist()?;
        }
        Ok(NextTask::Assigned {
            task: self.view(&self.tasks[i], annotator),
        })
    }

    /// Replaces this annotator's units for the task. `complete` closes the
    /// task for them; statuses never move backwards.
    pub fn save_units(
        &mut self,
        task_id: &str,
        annotator: &str,
        drafts: Vec<UnitDraft>,
        base_version: u64,
        complete: bool,
    ) -> StoreResult<u64> {
        self.check_annotator(annotator)?;
        let i = self.task_index(task_id)?;
        let task = &self.tasks[i];
        let coding = task.codings.get(annotator).ok_or_else(|| AnnotateError::NotAssigned {
            task: task_id.to_string(),
            annotator: annotator.to_string(),
        })?;
        if coding.status != TaskStatus::InProgress {
            return Err(AnnotateError::WrongStatus(coding.status));
        }
        if coding.version != base_version {
            return Err(AnnotateError::Conflict {
                given: base_version,
                current: coding.version,
            });
        }
        let text = &self.texts[&task.article_id];
        let mut units = Vec::with_capacity(drafts.len());
        let mut errors = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (n, d) in drafts.into_iter().enumerate() {
            let unit_id = d.unit_id.filter(|s| !s.trim().is_empty()).unwrap_or_else(|| format!("{annotator}-{n}"));
            let u = GoldUnit {
                article_id: task.article_id.clone(),
                unit_id,
                annotator_id: annotator.to_string(),
                start: d.start,
                end: d.end,
                text: d.text,
                interactional_context: d.interactional_context,
                addressee: d.addressee,
                form: d.form,
                function: d.function,
                macro_axes: d.macro_axes,
                answer_realized: d.answer_realized,
            };
            for e in u.validate(Some(text)) {
                errors.push(FieldError {
                    field: format!("units[{n}].{}", e.field),
                    message: e.message,
                });
            }
            if !seen.insert(u.unit_id.clone()) {
                errors.push(FieldError {
                    field: format!("units[{n}].unit_id"),
                    message: format!("duplicate unit id {}", u.unit_id),
                });
            }
            units.push(u);
        }
        if !errors.is_empty() {
            return Err(AnnotateError::Invalid(errors));
        }
        units.sort_by(|a, b| (a.start, a.end, &a.unit_id).cmp(&(b.start, b.end, &b.unit_id)));
        let key = (task_id.to_string(), annotator.to_string());
        let previous_units = self.units.insert(key.clone(), units);
        let coding = self.tasks[i].codings.get_mut(annotator).expect("assigned");
        let previous = coding.clone();
        coding.version += 1;
        if complete {
            coding.status = TaskStatus::Complete;
        }
        let version = coding.version;
        if let Err(e) = self.persist() {
            // keep memory and disk in step
            *self.tasks[i].codings.get_mut(annotator).expect("assigned") = previous;
            match previous_units {
                Some(u) => self.units.insert(key, u),
                None => self.units.remove(&key),
            };
            return Err(e.into());
        }
        Ok(version)
    }

    /// Units of a task visible to `requester`: their own, plus the other
    /// coder's once every coder has completed the task.
    pub fn units(&self, task_id: &str, requester: &str) -> StoreResult<BTreeMap<String, Vec<GoldUnit>>> {
        self.check_annotator(requester)?;
        let t = &self.tasks[self.task_index(task_id)?];
        if !t.codings.contains_key(requester) {
            return Err(AnnotateError::NotAssigned {
                task: task_id.to_string(),
                annotator: requester.to_string(),
            });
        }
        let open = t.status() == TaskStatus::Complete;
        let mut out = BTreeMap::new();
        for who in &t.annotators {
            if who == requester || open {
                let units = self.units.get(&(task_id.to_string(), who.clone())).cloned().unwrap_or_default();
                out.insert(who.clone(), units);
            }
        }
        Ok(out)
    }

    /// Reads another annotator's units directly; refused while blinded.
    pub fn units_of(&self, task_id: &str, requester: &str, owner: &str) -> StoreResult<Vec<GoldUnit>> {
        let visible = self.units(task_id, requester)?;
        visible.get(owner).cloned().ok_or(AnnotateError::Blinded)
    }

    pub fn article(&self, article_id: &str, requester: &str) -> StoreResult<ArticleView> {
        self.check_annotator(requester)?;
        let assigned = self
            .tasks
            .iter()
            .any(|t| t.article_id == article_id && t.codings.contains_key(requester));
        let text = self
            .texts
            .get(article_id)
            .filter(|_| assigned)
            .ok_or_else(|| AnnotateError::UnknownArticle(article_id.to_string()))?;
        Ok(ArticleView {
            article_id: article_id.to_string(),
            text: text.clone(),
            sentences: sentence_char_spans(text)
                .into_iter()
                .enumerate()
                .map(|(i, r)| SentenceSpan {
                    sent_id: i as u32,
                    start: r.start,
                    end: r.end,
                })
                .collect(),
            prelabels: self.prelabels.get(article_id).cloned().unwrap_or_default(),
        })
    }

    pub fn progress(&self) -> Progress {
        let mut annotators: BTreeMap<String, AnnotatorProgress> = self
            .annotators
            .iter()
            .map(|a| {
                (
                    a.clone(),
                    AnnotatorProgress {
                        pending: 0,
                        in_progress: 0,
                        complete: 0,
                    },
                )
            })
            .collect();
        for t in &self.tasks {
            for (who, c) in &t.codings {
                let p = annotators.get_mut(who).expect("known annotator");
                match c.status {
                    TaskStatus::Pending => p.pending += 1,
                    TaskStatus::InProgress => p.in_progress += 1,
                    TaskStatus::Complete => p.complete += 1,
                }
            }
        }
        let double: Vec<&Task> = self.tasks.iter().filter(|t| t.is_double()).collect();
        Progress {
            tasks: self.tasks.len(),
            complete_tasks: self.tasks.iter().filter(|t| t.status() == TaskStatus::Complete).count(),
            double_coded_complete: double.iter().filter(|t| t.status() == TaskStatus::Complete).count(),
            double_coded_total: double.len(),
            annotators,
        }
    }

    /// Article ids of double-coded tasks both coders have completed.
    pub fn completed_double_coded(&self) -> Vec<String> {
        self.tasks
            .iter()
            .filter(|t| t.is_double() && t.status() == TaskStatus::Complete)
            .map(|t| t.article_id.clone())
            .collect()
    }

    /// Agreement over completed double-coded tasks, computed from the
    /// persisted units exactly as the offline evaluation does.
    pub fn live_agreement(&self) -> crate::Result<LiveAgreement> {
        let ids = self.completed_double_coded();
        if ids.is_empty() {
            return Ok(LiveAgreement::InsufficientData);
        }
        let units = self.all_units();
        let report = agreement(&ids, &self.annotators[0], &self.annotators[1], &units, self.align_mode)?;
        let progress = self.progress();
        Ok(LiveAgreement::Ok {
            partial: progress.double_coded_complete < progress.double_coded_total,
            report,
        })
    }

    pub fn all_units(&self) -> Vec<GoldUnit> {
        self.units.values().flatten().cloned().collect()
    }

    fn persist(&self) -> crate::Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let mut all: Vec<&GoldUnit> = self.units.values().flatten().collect();
        all.sort_by(|a, b| {
            (&a.article_id, &a.annotator_id, a.start, a.end, &a.unit_id).cmp(&(
                &b.article_id,
                &b.annotator_id,
                b.start,
                b.end,
                &b.unit_id,
            ))
        });
        let units_path = self.units_path();
        let tmp = units_path.with_extension("jsonl.tmp");
        write_jsonl(&tmp, all)?;
        std::fs::rename(&tmp, &units_path).map_err(|e| Error::io(&units_path, e))?;

        let state = PersistedState {
            codings: self.tasks.iter().map(|t| (t.task_id.clone(), t.codings.clone())).collect(),
        };
        let state_path = self.dir.join(STATE_FILE);
        let tmp = state_path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(&state)?).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, &state_path).map_err(|e| Error::io(&state_path, e))
    }
}

#[cfg(test)]
mod tests;
