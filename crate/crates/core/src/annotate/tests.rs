use super::*;
use crate::corpus::SourceGroup;
use crate::triangulate::{Assignment, SamplePlan};

const TEXT: &str = "Le conseil a voté. Faut-il s'en réjouir ? Rien n'est moins sûr.";

fn manifest() -> SampleManifest {
    let a = |id: &str, role| Assignment {
        article_id: id.into(),
        source_group: SourceGroup::Local,
        role,
        question_containing: true,
        dominant_stance: Some(StanceLabel::Rhetorical),
    };
    SampleManifest {
        seed: 1,
        plan: SamplePlan::default(),
        assignments: vec![a("m1", SampleRole::MainEval), a("d1", SampleRole::Double), a("e1", SampleRole::ExtensionA)],
        warnings: vec![],
    }
}

fn store(dir: &Path) -> AnnotationStore {
    let texts = ["m1", "d1", "e1"].iter().map(|id| (id.to_string(), TEXT.to_string())).collect();
    AnnotationStore::open(dir, &manifest(), ["ana".into(), "ben".into()], texts, vec![]).unwrap()
}

fn draft(start: usize, end: usize, f: StanceLabel) -> UnitDraft {
    UnitDraft {
        unit_id: None,
        start,
        end,
        text: TEXT.chars().skip(start).take(end - start).collect(),
        interactional_context: InteractionalContext::NonInterview,
        addressee: Addressee::Audience,
        form: QuestionForm::Polar,
        function: f,
        macro_axes: vec![MacroAxis::StanceAlignment],
        answer_realized: false,
    }
}

fn task_id(n: NextTask) -> (String, u64) {
    match n {
        NextTask::Assigned { task } => (task.task_id, task.version),
        NextTask::Done => panic!("expected a task"),
    }
}

#[test]
fn assignment_and_done() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = store(dir.path());
    let (t, v) = task_id(s.next_task("ana").unwrap());
    assert_eq!(t, "t0000");
    // resumes the open task
    assert_eq!(task_id(s.next_task("ana").unwrap()).0, t);
    s.save_units(&t, "ana", vec![], v, true).unwrap();
    assert_eq!(task_id(s.next_task("ana").unwrap()).0, "t0001");
    // ben never sees the evaluation article given to ana
    assert_eq!(task_id(s.next_task("ben").unwrap()).0, "t0001");
    assert!(matches!(s.next_task("zed"), Err(AnnotateError::UnknownAnnotator(_))));
}

#[test]
fn versions_and_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = store(dir.path());
    let (t, v) = task_id(s.next_task("ana").unwrap());
    assert_eq!(v, 1);
    let units = vec![
        draft(19, 41, StanceLabel::Rhetorical),
        draft(0, 18, StanceLabel::FramingProcedural),
        draft(42, 63, StanceLabel::Leading),
    ];
    assert_eq!(s.save_units(&t, "ana", units.clone(), 1, false).unwrap(), 2);
    assert!(matches!(
        s.save_units(&t, "ana", units, 1, false),
        Err(AnnotateError::Conflict { given: 1, current: 2 })
    ));
}

#[test]
fn field_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = store(dir.path());
    let (t, v) = task_id(s.next_task("ana").unwrap());
    let mut bad = draft(19, 41, StanceLabel::Rhetorical);
    bad.macro_axes = vec![MacroAxis::Legitimation, MacroAxis::StanceAlignment, MacroAxis::DiscursiveStrategy];
    match s.save_units(&t, "ana", vec![bad], v, false) {
        Err(AnnotateError::Invalid(errs)) => assert_eq!(errs[0].field, "units[0].macro_axes"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn blinding_and_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = store(dir.path());
    assert_eq!(s.live_agreement().unwrap(), LiveAgreement::InsufficientData);
    let (m, v) = task_id(s.next_task("ana").unwrap());
    s.save_units(&m, "ana", vec![], v, true).unwrap();
    let (d, v) = task_id(s.next_task("ana").unwrap());
    s.save_units(&d, "ana", vec![draft(19, 41, StanceLabel::Rhetorical)], v, true).unwrap();
    let (d2, v) = task_id(s.next_task("ben").unwrap());
    assert_eq!(d, d2);
    assert!(matches!(s.units_of(&d, "ben", "ana"), Err(AnnotateError::Blinded)));
    s.save_units(&d, "ben", vec![draft(19, 41, StanceLabel::Rhetorical)], v, false).unwrap();
    assert!(matches!(s.units_of(&d, "ana", "ben"), Err(AnnotateError::Blinded)));
    s.save_units(&d, "ben", vec![draft(19, 41, StanceLabel::Rhetorical)], v + 1, true).unwrap();
    assert_eq!(s.units_of(&d, "ben", "ana").unwrap().len(), 1);
    // completed work is frozen
    assert!(matches!(s.save_units(&d, "ben", vec![], v + 2, false), Err(AnnotateError::WrongStatus(TaskStatus::Complete))));

    match s.live_agreement().unwrap() {
        LiveAgreement::Ok { partial, report } => {
            assert!(!partial);
            assert_eq!(report.cohen_kappa, Some(1.0));
            assert_eq!(report.jaccard_overlap, Some(1.0));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn reopen_restores_state() {
    let dir = tempfile::tempdir().unwrap();
    let saved = {
        let mut s = store(dir.path());
        let (t, v) = task_id(s.next_task("ana").unwrap());
        s.save_units(&t, "ana", vec![draft(19, 41, StanceLabel::Tag)], v, false).unwrap();
        s.all_units()
    };
    let mut s = store(dir.path());
    assert_eq!(s.all_units(), saved);
    let (t, v) = task_id(s.next_task("ana").unwrap());
    assert_eq!((t.as_str(), v), ("t0000", 2));
    let reread: Vec<GoldUnit> = read_jsonl(&s.units_path()).unwrap();
    assert_eq!(reread, saved);
}
