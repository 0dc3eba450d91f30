use std::fmt;

use serde::{Deserialize, Serialize};

use crate::labels::StanceLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteractionalContext {
    Interview,
    NonInterview,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Addressee {
    Individual,
    Collective,
    Audience,
    #[serde(rename = "self")]
    SelfAddressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuestionForm {
    Wh,
    Polar,
    Alternative,
    Tag,
    DeclarativeQuestion,
    Elliptic,
    Indirect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MacroAxis {
    AuthorityPositioning,
    FramingAgendaSetting,
    StanceAlignment,
    Legitimation,
    DiscursiveStrategy,
}

impl MacroAxis {
    pub const ALL: [MacroAxis; 5] = [
        MacroAxis::AuthorityPositioning,
        MacroAxis::FramingAgendaSetting,
        MacroAxis::StanceAlignment,
        MacroAxis::Legitimation,
        MacroAxis::DiscursiveStrategy,
    ];

    pub fn title(self) -> &'static str {
        match self {
            MacroAxis::AuthorityPositioning => "Authority positioning",
            MacroAxis::FramingAgendaSetting => "Framing/agenda-setting",
            MacroAxis::StanceAlignment => "Stance/alignment",
            MacroAxis::Legitimation => "Legitimation",
            MacroAxis::DiscursiveStrategy => "Discursive strategy",
        }
    }
}

/// One human-coded interrogative unit. `start`/`end` are character offsets
/// into the article text, end exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldUnit {
    pub article_id: String,
    pub unit_id: String,
    pub annotator_id: String,
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

/// A violated unit invariant, addressed by field name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl GoldUnit {
    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks the unit invariants. With `article_text` the span is also
    /// checked against the article and the surface text must match it.
    pub fn validate(&self, article_text: Option<&str>) -> Vec<FieldError> {
        let mut errs = Vec::new();
        let mut err = |field: &str, message: String| {
            errs.push(FieldError {
                field: field.into(),
                message,
            })
        };
        if self.article_id.trim().is_empty() {
            err("article_id", "must not be empty".into());
        }
        if self.unit_id.trim().is_empty() {
            err("unit_id", "must not be empty".into());
        }
        if self.annotator_id.trim().is_empty() {
            err("annotator_id", "must not be empty".into());
        }
        if self.start >= self.end {
            err("span", format!("start {} must be below end {}", self.start, self.end));
        }
        if !(1..=2).contains(&self.macro_axes.len()) {
            err("macro_axes", format!("expected 1 or 2 axes, got {}", self.macro_axes.len()));
        } else if self.macro_axes.len() == 2 && self.macro_axes[0] == self.macro_axes[1] {
            err("macro_axes", "axes must be distinct".into());
        }
        if let Some(text) = article_text {
            let n = text.chars().count();
            if self.end > n {
                err("span", format!("end {} beyond article length {n}", self.end));
            } else if self.start < self.end {
                let surface: String = text.chars().skip(self.start).take(self.end - self.start).collect();
                if surface != self.text {
                    err("text", format!("does not match article span {:?}", surface));
                }
            }
        }
        errs
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn unit(article: &str, annotator: &str, id: &str, start: usize, end: usize, f: StanceLabel) -> GoldUnit {
        GoldUnit {
            article_id: article.into(),
            unit_id: id.into(),
            annotator_id: annotator.into(),
            start,
            end,
            text: String::new(),
            interactional_context: InteractionalContext::NonInterview,
            addressee: Addressee::Audience,
            form: QuestionForm::Wh,
            function: f,
            macro_axes: vec![MacroAxis::FramingAgendaSetting],
            answer_realized: false,
        }
    }

    #[test]
    fn round_trips_through_json() {
        let mut u = unit("a", "A", "u1", 0, 8, StanceLabel::Tag);
        u.addressee = Addressee::SelfAddressed;
        u.form = QuestionForm::DeclarativeQuestion;
        let json = serde_json::to_string(&u).unwrap();
        assert!(json.contains("\"self\"") && json.contains("declarative-question") && json.contains("non-interview"));
        assert_eq!(serde_json::from_str::<GoldUnit>(&json).unwrap(), u);
    }

    #[test]
    fn macro_axes_bounds() {
        let mut u = unit("a", "A", "u1", 0, 3, StanceLabel::Tag);
        u.macro_axes = vec![MacroAxis::Legitimation, MacroAxis::StanceAlignment, MacroAxis::DiscursiveStrategy];
        let errs = u.validate(None);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].field, "macro_axes");
        u.macro_axes.clear();
        assert_eq!(u.validate(None)[0].field, "macro_axes");
    }

    #[test]
    fn span_checked_against_article() {
        let mut u = unit("a", "A", "u1", 0, 9, StanceLabel::Tag);
        u.text = "Où est-il".into();
        assert!(u.validate(Some("Où est-il ? Ici.")).is_empty());
        u.end = 40;
        assert!(u.validate(Some("Où est-il ? Ici.")).iter().any(|e| e.field == "span"));
        u.end = 3;
        assert!(u.validate(Some("Où est-il ? Ici.")).iter().any(|e| e.field == "text"));
    }
}
