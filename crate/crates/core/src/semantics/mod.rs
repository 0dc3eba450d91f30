//! Entity annotation of questions and answers, addressivity typing and
//! meta-topic joining.

mod entities;
mod topics;

use serde::{Deserialize, Serialize};

pub use entities::{
    annotate_answer, annotate_question, annotate_texts, question_context, retain_mentions, EntityLabel, EntityMention,
    EntityRecord, DEFAULT_NER_THRESHOLD,
};
pub use topics::{join_meta_topics, MetaTopic, MetaTopicMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AddressivityClass {
    ActorFocused,
    GroupFocused,
    IssueFocused,
}

impl AddressivityClass {
    pub const ALL: [AddressivityClass; 3] = [
        AddressivityClass::ActorFocused,
        AddressivityClass::GroupFocused,
        AddressivityClass::IssueFocused,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AddressivityClass::ActorFocused => "actor-focused",
            AddressivityClass::GroupFocused => "group-focused",
            AddressivityClass::IssueFocused => "issue-focused",
        }
    }
}

/// Actor-focused with any person, organization or location; group-focused with
/// only collective categories; issue-focused otherwise, events included.
pub fn classify_addressivity(mentions: &[EntityMention]) -> AddressivityClass {
    if mentions.iter().any(|m| m.label.is_actor()) {
        AddressivityClass::ActorFocused
    } else if mentions.iter().any(|m| m.label.is_collective()) {
        AddressivityClass::GroupFocused
    } else {
        AddressivityClass::IssueFocused
    }
}
