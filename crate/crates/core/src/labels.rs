//! Closed label vocabularies shared by every stage.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Pragmatic type of an interrogative stance.
///
/// Variant order is the canonical order used for tie-breaking and for
/// per-class report rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StanceLabel {
    FramingProcedural,
    InformationSeeking,
    Rhetorical,
    Leading,
    Tag,
    EchoClarification,
}

impl StanceLabel {
    pub const ALL: [StanceLabel; 6] = [
        StanceLabel::FramingProcedural,
        StanceLabel::InformationSeeking,
        StanceLabel::Rhetorical,
        StanceLabel::Leading,
        StanceLabel::Tag,
        StanceLabel::EchoClarification,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::FramingProcedural => "framing-procedural",
            StanceLabel::InformationSeeking => "information-seeking",
            StanceLabel::Rhetorical => "rhetorical",
            StanceLabel::Leading => "leading",
            StanceLabel::Tag => "tag",
            StanceLabel::EchoClarification => "echo-clarification",
        }
    }

    /// Capitalised form used in per-class report rows.
    pub fn title(self) -> &'static str {
        match self {
            StanceLabel::FramingProcedural => "Framing-procedural",
            StanceLabel::InformationSeeking => "Information-seeking",
            StanceLabel::Rhetorical => "Rhetorical",
            StanceLabel::Leading => "Leading",
            StanceLabel::Tag => "Tag",
            StanceLabel::EchoClarification => "Echo-clarification",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StanceLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::data(format!("unknown stance label {s:?}")))
    }
}

/// The four confidence values a teacher is allowed to emit.
pub const TEACHER_CONFIDENCE_SCALE: [f64; 4] = [0.2, 0.5, 0.8, 0.95];

/// Snaps `value` to the nearest point of [`TEACHER_CONFIDENCE_SCALE`].
///
/// Returns the snapped value and whether it differed from the input.
/// Equidistant values go to the lower point.
pub fn snap_confidence(value: f64) -> (f64, bool) {
    let mut best = TEACHER_CONFIDENCE_SCALE[0];
    for &point in &TEACHER_CONFIDENCE_SCALE[1..] {
        if (value - point).abs() < (value - best).abs() {
            best = point;
        }
    }
    (best, (best - value).abs() > 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip_through_strings() {
        for label in StanceLabel::ALL {
            assert_eq!(label.as_str().parse::<StanceLabel>().unwrap(), label);
            let json = serde_json::to_string(&label).unwrap();
            assert_eq!(json, format!("\"{}\"", label.as_str()));
        }
        assert!("question".parse::<StanceLabel>().is_err());
    }

    #[test]
    fn snapping_picks_nearest_point() {
        assert_eq!(snap_confidence(0.8), (0.8, false));
        assert_eq!(snap_confidence(0.79), (0.8, true));
        assert_eq!(snap_confidence(1.0), (0.95, true));
        assert_eq!(snap_confidence(0.0), (0.2, true));
        // equidistant between 0.2 and 0.5
        assert_eq!(snap_confidence(0.35).0, 0.2);
    }
}
