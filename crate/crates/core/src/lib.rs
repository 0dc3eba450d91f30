//! Interrogative stance detection and discourse analytics for French news text.

pub mod annotate;
pub mod answers;
pub mod candidates;
pub mod config;
pub mod corpus;
pub mod error;
pub mod io;
pub mod labels;
pub mod metrics;
pub mod pipeline;
pub mod providers;
pub mod report;
pub mod semantics;
pub mod stance;
pub mod triangulate;

pub use error::{Error, ErrorKind, Result};
pub use labels::StanceLabel;
