use std::collections::BTreeSet;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Rule families a sentence can match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleId {
    Qmark,
    InitialPattern,
    VerbPattern,
    NounPattern,
}

const BUNDLED_RULES: &str = include_str!("../../data/candidate_rules.txt");

/// Pattern inventories loaded from a rule file.
#[derive(Debug, Clone)]
pub struct RuleSet {
    pub version: Option<String>,
    pub initial: Vec<String>,
    pub verb: Vec<String>,
    pub noun: Vec<String>,
    fold: bool,
    initial_re: Option<Regex>,
    verb_re: Option<Regex>,
    noun_re: Option<Regex>,
}

/// Removes combining diacritics after canonical decomposition.
pub fn fold_accents(text: &str) -> String {
    text.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
}

fn normalize(text: &str, fold: bool) -> String {
    let lower = text.to_lowercase().replace(['’', 'ʼ'], "'");
    if fold {
        fold_accents(&lower)
    } else {
        lower
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn compile(patterns: &[String], anchored: bool, fold: bool) -> Result<Option<Regex>> {
    if patterns.is_empty() {
        return Ok(None);
    }
    let pieces: Vec<String> = patterns
        .iter()
        .map(|p| {
            let p = normalize(p, fold);
            let tail = if p.chars().last().is_some_and(is_word_char) {
                r"(?:[^\p{L}\p{N}]|$)"
            } else {
                ""
            };
            format!("{}{tail}", regex::escape(&p))
        })
        .collect();
    let head = if anchored { "^" } else { r"(?:^|[^\p{L}\p{N}])" };
    let re = format!("{head}(?:{})", pieces.join("|"));
    Regex::new(&re).map(Some).map_err(|e| Error::config(format!("bad rule pattern: {e}")))
}

impl RuleSet {
    /// Parses the plain-text rule format: `[initial]`, `[verb]` and `[noun]`
    /// sections with one phrase per line and `#` comments. A comment of the
    /// form `# version: X` records the rule-set version.
    pub fn parse(text: &str) -> Result<Self> {
        let mut version = None;
        let (mut initial, mut verb, mut noun) = (Vec::new(), Vec::new(), Vec::new());
        let mut section: Option<&str> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("version:") {
                    version = Some(v.trim().to_string());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                let name = &line[1..line.len() - 1];
                if !matches!(name, "initial" | "verb" | "noun") {
                    return Err(Error::config(format!("rule file line {}: unknown section [{name}]", i + 1)));
                }
                section = Some(match name {
                    "initial" => "initial",
                    "verb" => "verb",
                    _ => "noun",
                });
                continue;
            }
            let target = match section {
                Some("initial") => &mut initial,
                Some("verb") => &mut verb,
                Some(_) => &mut noun,
                None => {
                    return Err(Error::config(format!(
                        "rule file line {}: pattern outside of a section",
                        i + 1
                    )))
                }
            };
            target.push(line.to_string());
        }
        let mut set = RuleSet {
            version,
            initial,
            verb,
            noun,
            fold: false,
            initial_re: None,
            verb_re: None,
            noun_re: None,
        };
        set.recompile()?;
        Ok(set)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_RULES).expect("bundled rule file is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Enables accent-insensitive matching of patterns.
    pub fn with_accent_folding(mut self, fold: bool) -> Result<Self> {
        self.fold = fold;
        self.recompile()?;
        Ok(self)
    }

    fn recompile(&mut self) -> Result<()> {
        self.initial_re = compile(&self.initial, true, self.fold)?;
        self.verb_re = compile(&self.verb, false, self.fold)?;
        self.noun_re = compile(&self.noun, false, self.fold)?;
        Ok(())
    }

    /// Every rule family matched by `text`.
    pub fn matches(&self, text: &str) -> BTreeSet<RuleId> {
        let mut hits = BTreeSet::new();
        if text.contains('?') {
            hits.insert(RuleId::Qmark);
        }
        let norm = normalize(text, self.fold);
        let opening = norm.trim_start_matches(|c: char| {
            c.is_whitespace() || matches!(c, '«' | '»' | '“' | '”' | '"' | '\'' | '‘' | '—' | '–' | '-')
        });
        let families = [
            (RuleId::InitialPattern, &self.initial_re, opening),
            (RuleId::VerbPattern, &self.verb_re, norm.as_str()),
            (RuleId::NounPattern, &self.noun_re, norm.as_str()),
        ];
        for (id, re, haystack) in families {
            if re.as_ref().is_some_and(|re| re.is_match(haystack)) {
                hits.insert(id);
            }
        }
        hits
    }
}
