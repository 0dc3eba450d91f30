//! Deterministic rule-based sentence segmentation for French news text.
//!
//! Boundaries are placed after runs of `.`, `!`, `?` or `…` (plus any closing
//! quotes or brackets) when the next token starts a sentence. Newlines are hard
//! boundaries. Boundaries are suppressed inside `« … »` / `“ … ”` quotations and
//! after known abbreviations, initials and dotted compounds such as `J.-C.`.

use std::collections::HashSet;
use std::ops::Range;

use once_cell::sync::Lazy;

use super::{ArticleRecord, SentenceRecord};

const ABBREVIATIONS: &[&str] = &[
    "m", "mm", "mme", "mmes", "mlle", "mlles", "dr", "drs", "pr", "me", "mgr", "st", "ste", "sts",
    "stes", "cf", "av", "apr", "bd", "boul", "al", "art", "chap", "vol", "fig", "éd", "ed", "p",
    "pp", "no", "nos", "env", "tél", "tel", "hab", "min", "max", "ex", "janv", "févr", "fév",
    "avr", "juil", "sept", "oct", "nov", "déc", "dép", "gén", "lt", "col", "cdt", "adj", "vs",
    "resp", "réf", "mrs", "mr", "jr", "sr",
];

static DEFAULT_ABBREVIATIONS: Lazy<HashSet<String>> =
    Lazy::new(|| ABBREVIATIONS.iter().map(|s| s.to_string()).collect());

/// Sentence splitter. `Segmenter::default()` uses the bundled French abbreviation list.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter {
            abbreviations: DEFAULT_ABBREVIATIONS.clone(),
        }
    }
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '…')
}

fn is_closer(c: char) -> bool {
    matches!(c, '»' | '”' | ')' | ']' | '"' | '’')
}

fn is_open_quote(c: char) -> bool {
    matches!(c, '«' | '“')
}

fn is_close_quote(c: char) -> bool {
    matches!(c, '»' | '”')
}

fn starts_sentence(c: char) -> bool {
    c.is_uppercase()
        || c.is_ascii_digit()
        || matches!(c, '«' | '“' | '"' | '—' | '–' | '-' | '(' | '[' | '¿' | '¡')
}

impl Segmenter {
    pub fn with_abbreviations<I, S>(abbreviations: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Segmenter {
            abbreviations: abbreviations
                .into_iter()
                .map(|s| s.as_ref().trim_end_matches('.').to_lowercase())
                .collect(),
        }
    }

    /// Byte ranges of the trimmed, non-empty sentences of `text`.
    pub fn spans(&self, text: &str) -> Vec<Range<usize>> {
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let n = chars.len();
        let byte_at = |i: usize| if i < n { chars[i].0 } else { text.len() };

        let mut cuts = Vec::new();
        let mut depth = 0usize;
        let mut i = 0;
        while i < n {
            let c = chars[i].1;
            if c == '\n' {
                cuts.push(byte_at(i));
                depth = 0;
                i += 1;
                continue;
            }
            if is_open_quote(c) {
                depth += 1;
            } else if is_close_quote(c) {
                depth = depth.saturating_sub(1);
            }
            if !is_terminal(c) {
                i += 1;
                continue;
            }

            let mut run_end = i;
            while run_end < n && is_terminal(chars[run_end].1) {
                run_end += 1;
            }
            // Absorb closing quotes and brackets, allowing the French space before them.
            let mut end = run_end;
            loop {
                let mut m = end;
                while m < n && chars[m].1 != '\n' && chars[m].1.is_whitespace() {
                    m += 1;
                }
                if m < n && is_closer(chars[m].1) {
                    if is_close_quote(chars[m].1) {
                        depth = depth.saturating_sub(1);
                    }
                    end = m + 1;
                } else {
                    break;
                }
            }
            if end >= n || !chars[end].1.is_whitespace() {
                i = end.max(i + 1);
                continue;
            }
            let mut next = end;
            while next < n && chars[next].1 != '\n' && chars[next].1.is_whitespace() {
                next += 1;
            }
            if next >= n || chars[next].1 == '\n' {
                i = next;
                continue;
            }
            let single_dot = run_end == i + 1 && c == '.';
            let blocked = depth > 0
                || !starts_sentence(chars[next].1)
                || (single_dot && self.is_abbreviation(&chars, i));
            if !blocked {
                cuts.push(byte_at(end));
            }
            i = end;
        }

        let mut spans = Vec::new();
        let mut start = 0;
        for cut in cuts.into_iter().chain(std::iter::once(text.len())) {
            if let Some(r) = trimmed(text, start, cut) {
                spans.push(r);
            }
            start = cut;
        }
        spans
    }

    /// Whether the word ending right before the dot at `dot` is an abbreviation.
    fn is_abbreviation(&self, chars: &[(usize, char)], dot: usize) -> bool {
        let mut j = dot;
        while j > 0 {
            let c = chars[j - 1].1;
            if c.is_alphanumeric() || matches!(c, '.' | '-' | '°' | '\'' | '’') {
                j -= 1;
            } else {
                break;
            }
        }
        let word: String = chars[j..dot]
            .iter()
            .map(|&(_, c)| c)
            .skip_while(|c| !c.is_alphabetic())
            .collect();
        if word.is_empty() {
            return false;
        }
        // elided article: "l'av." -> "av"
        let word = word.rsplit(['\'', '’']).next().unwrap_or(&word).to_string();
        if word.contains('.') {
            return true;
        }
        let mut letters = word.chars();
        if let (Some(first), None) = (letters.next(), letters.next()) {
            if first.is_uppercase() {
                return true;
            }
        }
        self.abbreviations.contains(&word.to_lowercase())
    }

    /// Sentence byte ranges as used for `sent_id` numbering; text without a
    /// sentence boundary is a single sentence.
    pub fn sentence_spans(&self, text: &str) -> Vec<Range<usize>> {
        let mut spans = self.spans(text);
        if spans.is_empty() {
            spans.push(0..text.len());
        }
        spans
    }

    pub fn segment(&self, article: &ArticleRecord) -> Vec<SentenceRecord> {
        self.sentence_spans(&article.text)
            .into_iter()
            .enumerate()
            .map(|(i, r)| SentenceRecord {
                article_id: article.article_id.clone(),
                sent_id: i as u32,
                text: article.text[r].to_string(),
            })
            .collect()
    }
}

fn trimmed(text: &str, start: usize, end: usize) -> Option<Range<usize>> {
    let s = &text[start..end];
    let lead = s.len() - s.trim_start().len();
    let trail = s.len() - s.trim_end().len();
    if lead + trail >= s.len() {
        None
    } else {
        Some(start + lead..end - trail)
    }
}

/// Segments an article with the default French rules.
pub fn segment(article: &ArticleRecord) -> Vec<SentenceRecord> {
    Segmenter::default().segment(article)
}

/// Byte ranges of the sentences of `text` under the default rules.
pub fn segment_spans(text: &str) -> Vec<Range<usize>> {
    Segmenter::default().spans(text)
}

/// Character ranges of the sentences of `text`, indexed by `sent_id`.
pub fn sentence_char_spans(text: &str) -> Vec<Range<usize>> {
    char_spans(text, &Segmenter::default().sentence_spans(text))
}

/// Converts byte ranges of `text` into Unicode scalar (character) offsets.
pub fn char_spans(text: &str, spans: &[Range<usize>]) -> Vec<Range<usize>> {
    spans
        .iter()
        .map(|r| {
            let start = text[..r.start].chars().count();
            let len = text[r.clone()].chars().count();
            start..start + len
        })
        .collect()
}
