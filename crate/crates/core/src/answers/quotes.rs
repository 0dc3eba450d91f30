use serde::{Deserialize, Serialize};

/// Direct-speech markers looked for in question and answer text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteMarkers {
    /// Any occurrence of one of these characters counts.
    pub chars: Vec<char>,
    /// A ‘…’ pair counts (a lone ’ is an apostrophe).
    pub single_pairs: bool,
    /// An em or en dash opening the text or following terminal punctuation.
    pub dialogue_dash: bool,
}

impl Default for QuoteMarkers {
    fn default() -> Self {
        QuoteMarkers {
            chars: vec!['«', '»', '“', '”', '"'],
            single_pairs: true,
            dialogue_dash: true,
        }
    }
}

impl QuoteMarkers {
    pub fn detect(&self, text: &str) -> bool {
        if text.chars().any(|c| self.chars.contains(&c)) {
            return true;
        }
        if self.single_pairs {
            if let Some(open) = text.find('‘') {
                if text[open..].contains('’') {
                    return true;
                }
            }
        }
        if self.dialogue_dash {
            let mut prev: Option<char> = None;
            for c in text.chars() {
                if c.is_whitespace() {
                    continue;
                }
                if matches!(c, '—' | '–') && prev.is_none_or(|p| matches!(p, '.' | '!' | '?' | '…' | ':')) {
                    return true;
                }
                prev = Some(c);
            }
        }
        false
    }
}

/// Whether `text` carries any default direct-speech marker.
pub fn detect_quote_markers(text: &str) -> bool {
    QuoteMarkers::default().detect(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(detect_quote_markers("«Je refuse», a-t-il dit."));
        assert!(!detect_quote_markers("Il a refusé la proposition."));
        assert!(detect_quote_markers("\"I refuse,\" she said."));
    }

    #[test]
    fn apostrophes_are_not_quotes() {
        assert!(!detect_quote_markers("L’équipe s’est imposée."));
        assert!(detect_quote_markers("Il parle d’un ‘malentendu’."));
    }

    #[test]
    fn dialogue_dashes() {
        assert!(detect_quote_markers("— Vous reviendrez ?"));
        assert!(detect_quote_markers("Il hésite. — Peut-être, dit-il."));
        assert!(!detect_quote_markers("Le club — fondé en 1902 — fête ses 120 ans."));
    }

    #[test]
    fn inventory_is_configurable() {
        let m = QuoteMarkers {
            chars: vec!['«'],
            single_pairs: false,
            dialogue_dash: false,
        };
        assert!(!m.detect("\"Non\", dit-il."));
        assert!(m.detect("« Non »"));
    }
}
