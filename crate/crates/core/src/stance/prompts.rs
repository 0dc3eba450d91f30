//! Teacher prompt assets. The core ships them for HTTP adapters to use and
//! never looks inside.

use crate::corpus::SENTENCE_DELIMITER;

pub const BINARY_SYSTEM_PROMPT: &str = include_str!("../../data/prompts/teacher_binary.txt");
pub const STANCE_SYSTEM_PROMPT: &str = include_str!("../../data/prompts/teacher_stance.txt");

/// Renders a `<tgt>`-marked context window as the teacher's user prompt.
pub fn user_prompt(context_text: &str) -> String {
    let mut out = String::new();
    for part in context_text.split(SENTENCE_DELIMITER) {
        if let Some(inner) = part.strip_prefix("<tgt>").and_then(|p| p.strip_suffix("</tgt>")) {
            out.push_str("Phrase cible : ");
            out.push_str(inner);
        } else {
            out.push_str("Contexte : ");
            out.push_str(part);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marks_the_target_line() {
        let p = user_prompt("Avant. </s> <tgt>Pourquoi ?</tgt> </s> Après.");
        assert_eq!(p, "Contexte : Avant.\nPhrase cible : Pourquoi ?\nContexte : Après.\n");
    }
}
