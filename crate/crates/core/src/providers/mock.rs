//! In-process provider that answers the label, embedding and NER protocols
//! without a network or a model. Outputs depend only on the request text and
//! the seed, so runs are reproducible.

use once_cell::sync::Lazy;
use serde_json::{json, Value};

use super::{ProviderError, Transport, BINARY_ENDPOINT, EMBED_ENDPOINT, NER_ENDPOINT, STANCE_ENDPOINT};
use crate::candidates::{RuleId, RuleSet};
use crate::corpus::{strip_context_markup, target_text};
use crate::labels::StanceLabel;

/// FNV-1a over `text`, mixed with `seed`.
pub fn stable_hash(seed: u64, text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for b in text.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix(h)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Teacher answers on the four-point scale (with the odd off-scale value, as
/// real chat models produce); student answers with continuous confidences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockRole {
    Teacher,
    Student,
}

/// Surface form, label, base score. Scores under 0.5 exercise the retention threshold.
pub const GAZETTEER: &[(&str, &str, f64)] = &[
    ("Emmanuel Macron", "person", 0.97),
    ("Macron", "person", 0.9),
    ("Élisabeth Borne", "person", 0.95),
    ("Volodymyr Zelensky", "person", 0.96),
    ("Vladimir Poutine", "person", 0.96),
    ("Kylian Mbappé", "person", 0.95),
    ("Alain Berset", "person", 0.94),
    ("Karin Keller-Sutter", "person", 0.94),
    ("Marine Le Pen", "person", 0.95),
    ("Joe Biden", "person", 0.96),
    ("Jean Dupont", "person", 0.88),
    ("Union européenne", "organization", 0.93),
    ("Conseil fédéral", "organization", 0.9),
    ("Conseil d'État", "organization", 0.86),
    ("Assemblée nationale", "organization", 0.9),
    ("ONU", "organization", 0.92),
    ("OTAN", "organization", 0.92),
    ("UDC", "organization", 0.85),
    ("SNCF", "organization", 0.9),
    ("FC Sion", "organization", 0.88),
    ("Servette", "organization", 0.82),
    ("EPFL", "organization", 0.9),
    ("UBS", "organization", 0.91),
    ("Credit Suisse", "organization", 0.91),
    ("Nestlé", "organization", 0.9),
    ("Apple", "organization", 0.8),
    ("Suisse", "location", 0.93),
    ("France", "location", 0.94),
    ("Ukraine", "location", 0.94),
    ("Russie", "location", 0.94),
    ("Gaza", "location", 0.93),
    ("Israël", "location", 0.93),
    ("Genève", "location", 0.92),
    ("Lausanne", "location", 0.92),
    ("Neuchâtel", "location", 0.92),
    ("Sion", "location", 0.6),
    ("Paris", "location", 0.93),
    ("Valais", "location", 0.9),
    ("Kiev", "location", 0.9),
    ("Bruxelles", "location", 0.9),
    ("Français", "nationality or religious or political group", 0.85),
    ("Suisses", "nationality or religious or political group", 0.85),
    ("Ukrainiens", "nationality or religious or political group", 0.85),
    ("musulmans", "nationality or religious or political group", 0.8),
    ("socialistes", "nationality or religious or political group", 0.75),
    ("habitants", "generic social group", 0.7),
    ("agriculteurs", "generic social group", 0.75),
    ("retraités", "generic social group", 0.75),
    ("locataires", "generic social group", 0.72),
    ("commerçants", "generic social group", 0.72),
    ("jeunes", "generic social group", 0.46),
    ("citoyens", "public or audience", 0.78),
    ("contribuables", "public or audience", 0.76),
    ("électeurs", "public or audience", 0.76),
    ("lecteurs", "public or audience", 0.74),
    ("spectateurs", "public or audience", 0.7),
    ("public", "public or audience", 0.44),
    ("Coupe du monde", "event", 0.9),
    ("Jeux olympiques", "event", 0.9),
    ("Euro 2024", "event", 0.88),
    ("Fête des vignerons", "event", 0.86),
    ("Paléo", "event", 0.84),
    ("COP28", "event", 0.9),
];

static RULES: Lazy<RuleSet> = Lazy::new(RuleSet::bundled);

const STOPWORDS: &[&str] = &[
    "les", "des", "une", "est", "que", "qui", "pour", "dans", "par", "sur", "pas", "plus", "avec", "son", "ses",
    "aux", "ont", "été", "mais", "elle", "lui", "leur", "nous", "vous", "ils", "elles", "cette", "ces", "tout",
    "sont", "fait", "comme", "aussi", "entre", "sans", "sous", "dont", "même", "encore", "déjà", "très",
];

#[derive(Debug, Clone)]
pub struct MockProvider {
    role: MockRole,
    seed: u64,
    dim: usize,
}

impl MockProvider {
    pub fn new(role: MockRole, seed: u64) -> Self {
        MockProvider { role, seed, dim: 64 }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim.max(1);
        self
    }

    fn u(&self, salt: &str, text: &str) -> f64 {
        unit(stable_hash(self.seed ^ stable_hash(0, salt), text))
    }

    fn binary(&self, context: &str) -> Value {
        let target = target_text(context).unwrap_or(context);
        let rules = RULES.matches(target);
        let u = self.u("binary", target);
        let (is_q, conf) = match self.role {
            MockRole::Teacher => {
                if rules.contains(&RuleId::Qmark) {
                    // A few replies fall off the scale and get snapped downstream.
                    let c = if u < 0.08 {
                        0.5
                    } else if u < 0.14 {
                        0.79
                    } else if u < 0.3 {
                        0.8
                    } else {
                        0.95
                    };
                    (true, c)
                } else if !rules.is_empty() {
                    if u < 0.4 {
                        (true, 0.8)
                    } else {
                        (false, 0.5)
                    }
                } else {
                    (false, if u < 0.1 { 0.8 } else { 0.95 })
                }
            }
            MockRole::Student => {
                if rules.contains(&RuleId::Qmark) {
                    (true, round4(0.6 + 0.39 * u))
                } else if !rules.is_empty() {
                    (u < 0.5, round4(0.5 + 0.35 * u))
                } else {
                    (false, round4(0.9 + 0.09 * u))
                }
            }
        };
        json!({ "is_interrogative": is_q, "confidence": conf })
    }

    fn stance(&self, context: &str) -> Value {
        let target = target_text(context).unwrap_or(context);
        let label = heuristic_stance(target, self.u("stance-label", target));
        let u = self.u("stance-conf", target);
        let conf = match self.role {
            MockRole::Teacher => {
                if u < 0.1 {
                    0.5
                } else if u < 0.3 {
                    0.8
                } else {
                    0.95
                }
            }
            MockRole::Student => round4(0.55 + 0.44 * u),
        };
        json!({ "label": label.as_str(), "confidence": conf })
    }

    fn embed(&self, text: &str) -> Vec<f64> {
        let plain = strip_context_markup(text).to_lowercase();
        let mut tokens: Vec<&str> = plain
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| t.chars().count() >= 3 && !STOPWORDS.contains(t))
            .collect();
        if tokens.is_empty() {
            tokens.push(plain.as_str());
        }
        let mut v = vec![0.0; self.dim];
        for token in tokens {
            let mut h = stable_hash(self.seed, token);
            for x in v.iter_mut() {
                h = splitmix(h);
                *x += 2.0 * unit(h) - 1.0;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    fn ner(&self, text: &str, labels: &[String]) -> Value {
        let mut taken: Vec<(usize, usize)> = Vec::new();
        let mut mentions: Vec<(usize, usize, &str, &str, f64)> = Vec::new();
        let mut entries: Vec<&(&str, &str, f64)> = GAZETTEER.iter().collect();
        entries.sort_by_key(|(surface, _, _)| std::cmp::Reverse(surface.chars().count()));
        for (surface, label, base) in entries {
            if !labels.iter().any(|l| l == label) {
                continue;
            }
            for (byte_start, _) in text.match_indices(surface) {
                let byte_end = byte_start + surface.len();
                let before = text[..byte_start].chars().next_back();
                let after = text[byte_end..].chars().next();
                if before.is_some_and(char::is_alphanumeric) || after.is_some_and(char::is_alphanumeric) {
                    continue;
                }
                let start = text[..byte_start].chars().count();
                let end = start + surface.chars().count();
                if taken.iter().any(|&(s, e)| start < e && s < end) {
                    continue;
                }
                taken.push((start, end));
                let jitter = 0.03 * self.u("ner", &format!("{surface}@{start}"));
                mentions.push((start, end, surface, label, round4(base - jitter)));
            }
        }
        mentions.sort_by_key(|m| m.0);
        Value::Array(
            mentions
                .into_iter()
                .map(|(start, end, surface, label, score)| {
                    json!({ "text": surface, "label": label, "score": score, "start": start, "end": end })
                })
                .collect(),
        )
    }
}

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

/// Surface cues first, hash-weighted fallback otherwise.
fn heuristic_stance(target: &str, u: f64) -> StanceLabel {
    let t = target.trim().to_lowercase().replace('’', "'");
    let t = t.trim_start_matches(|c: char| matches!(c, '«' | '“' | '"' | '—' | '–' | '-') || c.is_whitespace());
    let words = t.split_whitespace().count();
    if t.contains("n'est-ce pas") || t.ends_with(", non ?") || t.ends_with(", hein ?") {
        StanceLabel::Tag
    } else if words <= 3 && t.contains('?') {
        StanceLabel::EchoClarification
    } else if ["comment ", "pourquoi ", "combien ", "quel ", "quelle ", "quels ", "quelles ", "que faire", "qu'est-ce", "y a-t-il"]
        .iter()
        .any(|p| t.starts_with(p))
    {
        StanceLabel::FramingProcedural
    } else if t.contains("vraiment") || t.contains("n'est-il pas") || t.contains("ne faudrait-il pas") {
        StanceLabel::Leading
    } else if t.starts_with("à quoi bon") || t.starts_with("qui peut") || t.contains("comment peut-on") {
        StanceLabel::Rhetorical
    } else if target.contains('«') {
        StanceLabel::InformationSeeking
    } else if u < 0.5 {
        StanceLabel::FramingProcedural
    } else if u < 0.7 {
        StanceLabel::InformationSeeking
    } else if u < 0.85 {
        StanceLabel::Rhetorical
    } else if u < 0.94 {
        StanceLabel::EchoClarification
    } else if u < 0.97 {
        StanceLabel::Leading
    } else {
        StanceLabel::Tag
    }
}

fn bad_request(endpoint: &str, message: &str) -> ProviderError {
    ProviderError::Status {
        endpoint: endpoint.to_string(),
        status: 400,
        body: message.to_string(),
    }
}

fn items<'a>(endpoint: &str, body: &'a Value) -> Result<&'a Vec<Value>, ProviderError> {
    body.get("items")
        .and_then(Value::as_array)
        .ok_or_else(|| bad_request(endpoint, "missing items"))
}

fn field<'a>(endpoint: &str, item: &'a Value, name: &str) -> Result<&'a str, ProviderError> {
    item.get(name)
        .and_then(Value::as_str)
        .ok_or_else(|| bad_request(endpoint, &format!("item without {name}")))
}

impl Transport for MockProvider {
    fn post(&self, endpoint: &str, body: &Value) -> Result<Value, ProviderError> {
        match endpoint {
            BINARY_ENDPOINT | STANCE_ENDPOINT => {
                let results = items(endpoint, body)?
                    .iter()
                    .map(|item| {
                        let ctx = field(endpoint, item, "context_text")?;
                        Ok(if endpoint == BINARY_ENDPOINT {
                            self.binary(ctx)
                        } else {
                            self.stance(ctx)
                        })
                    })
                    .collect::<Result<Vec<_>, ProviderError>>()?;
                Ok(json!({ "results": results }))
            }
            EMBED_ENDPOINT => {
                let texts = body
                    .get("texts")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad_request(endpoint, "missing texts"))?;
                let vectors = texts
                    .iter()
                    .map(|t| t.as_str().map(|s| self.embed(s)).ok_or_else(|| bad_request(endpoint, "non-string text")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(json!({ "dim": self.dim, "vectors": vectors }))
            }
            NER_ENDPOINT => {
                let results = items(endpoint, body)?
                    .iter()
                    .map(|item| {
                        let text = field(endpoint, item, "text")?;
                        let labels: Vec<String> = item
                            .get("labels")
                            .and_then(Value::as_array)
                            .map(|ls| ls.iter().filter_map(|l| l.as_str().map(str::to_string)).collect())
                            .unwrap_or_default();
                        Ok(self.ner(text, &labels))
                    })
                    .collect::<Result<Vec<_>, ProviderError>>()?;
                Ok(json!({ "results": results }))
            }
            other => Err(ProviderError::Status {
                endpoint: other.to_string(),
                status: 404,
                body: "unknown endpoint".into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn post(p: &MockProvider, endpoint: &str, body: Value) -> Value {
        p.post(endpoint, &body).unwrap()
    }

    #[test]
    fn hash_is_stable_and_seeded() {
        assert_eq!(stable_hash(1, "abc"), stable_hash(1, "abc"));
        assert_ne!(stable_hash(1, "abc"), stable_hash(2, "abc"));
        assert_ne!(stable_hash(1, "abc"), stable_hash(1, "abd"));
    }

    #[test]
    fn teacher_confidences_are_mostly_on_scale() {
        let p = MockProvider::new(MockRole::Teacher, 7);
        let items: Vec<Value> = (0..200)
            .map(|i| json!({"context_text": format!("<tgt>Pourquoi le cas {i} ?</tgt>")}))
            .collect();
        let r = post(&p, BINARY_ENDPOINT, json!({ "items": items }));
        let confs: Vec<f64> = r["results"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x["confidence"].as_f64().unwrap())
            .collect();
        assert!(confs.iter().all(|c| [0.5, 0.79, 0.8, 0.95].contains(c)));
        assert!(confs.contains(&0.79));
    }

    #[test]
    fn embeddings_are_unit_and_text_driven() {
        let p = MockProvider::new(MockRole::Student, 3);
        let r = post(&p, EMBED_ENDPOINT, json!({"texts": ["Le budget de la ville", "<tgt>Le budget de la ville</tgt>", "Match nul à Sion"]}));
        let v: Vec<Vec<f64>> = serde_json::from_value(r["vectors"].clone()).unwrap();
        for x in &v {
            let n: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-9);
        }
        assert_eq!(v[0], v[1]);
        assert_ne!(v[0], v[2]);
    }

    #[test]
    fn ner_prefers_longest_match_and_uses_char_offsets() {
        let p = MockProvider::new(MockRole::Student, 0);
        let labels = vec!["person".to_string(), "location".to_string()];
        let r = post(&p, NER_ENDPOINT, json!({"items": [{"text": "Que fera Emmanuel Macron à Genève ?", "labels": labels}]}));
        let m = r["results"][0].as_array().unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0]["text"], "Emmanuel Macron");
        assert_eq!(m[0]["start"], 9);
        assert_eq!(m[0]["end"], 24);
        assert_eq!(m[1]["text"], "Genève");
        assert_eq!(m[1]["start"], 27);
    }

    #[test]
    fn ner_respects_requested_labels() {
        let p = MockProvider::new(MockRole::Student, 0);
        let r = post(&p, NER_ENDPOINT, json!({"items": [{"text": "La France et l'ONU.", "labels": ["organization"]}]}));
        let m = r["results"][0].as_array().unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0]["label"], "organization");
    }

    #[test]
    fn stance_cues() {
        assert_eq!(heuristic_stance("Il l'a dit, n'est-ce pas ?", 0.0), StanceLabel::Tag);
        assert_eq!(heuristic_stance("Et après ?", 0.0), StanceLabel::EchoClarification);
        assert_eq!(heuristic_stance("Comment expliquer une telle chute ?", 0.9), StanceLabel::FramingProcedural);
        assert_eq!(heuristic_stance("À quoi bon voter si rien ne change ?", 0.0), StanceLabel::Rhetorical);
    }
}
