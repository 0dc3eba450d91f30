//! Seeded inputs shared by the benchmarks.

use std::ops::Range;

use qstance_core::corpus::ArticleRecord;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` random unit vectors of dimension `dim`.
pub fn unit_vectors(rng: &mut impl Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect()
}

/// Two codings of the same text: `n` spans each, the second jittered.
pub fn span_pair(rng: &mut impl Rng, n: usize) -> (Vec<Range<usize>>, Vec<Range<usize>>) {
    let a: Vec<Range<usize>> = (0..n).map(|i| i * 100..i * 100 + 40 + rng.random_range(0..40)).collect();
    let mut b = Vec::with_capacity(n);
    for r in &a {
        if rng.random_bool(0.9) {
            let shift = rng.random_range(0..10);
            b.push(r.start + shift..r.end + shift);
        }
    }
    (a, b)
}

const SENTENCES: [&str; 8] = [
    "M. Dupont est arrivé à Lausanne mardi soir.",
    "Pourquoi le conseil a-t-il attendu si longtemps ?",
    "« Nous verrons bien », a déclaré la syndique.",
    "Le budget atteint 3,5 millions de francs, soit 12 % de plus qu'en 2022.",
    "Reste à savoir qui paiera la facture.",
    "Les travaux reprendront le 1er juin, selon la Ville.",
    "Est-ce vraiment une surprise ?",
    "L'entraîneur n'a pas souhaité commenter.",
];

/// Article of roughly `n_sentences` French sentences.
pub fn article(rng: &mut impl Rng, id: usize, n_sentences: usize) -> ArticleRecord {
    let text: Vec<&str> = (0..n_sentences).map(|_| SENTENCES[rng.random_range(0..SENTENCES.len())]).collect();
    ArticleRecord {
        article_id: format!("b{id}"),
        source: "arcinfo.ch".into(),
        published_at: "2023-05-01".into(),
        title: None,
        text: text.join(" "),
        topic_id: None,
        lang: "fr".into(),
        metadata: Default::default(),
    }
}
