//! Brute-force answer-span search: every (start, length) window is scored by
//! summing its member vectors directly. No prefix sums, no shared code with
//! the library search.

#![allow(dead_code)]

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub found: bool,
    /// Best window over all candidates, whatever the threshold.
    pub best: Option<(usize, usize, f64)>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Unit mean of the member vectors, or None when the mean vanishes.
pub fn oracle_group_vector(vectors: &[Vec<f64>], members: &[usize]) -> Option<Vec<f64>> {
    let dim = vectors[0].len();
    let mut mean = vec![0.0; dim];
    for &m in members {
        for k in 0..dim {
            mean[k] += vectors[m][k] / members.len() as f64;
        }
    }
    let n = norm(&mean);
    if n <= 1e-12 {
        return None;
    }
    Some(mean.iter().map(|x| x / n).collect())
}

pub fn oracle_search(
    vectors: &[Vec<f64>],
    members: &[usize],
    horizon: usize,
    lengths: &[usize],
    threshold: f64,
) -> OracleResult {
    let g = oracle_group_vector(vectors, members).expect("degenerate group given to oracle");
    let last_q = *members.iter().max().unwrap();
    let n = vectors.len();
    let mut candidates: Vec<(usize, usize, f64)> = Vec::new();
    for start in 0..n {
        for &len in lengths {
            let end = start + len - 1;
            // Window lies strictly after the group and no further than the horizon.
            if start <= last_q || end >= n || end > last_q + horizon {
                continue;
            }
            let dim = g.len();
            let mut mean = vec![0.0; dim];
            for v in &vectors[start..=end] {
                for k in 0..dim {
                    mean[k] += v[k];
                }
            }
            for x in mean.iter_mut() {
                *x /= len as f64;
            }
            let mn = norm(&mean);
            if mn <= 1e-12 {
                continue;
            }
            let cos: f64 = g.iter().zip(&mean).map(|(a, b)| a * b).sum::<f64>() / mn;
            candidates.push((start, len, cos));
        }
    }
    // Highest score; ties to the earliest start, then the shortest window.
    candidates.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let best = candidates.first().copied();
    OracleResult {
        found: best.is_some_and(|b| b.2 >= threshold),
        best,
    }
}

/// Seeded synthetic article: `n` random unit vectors of dimension `dim`.
pub fn random_article(rng: &mut impl rand::Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let n = norm(&v);
            if n > 1e-6 {
                break v.iter().map(|x| x / n).collect();
            }
        })
        .collect()
}
