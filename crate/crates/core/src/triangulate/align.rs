use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How units of two annotators are paired up.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignMode {
    /// Repeatedly take the highest-overlap pair among unmatched units.
    #[default]
    Greedy,
    /// Maximise total overlap over one-to-one matchings.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub a: usize,
    pub b: usize,
    pub intersection: usize,
    pub union: usize,
}

impl MatchedPair {
    pub fn jaccard(&self) -> f64 {
        self.intersection as f64 / self.union as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alignment {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
    /// Characters covered by unmatched units; they enter the union only.
    pub unmatched_chars: usize,
}

fn overlap(a: &Range<usize>, b: &Range<usize>) -> (usize, usize) {
    let inter = a.end.min(b.end).saturating_sub(a.start.max(b.start));
    (inter, a.len() + b.len() - inter)
}

/// Character-level Jaccard of two spans (0 for two empty spans).
pub fn span_jaccard(a: &Range<usize>, b: &Range<usize>) -> f64 {
    let (i, u) = overlap(a, b);
    if u == 0 {
        0.0
    } else {
        i as f64 / u as f64
    }
}

/// One-to-one alignment of two span lists. Pairs without any shared
/// character never match.
pub fn align_spans(a: &[Range<usize>], b: &[Range<usize>], mode: AlignMode) -> Alignment {
    let mut cands = Vec::new();
    for (i, sa) in a.iter().enumerate() {
        for (j, sb) in b.iter().enumerate() {
            let (inter, union) = overlap(sa, sb);
            if inter > 0 {
                cands.push(MatchedPair {
                    a: i,
                    b: j,
                    intersection: inter,
                    union,
                });
            }
        }
    }
    let mut pairs = match mode {
        AlignMode::Greedy => greedy(a, b, cands),
        AlignMode::Optimal => optimal(a.len(), b.len(), &cands),
    };
    pairs.sort_by_key(|p| (p.a, p.b));

    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    for p in &pairs {
        used_a[p.a] = true;
        used_b[p.b] = true;
    }
    let unmatched_a: Vec<usize> = (0..a.len()).filter(|&i| !used_a[i]).collect();
    let unmatched_b: Vec<usize> = (0..b.len()).filter(|&j| !used_b[j]).collect();
    let unmatched_chars = unmatched_a.iter().map(|&i| a[i].len()).sum::<usize>()
        + unmatched_b.iter().map(|&j| b[j].len()).sum::<usize>();
    Alignment {
        pairs,
        unmatched_a,
        unmatched_b,
        unmatched_chars,
    }
}

fn greedy(a: &[Range<usize>], b: &[Range<usize>], mut cands: Vec<MatchedPair>) -> Vec<MatchedPair> {
    // Ties are broken on the unordered pair of spans so that swapping the
    // annotators picks the same pairs.
    let key = |p: &MatchedPair| {
        let (x, y) = ((a[p.a].start, a[p.a].end), (b[p.b].start, b[p.b].end));
        (x.min(y), x.max(y))
    };
    cands.sort_by(|p, q| {
        let by_overlap = (q.intersection * p.union).cmp(&(p.intersection * q.union));
        by_overlap.then_with(|| key(p).cmp(&key(q)))
    });
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut out = Vec::new();
    for p in cands {
        if !used_a[p.a] && !used_b[p.b] {
            used_a[p.a] = true;
            used_b[p.b] = true;
            out.push(p);
        }
    }
    out
}

fn optimal(n_a: usize, n_b: usize, cands: &[MatchedPair]) -> Vec<MatchedPair> {
    if cands.is_empty() {
        return Vec::new();
    }
    let transpose = n_a > n_b;
    let (rows, cols) = if transpose { (n_b, n_a) } else { (n_a, n_b) };
    let mut cost = vec![vec![0.0f64; cols]; rows];
    for p in cands {
        let (r, c) = if transpose { (p.b, p.a) } else { (p.a, p.b) };
        cost[r][c] = -p.jaccard();
    }
    let assignment = hungarian(&cost);
    let mut out = Vec::new();
    for (r, c) in assignment.into_iter().enumerate() {
        let (i, j) = if transpose { (c, r) } else { (r, c) };
        if let Some(p) = cands.iter().find(|p| p.a == i && p.b == j) {
            out.push(*p);
        }
    }
    out
}

/// Minimum-cost assignment of every row to a distinct column (rows ≤ cols).
/// Shortest augmenting paths with potentials, O(rows² · cols).
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let m = cost[0].len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    // p[j]: row (1-based) assigned to column j; column 0 is a sentinel.
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=m {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Pooled overlap: Σ|A∩B| over matched pairs divided by Σ|A∪B| over matched
/// pairs plus the length of every unmatched unit.
pub fn corpus_jaccard(alignments: &[Alignment]) -> Result<f64> {
    if alignments.is_empty() {
        return Err(Error::data("span overlap needs at least one aligned article"));
    }
    let inter: usize = alignments.iter().flat_map(|a| &a.pairs).map(|p| p.intersection).sum();
    let union: usize = alignments
        .iter()
        .map(|a| a.pairs.iter().map(|p| p.union).sum::<usize>() + a.unmatched_chars)
        .sum();
    if union == 0 {
        return Err(Error::data("span overlap is undefined when neither annotator marked any span"));
    }
    Ok(inter as f64 / union as f64)
}
