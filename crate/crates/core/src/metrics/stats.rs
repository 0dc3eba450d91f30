//! Descriptive statistics with deterministic definitions.

/// Summary of a weighted sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    pub p90: f64,
}

/// Mean, population SD and nearest-rank P50/P90 of `(value, weight)` pairs.
/// Zero-weight pairs are ignored; None for an empty sample.
pub fn summarize(values: &[(f64, f64)]) -> Option<Summary> {
    let mut v: Vec<(f64, f64)> = values.iter().copied().filter(|&(_, w)| w > 0.0).collect();
    if v.is_empty() {
        return None;
    }
    let total: f64 = v.iter().map(|&(_, w)| w).sum();
    let mean = v.iter().map(|&(x, w)| x * w).sum::<f64>() / total;
    let var = v.iter().map(|&(x, w)| w * (x - mean) * (x - mean)).sum::<f64>() / total;
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    Some(Summary {
        n: v.len(),
        mean,
        median: nearest_rank(&v, total, 0.5),
        sd: var.sqrt(),
        p90: nearest_rank(&v, total, 0.9),
    })
}

/// Smallest value whose cumulative weight reaches `p × total`.
fn nearest_rank(sorted: &[(f64, f64)], total: f64, p: f64) -> f64 {
    let target = p * total;
    let mut acc = 0.0;
    for &(x, w) in sorted {
        acc += w;
        if acc >= target - 1e-9 * total {
            return x;
        }
    }
    sorted.last().expect("non-empty sample").0
}

/// Unweighted nearest-rank percentile.
pub fn percentile(values: &[f64], p: f64) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = values.iter().map(|&x| (x, 1.0)).collect();
    summarize(&pairs).map(|_| {
        let mut v = pairs;
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        nearest_rank(&v, v.len() as f64, p)
    })
}

/// 2PR / (P + R); None when both are zero.
pub fn f1(precision: f64, recall: f64) -> Option<f64> {
    if precision + recall == 0.0 {
        None
    } else {
        Some(2.0 * precision * recall / (precision + recall))
    }
}

/// `num / den`, None when the denominator is zero.
pub fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unweighted(xs: &[f64]) -> Summary {
        summarize(&xs.iter().map(|&x| (x, 1.0)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn nearest_rank_percentiles() {
        let s = unweighted(&[15.0, 20.0, 35.0, 40.0, 50.0]);
        assert_eq!(s.median, 35.0);
        assert_eq!(s.p90, 50.0);
        let s = unweighted(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.median, 2.0);
        assert_eq!(percentile(&[3.0, 1.0, 2.0], 0.9), Some(3.0));
    }

    #[test]
    fn population_sd() {
        let s = unweighted(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert_eq!(s.mean, 5.0);
        assert_eq!(s.sd, 2.0);
    }

    #[test]
    fn weights_act_as_repetition() {
        let w = summarize(&[(1.0, 3.0), (5.0, 1.0)]).unwrap();
        let r = unweighted(&[1.0, 1.0, 1.0, 5.0]);
        assert_eq!((w.mean, w.median, w.sd, w.p90), (r.mean, r.median, r.sd, r.p90));
    }

    #[test]
    fn empty_sample() {
        assert!(summarize(&[]).is_none());
        assert!(summarize(&[(1.0, 0.0)]).is_none());
    }

    #[test]
    fn f1_from_published_precision_and_recall() {
        let v = f1(0.76, 0.80).unwrap();
        assert!((v - 0.779_487_179_487_179_5).abs() < 1e-12);
        assert!((v - 0.78).abs() <= 0.005);
        assert_eq!(f1(0.0, 0.0), None);
    }
}
