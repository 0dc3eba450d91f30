use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cohen's kappa over paired labels. Returns 1 when both coders used a single
/// identical label throughout, where the usual ratio is 0/0.
pub fn cohen_kappa<L: Ord>(pairs: &[(L, L)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::data("kappa needs at least one labelled pair"));
    }
    let n = pairs.len() as f64;
    let mut a: BTreeMap<&L, usize> = BTreeMap::new();
    let mut b: BTreeMap<&L, usize> = BTreeMap::new();
    let mut agree = 0usize;
    for (x, y) in pairs {
        *a.entry(x).or_default() += 1;
        *b.entry(y).or_default() += 1;
        agree += usize::from(x == y);
    }
    let p_o = agree as f64 / n;
    let chance: usize = a.iter().map(|(k, ca)| ca * b.get(k).copied().unwrap_or(0)).sum();
    let p_e = chance as f64 / (n * n);
    if chance == pairs.len() * pairs.len() {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Share of pairs with identical labels.
pub fn label_accuracy<L: PartialEq>(pairs: &[(L, L)]) -> Option<f64> {
    (!pairs.is_empty()).then(|| pairs.iter().filter(|(x, y)| x == y).count() as f64 / pairs.len() as f64)
}
