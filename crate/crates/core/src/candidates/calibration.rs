use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Non-candidates sent for calibration, as a fraction of the candidate count.
pub const CALIBRATION_FRACTION: f64 = 0.25;

/// `ceil(fraction * n_candidates)`, capped at the available population.
pub fn calibration_size(n_candidates: usize, population: usize, fraction: f64) -> usize {
    let wanted = ((n_candidates as f64) * fraction - 1e-9).ceil().max(0.0) as usize;
    wanted.min(population)
}

/// Uniform sample without replacement of non-candidate keys.
///
/// Keys are sorted before sampling so the result depends only on the key set
/// and the seed, never on input order.
pub fn calibration_sample<I>(non_candidates: I, n_candidates: usize, fraction: f64, seed: u64) -> BTreeSet<(String, u32)>
where
    I: IntoIterator<Item = (String, u32)>,
{
    let pool: Vec<(String, u32)> = non_candidates.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    draw(&pool, calibration_size(n_candidates, pool.len(), fraction), &mut rng)
}

/// Per-source variant: each source contributes `ceil(fraction * its candidates)`
/// of its own non-candidates. Sources are visited in sorted order with one RNG.
pub fn calibration_sample_per_source<I>(
    non_candidates: I,
    candidates_per_source: &BTreeMap<String, usize>,
    fraction: f64,
    seed: u64,
) -> BTreeSet<(String, u32)>
where
    I: IntoIterator<Item = (String, (String, u32))>,
{
    let mut pools: BTreeMap<String, BTreeSet<(String, u32)>> = BTreeMap::new();
    for (source, key) in non_candidates {
        pools.entry(source).or_default().insert(key);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeSet::new();
    for (source, pool) in pools {
        let pool: Vec<_> = pool.into_iter().collect();
        let n = candidates_per_source.get(&source).copied().unwrap_or(0);
        out.extend(draw(&pool, calibration_size(n, pool.len(), fraction), &mut rng));
    }
    out
}

fn draw(pool: &[(String, u32)], amount: usize, rng: &mut ChaCha8Rng) -> BTreeSet<(String, u32)> {
    index::sample(rng, pool.len(), amount)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}
