//! Deterministic train/val/test splitting.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::AnnotError;

/// Disjoint id lists whose union is the split input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

/// Splits counts by the largest-remainder method so the three sizes
/// always sum to `n`. Remainder ties go to the earlier bucket.
fn apportion(n: usize, ratios: (f64, f64, f64)) -> [usize; 3] {
    let r = [ratios.0, ratios.1, ratios.2];
    let sum: f64 = r.iter().sum();
    let quotas = r.map(|x| n as f64 * x / sum);
    let mut counts = quotas.map(|q| q.floor() as usize);
    let assigned: usize = counts.iter().sum();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &bucket in order.iter().take(n - assigned) {
        counts[bucket] += 1;
    }
    counts
}

/// Shuffles `ids` with a seeded RNG and cuts the result into
/// train/val/test by largest-remainder apportionment of `ratios`.
/// The same seed yields the same split on every platform. Ratios must
/// be finite and non-negative with a positive sum.
pub fn split_dataset(
    ids: &[String],
    ratios: (f64, f64, f64),
    seed: u64,
) -> Result<DatasetSplit, AnnotError> {
    let parts = [ratios.0, ratios.1, ratios.2];
    if parts.iter().any(|r| !r.is_finite() || *r < 0.0)
        || parts.iter().sum::<f64>() <= 0.0
    {
        return Err(AnnotError::BadRatios(ratios.0, ratios.1, ratios.2));
    }
    let mut shuffled = ids.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let [n_train, n_val, _] = apportion(ids.len(), ratios);
    let test = shuffled.split_off(n_train + n_val);
    let val = shuffled.split_off(n_train);
    Ok(DatasetSplit {
        train: shuffled,
        val,
        test,
    })
}
