//! Seeded k-means over 3-d points (colour channels as f64).
//!
//! Lloyd iterations with k-means++ seeding, restarted `restarts` times
//! from one RNG stream; the run with the lowest inertia wins. Ties in
//! the assignment step go to the lowest cluster index, and clusters
//! emptied by a reassignment are reseeded onto the point farthest from
//! its current centroid. The whole procedure is deterministic for a
//! given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ColourError;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansParams {
    pub k: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl Default for KMeansParams {
    fn default() -> Self {
        Self {
            k: 5,
            seed: 0,
            tol: 1e-4,
            max_iter: 100,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// One centroid per cluster, including clusters that ended up
    /// empty (their centroid is wherever seeding left it).
    pub centroids: Vec<[f64; 3]>,
    /// Cluster index per input point.
    pub assignment: Vec<usize>,
    /// Sum of squared distances from each point to its assigned
    /// centroid, consistent with `centroids` and `assignment`.
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after each Lloyd iteration; non-increasing.
    pub inertia_history: Vec<f64>,
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Index of the closest centroid; equal distances resolve to the
/// lowest index.
pub(crate) fn nearest(point: &[f64; 3], centroids: &[[f64; 3]]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = dist2(point, &centroids[0]);
    for (i, c) in centroids.iter().enumerate().skip(1) {
        let d = dist2(point, c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    (best, best_d)
}

/// k-means++ seeding: the first centroid is uniform, each further one
/// is drawn with probability proportional to the squared distance to
/// the nearest centroid so far. When every point already coincides
/// with a centroid the draw falls back to uniform.
fn seed_centroids(points: &[[f64; 3]], k: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let n = points.len();
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..n)]);
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let chosen = if total > 0.0 {
            let mut threshold = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if threshold < d {
                    pick = i;
                    break;
                }
                threshold -= d;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centroids.push(points[chosen]);
        let newest = centroids[centroids.len() - 1];
        for (i, p) in points.iter().enumerate() {
            let d = dist2(p, &newest);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centroids
}

fn lloyd(
    points: &[[f64; 3]],
    k: usize,
    tol: f64,
    max_iter: usize,
    rng: &mut ChaCha8Rng,
) -> KMeansResult {
    let n = points.len();
    let mut centroids = seed_centroids(points, k, rng);
    let mut assignment = vec![0usize; n];
    let mut inertia_history = Vec::new();
    let mut iterations = 0;

    loop {
        iterations += 1;
        for (i, p) in points.iter().enumerate() {
            assignment[i] = nearest(p, &centroids).0;
        }

        // Reseed empty clusters onto the points farthest from their
        // centroids; capped at k rounds to guarantee termination.
        for _ in 0..k {
            let mut counts = vec![0usize; k];
            for &a in &assignment {
                counts[a] += 1;
            }
            let empties: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
            if empties.is_empty() {
                break;
            }
            let mut moved = false;
            for &c in &empties {
                let far = (0..n)
                    .filter(|&i| counts[assignment[i]] > 1)
                    .max_by(|&a, &b| {
                        dist2(&points[a], &centroids[assignment[a]])
                            .total_cmp(&dist2(&points[b], &centroids[assignment[b]]))
                    });
                let Some(far) = far else { break };
                if dist2(&points[far], &centroids[assignment[far]]) == 0.0 {
                    break;
                }
                centroids[c] = points[far];
                counts[assignment[far]] -= 1;
                assignment[far] = c;
                counts[c] = 1;
                moved = true;
            }
            if !moved {
                break;
            }
            for (i, p) in points.iter().enumerate() {
                assignment[i] = nearest(p, &centroids).0;
            }
        }

        let mut sums = vec![[0.0f64; 3]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            let c = assignment[i];
            counts[c] += 1;
            sums[c][0] += p[0];
            sums[c][1] += p[1];
            sums[c][2] += p[2];
        }
        let mut displacement: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let mean = sums[c].map(|s| s / counts[c] as f64);
            displacement = displacement.max(dist2(&mean, &centroids[c]).sqrt());
            centroids[c] = mean;
        }
        let inertia: f64 = points
            .iter()
            .zip(&assignment)
            .map(|(p, &a)| dist2(p, &centroids[a]))
            .sum();
        inertia_history.push(inertia);

        if displacement < tol || iterations >= max_iter {
            break;
        }
    }

    let inertia = *inertia_history.last().expect("at least one iteration ran");
    KMeansResult {
        centroids,
        assignment,
        inertia,
        iterations,
        inertia_history,
    }
}

/// Runs restarted Lloyd k-means and returns the lowest-inertia run.
/// Identical inputs and parameters give bit-identical results.
pub fn kmeans(points: &[[f64; 3]], params: &KMeansParams) -> Result<KMeansResult, ColourError> {
    if params.k == 0 {
        return Err(ColourError::ZeroK);
    }
    if params.restarts == 0 {
        return Err(ColourError::ZeroRestarts);
    }
    if params.max_iter == 0 {
        return Err(ColourError::ZeroMaxIter);
    }
    if !params.tol.is_finite() || params.tol < 0.0 {
        return Err(ColourError::BadTolerance(params.tol));
    }
    if points.is_empty() {
        return Err(ColourError::EmptyPoints);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<KMeansResult> = None;
    for _ in 0..params.restarts {
        let run = lloyd(points, params.k, params.tol, params.max_iter, &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("restarts >= 1"))
}
