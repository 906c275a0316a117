//! Pearson and Spearman correlation with t-distribution p-values.

use super::special::t_cdf_two_sided;
use super::StatsError;

fn validate(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewSamples(x.len()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFiniteSample);
    }
    Ok(())
}

/// Pearson correlation coefficient and its two-sided p-value from the
/// exact t-distribution with `n - 2` degrees of freedom. Requires at
/// least three finite samples and non-zero variance on both axes.
/// `|r| = 1` maps to `p = 0`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64), StatsError> {
    validate(x, y)?;
    let n = x.len();
    let mean_x = x.iter().sum::<f64>() / n as f64;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance { axis: "x" });
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance { axis: "y" });
    }
    // Exactly collinear data (zero least-squares residual in either
    // direction) is reported as r = ±1 with p = 0; near-collinear
    // data keeps its honestly tiny p-value. Rounding in the sums can
    // otherwise leave r at 1 - ulp for data that is perfectly linear.
    let beta_yx = sxy / sxx;
    let beta_xy = sxy / syy;
    let mut rss_y = 0.0;
    let mut rss_x = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        let ry = dy - beta_yx * dx;
        let rx = dx - beta_xy * dy;
        rss_y += ry * ry;
        rss_x += rx * rx;
    }
    if rss_y == 0.0 || rss_x == 0.0 {
        return Ok((sxy.signum(), 0.0));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let one_minus_r2 = 1.0 - r * r;
    let p = if one_minus_r2 <= 0.0 {
        0.0
    } else {
        let t = r * ((n - 2) as f64 / one_minus_r2).sqrt();
        t_cdf_two_sided(t, (n - 2) as u64)?
    };
    Ok((r, p))
}

/// Fractional ranks (1-based); tied values share the average of the
/// positions they occupy.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: exactly the Pearson correlation of the two rank
/// vectors (average ranks for ties), including its p-value.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64), StatsError> {
    validate(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}
