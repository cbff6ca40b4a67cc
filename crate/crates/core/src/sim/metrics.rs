//! Minimum model size, coverage proportions and quantiles.

use crate::error::{Error, Result};

/// Smallest `k` such that the top-`k` of `ranking` contains every active
/// predictor, i.e. the worst rank position (1-based) among the active ones.
pub fn min_model_size(ranking: &[usize], active: &[usize]) -> Result<usize> {
    if active.is_empty() {
        return Err(Error::arg("active set is empty"));
    }
    let p = ranking.len();
    let mut position = vec![usize::MAX; p];
    for (k, &r) in ranking.iter().enumerate() {
        if r >= p || position[r] != usize::MAX {
            return Err(Error::arg("ranking is not a permutation"));
        }
        position[r] = k + 1;
    }
    active
        .iter()
        .map(|&a| {
            position.get(a).copied().ok_or_else(|| {
                Error::arg(format!("active predictor {a} is out of range for p = {p}"))
            })
        })
        .try_fold(0, |acc, pos| pos.map(|v| acc.max(v)))
}

/// Fraction of replications whose minimum model size is at most `d`.
pub fn coverage_proportion(sizes: &[usize], d: usize) -> f64 {
    if sizes.is_empty() {
        return f64::NAN;
    }
    sizes.iter().filter(|&&s| s <= d).count() as f64 / sizes.len() as f64
}

/// Linear-interpolation quantile between order statistics (R's type 7).
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
