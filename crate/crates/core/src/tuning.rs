//! Ridge parameter selection by generalized cross-validation.
//!
//! For one predictor with `L_Y = (1, K_Y)^T` and `L_r = (1, K_r)^T` the GCV
//! summand is
//!
//! ```text
//! |L_Y - L_Y H_r(eps)|_F^2 / (1 - tr H_r(eps) / n)^2,
//! H_r(eps) = L_r^T (L_r L_r^T + eps I_{n+1})^{-1} L_r.
//! ```
//!
//! With `L_r^T L_r = 11^T + K_r^2 = V diag(lambda) V^T` this is
//! `H_r = V diag(lambda / (lambda + eps)) V^T`, so after one eigendecomposition
//! per predictor every grid point costs `O(n)`:
//! the numerator is `sum_i (eps / (lambda_i + eps))^2 * |L_Y v_i|^2` and the
//! trace is `sum_i lambda_i / (lambda_i + eps)`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// `{1e-5, 1e-4, ..., 1e3}`.
pub const DEFAULT_GRID: [f64; 9] = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3];

/// Summands whose denominator is at or below this are skipped.
pub const DENOMINATOR_GUARD: f64 = 1e-12;

/// Default number of predictors entering the GCV sum.
pub const DEFAULT_SUBSAMPLE: usize = 200;

pub fn default_grid() -> Vec<f64> {
    DEFAULT_GRID.to_vec()
}

/// GCV criterion at one ridge value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GcvValue {
    pub value: f64,
    /// Summands dropped because their denominator vanished.
    pub skipped: usize,
}

#[derive(Debug, Clone)]
struct Term {
    lambda: DVector<f64>,
    response_weight: DVector<f64>,
}

impl Term {
    fn new(ky: &DMatrix<f64>, kx: &DMatrix<f64>) -> Result<Self> {
        let n = kx.nrows();
        let mut gram = kx * kx;
        gram.add_scalar_mut(1.0);
        let (mut lambda, v) = symmetric_eigen(&gram)?;
        lambda.apply(|l| *l = l.max(0.0));
        let kyv = ky * &v;
        let response_weight = DVector::from_fn(n, |i, _| {
            let ones = v.column(i).sum();
            ones * ones + kyv.column(i).norm_squared()
        });
        Ok(Self {
            lambda,
            response_weight,
        })
    }

    /// `(numerator, denominator)` of the summand.
    fn parts(&self, epsilon: f64) -> (f64, f64) {
        let n = self.lambda.len() as f64;
        let mut numerator = 0.0;
        let mut trace = 0.0;
        for (l, w) in self.lambda.iter().zip(self.response_weight.iter()) {
            let shrink = epsilon / (l + epsilon);
            numerator += shrink * shrink * w;
            trace += l / (l + epsilon);
        }
        let base = 1.0 - trace / n;
        (numerator, base * base)
    }
}

/// Spectral data for evaluating the GCV criterion at many ridge values.
#[derive(Debug, Clone)]
pub struct GcvProblem {
    n: usize,
    terms: Vec<Term>,
}

impl GcvProblem {
    pub fn new(ky: &DMatrix<f64>, kxs: &[DMatrix<f64>]) -> Result<Self> {
        Self::from_fn(ky, kxs.len(), |r| Ok(kxs[r].clone()))
    }

    /// Builds predictor kernels on demand so only a few are alive at once.
    pub fn from_fn<F>(ky: &DMatrix<f64>, count: usize, kernel: F) -> Result<Self>
    where
        F: Fn(usize) -> Result<DMatrix<f64>> + Sync,
    {
        let n = ky.nrows();
        if !ky.is_square() {
            return Err(Error::arg("response kernel matrix must be square"));
        }
        let terms = (0..count)
            .into_par_iter()
            .map(|r| {
                let kx = kernel(r)?;
                if kx.shape() != (n, n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: kx.nrows(),
                    });
                }
                Term::new(ky, &kx)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn predictors(&self) -> usize {
        self.terms.len()
    }

    pub fn evaluate(&self, epsilon: f64) -> Result<GcvValue> {
        check_epsilon(epsilon)?;
        let mut value = 0.0;
        let mut skipped = 0;
        for term in &self.terms {
            let (num, den) = term.parts(epsilon);
            if den <= DENOMINATOR_GUARD {
                skipped += 1;
            } else {
                value += num / den;
            }
        }
        if skipped > 0 {
            log::warn!("GCV at epsilon = {epsilon:e}: skipped {skipped} summands with vanishing denominator");
        }
        Ok(GcvValue { value, skipped })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )))
    }
}

/// The GCV criterion summed over all given predictor kernels.
pub fn gcv_value(epsilon: f64, ky: &DMatrix<f64>, kxs: &[DMatrix<f64>]) -> Result<GcvValue> {
    check_epsilon(epsilon)?;
    GcvProblem::new(ky, kxs)?.evaluate(epsilon)
}

/// Outcome of the grid search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RidgeSelection {
    pub epsilon: f64,
    /// Sorted ascending, duplicates removed.
    pub grid: Vec<f64>,
    pub gcv_values: Vec<f64>,
    pub skipped: Vec<usize>,
}

fn normalize_grid(grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::arg("epsilon grid is empty"));
    }
    for &g in grid {
        check_epsilon(g)?;
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    Ok(sorted)
}

/// Grid search over a prebuilt problem.
///
/// Grid points with any skipped summand are not eligible. Ties go to the
/// larger epsilon.
pub fn select_epsilon_in(problem: &GcvProblem, grid: &[f64]) -> Result<RidgeSelection> {
    let grid = normalize_grid(grid)?;
    let evaluated = grid
        .iter()
        .map(|&e| problem.evaluate(e))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in evaluated.iter().enumerate() {
        if v.skipped > 0 || !v.value.is_finite() {
            continue;
        }
        if best.is_none_or(|(_, b)| v.value <= b) {
            best = Some((i, v.value));
        }
    }
    let (idx, _) = best
        .ok_or_else(|| Error::Tuning("every grid point had a degenerate GCV denominator".into()))?;
    Ok(RidgeSelection {
        epsilon: grid[idx],
        gcv_values: evaluated.iter().map(|v| v.value).collect(),
        skipped: evaluated.iter().map(|v| v.skipped).collect(),
        grid,
    })
}

/// Minimizes the GCV criterion over `grid`.
pub fn select_epsilon(
    ky: &DMatrix<f64>,
    kxs: &[DMatrix<f64>],
    grid: &[f64],
) -> Result<RidgeSelection> {
    normalize_grid(grid)?;
    select_epsilon_in(&GcvProblem::new(ky, kxs)?, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{bandwidth, gram};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kernels(n: usize, p: usize, seed: u64) -> (DMatrix<f64>, Vec<DMatrix<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::<f64>::from_fn(n, p, |_, _| rng.random_range(-2.0..2.0));
        let y = DMatrix::from_fn(n, 1, |i, _| {
            x[(i, 0)].sin() + 0.3 * rng.random_range(-1.0..1.0)
        });
        let k = |m: nalgebra::DMatrixView<'_, f64>| gram(m, bandwidth(m).unwrap());
        let kxs = (0..p).map(|r| k(x.columns(r, 1))).collect();
        (k(y.as_view()), kxs)
    }

    #[test]
    fn default_grid_has_nine_points() {
        assert_eq!(DEFAULT_GRID.len(), 9);
        assert_eq!(DEFAULT_GRID[0], 1e-5);
        assert_eq!(DEFAULT_GRID[8], 1e3);
        for w in DEFAULT_GRID.windows(2) {
            assert!((w[1] / w[0] - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn large_epsilon_limit() {
        let (ky, kxs) = kernels(8, 3, 1);
        let v = gcv_value(1e12, &ky, &kxs).unwrap();
        // |L_Y|_F^2 = n + |K_Y|_F^2
        let ly = 8.0 + ky.norm_squared();
        assert!((v.value - 3.0 * ly).abs() <= 1e-4 * 3.0 * ly);
        assert_eq!(v.skipped, 0);
    }

    #[test]
    fn rejects_bad_epsilon_and_grid() {
        let (ky, kxs) = kernels(6, 2, 2);
        assert!(gcv_value(0.0, &ky, &kxs).is_err());
        assert!(gcv_value(-1.0, &ky, &kxs).is_err());
        assert!(select_epsilon(&ky, &kxs, &[]).is_err());
        assert!(select_epsilon(&ky, &kxs, &[1.0, -2.0]).is_err());
        let wrong = vec![DMatrix::identity(5, 5)];
        assert!(matches!(
            gcv_value(1.0, &ky, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn selection_is_grid_member_and_order_free() {
        let (ky, kxs) = kernels(15, 4, 3);
        let sel = select_epsilon(&ky, &kxs, &DEFAULT_GRID).unwrap();
        assert!(DEFAULT_GRID.contains(&sel.epsilon));
        let mut shuffled = DEFAULT_GRID.to_vec();
        shuffled.reverse();
        shuffled.swap(1, 5);
        let again = select_epsilon(&ky, &kxs, &shuffled).unwrap();
        assert_eq!(sel, again);
        assert_eq!(sel.gcv_values.len(), 9);
        assert!(sel.skipped.iter().all(|&s| s == 0));
    }

    #[test]
    fn ties_go_to_larger_epsilon() {
        // no predictors: GCV is identically zero on the whole grid
        let (ky, _) = kernels(6, 1, 4);
        let sel = select_epsilon(&ky, &[], &[0.1, 1.0, 10.0]).unwrap();
        assert_eq!(sel.epsilon, 10.0);
    }

    #[test]
    fn deterministic() {
        let (ky, kxs) = kernels(10, 3, 5);
        let a = gcv_value(0.01, &ky, &kxs).unwrap();
        let b = gcv_value(0.01, &ky, &kxs).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
