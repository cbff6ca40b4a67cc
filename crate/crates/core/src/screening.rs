//! Score every predictor against the response, rank, and keep the top `m`.
//!
//! For KCCA the steps are: bandwidths for every predictor and the response,
//! ridge parameter by GCV (unless fixed), centered Grams and their
//! eigendecompositions, per-predictor scores, then ranking. The response Gram
//! is decomposed once and shared by all predictors.

use nalgebra::DMatrixView;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::kernel::{bandwidth_or_unit, center, gram, CenteredGram, DEFAULT_TOL_REL};
use crate::measures::{self, DependenceScore, Method};
use crate::tuning::{self, GcvProblem, RidgeSelection};

/// Smallest sample size accepted by [`screen`].
pub const MIN_SAMPLES: usize = 4;

/// How many predictors to keep.
///
/// The theoretical cutoff on the score itself involves unknown constants, so
/// selection is always a top-`m` rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ThresholdRule {
    /// Keep exactly `m` (capped at p).
    FixedM(usize),
    /// `m = ceil(1.5 * eps^{-3/2} * n^{1/4})`, needs the KCCA ridge parameter.
    Auto,
    /// Keep the top `ceil(fraction * p)`.
    Fraction(f64),
}

impl ThresholdRule {
    /// Resolves to a model size in `1..=p`.
    pub fn model_size(&self, n: usize, p: usize, epsilon: Option<f64>) -> Result<usize> {
        match *self {
            ThresholdRule::FixedM(0) => Err(Error::arg("model size m must be at least 1")),
            ThresholdRule::FixedM(m) => Ok(m.min(p)),
            ThresholdRule::Auto => {
                let eps = epsilon.ok_or_else(|| {
                    Error::arg("the automatic threshold needs a ridge parameter; use it with the kcca method")
                })?;
                Ok(auto_threshold(eps, n, p))
            }
            ThresholdRule::Fraction(f) if f > 0.0 && f <= 1.0 => {
                Ok(((f * p as f64).ceil() as usize).clamp(1, p.max(1)))
            }
            ThresholdRule::Fraction(f) => {
                Err(Error::arg(format!("fraction must lie in (0, 1], got {f}")))
            }
        }
    }
}

/// `min(p, max(1, ceil(1.5 * eps^{-3/2} * n^{1/4})))`.
pub fn auto_threshold(epsilon: f64, n: usize, p: usize) -> usize {
    let quarter = (n as f64).sqrt().sqrt();
    let raw = (1.5 * quarter / (epsilon * epsilon.sqrt())).ceil();
    if raw.is_nan() || raw >= p as f64 {
        p.max(1)
    } else {
        (raw as usize).max(1)
    }
}

/// Predictor indices sorted by descending score, ties by ascending index.
pub fn rank_by_score(scores: &[f64]) -> Result<Vec<usize>> {
    if scores.is_empty() {
        return Err(Error::arg("no scores to rank"));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::Data(format!("score of predictor {} is NaN", i + 1)));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    Ok(order)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonMode {
    /// GCV grid search.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenConfig {
    pub method: Method,
    pub rule: ThresholdRule,
    pub epsilon: EpsilonMode,
    /// Seeds the GCV predictor subsample.
    pub seed: u64,
    pub grid: Vec<f64>,
    /// Number of predictors in the GCV sum; `None` uses all of them.
    pub gcv_subsample: Option<usize>,
    pub tol_rel: f64,
}

impl ScreenConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            rule: ThresholdRule::Fraction(0.01),
            epsilon: EpsilonMode::Auto,
            seed: 0,
            grid: tuning::default_grid(),
            gcv_subsample: Some(tuning::DEFAULT_SUBSAMPLE),
            tol_rel: DEFAULT_TOL_REL,
        }
    }

    pub fn with_rule(mut self, rule: ThresholdRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_epsilon(mut self, epsilon: EpsilonMode) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Scores, ranking and selected set for one screening run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningResult {
    pub method: Method,
    pub scores: Vec<DependenceScore>,
    /// 0-based predictor indices, best first.
    pub ranking: Vec<usize>,
    /// First `m` entries of `ranking`.
    pub selected: Vec<usize>,
    pub m: usize,
    pub epsilon: Option<f64>,
    pub tuning: Option<RidgeSelection>,
    /// Response bandwidth for the kernel methods.
    pub response_gamma: Option<f64>,
}

impl ScreeningResult {
    pub fn score_values(&self) -> Vec<f64> {
        self.scores.iter().map(|s| s.value).collect()
    }
}

/// Indices of the predictors that enter the GCV sum.
pub fn gcv_predictors(p: usize, subsample: Option<usize>, seed: u64) -> Vec<usize> {
    match subsample {
        Some(k) if k < p => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = rand::seq::index::sample(&mut rng, p, k.max(1)).into_vec();
            idx.sort_unstable();
            idx
        }
        _ => (0..p).collect(),
    }
}

fn predictor_kernel(x: &DataMatrix, r: usize) -> Result<nalgebra::DMatrix<f64>> {
    let samples = x.column_samples(r);
    Ok(gram(samples, bandwidth_or_unit(samples)?))
}

/// Runs the full screening procedure for one method.
pub fn screen(x: &DataMatrix, y: &DataMatrix, config: &ScreenConfig) -> Result<ScreeningResult> {
    let (n, p) = (x.n(), x.p());
    if y.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.n(),
        });
    }
    if n < MIN_SAMPLES {
        return Err(Error::SampleSize {
            n,
            min: MIN_SAMPLES,
        });
    }
    if p == 0 || y.p() == 0 {
        return Err(Error::arg(
            "need at least one predictor and one response column",
        ));
    }
    if config.method == Method::Sis && y.p() != 1 {
        return Err(Error::UnsupportedMethod {
            method: Method::Sis.label().into(),
            reason: format!(
                "the response has {} columns; Pearson screening needs a scalar response",
                y.p()
            ),
        });
    }
    if y.is_constant() {
        return Err(Error::DegenerateResponse);
    }
    if let EpsilonMode::Fixed(e) = config.epsilon {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::arg(format!("epsilon must be positive, got {e}")));
        }
    }
    // fail fast on a bad rule before the expensive part
    if !matches!(config.rule, ThresholdRule::Auto) {
        config.rule.model_size(n, p, None)?;
    } else if config.method != Method::Kcca {
        return Err(Error::arg(
            "the automatic threshold needs a ridge parameter; use it with the kcca method",
        ));
    }

    let y_samples: DMatrixView<'_, f64> = y.samples();
    let mut epsilon = None;
    let mut tuning_result = None;
    let mut response_gamma = None;

    let scores: Vec<DependenceScore> = match config.method {
        Method::Sis => (0..p)
            .into_par_iter()
            .map(|r| measures::pearson_score(x.column(r), y.column(0)))
            .collect::<Result<_>>()?,
        Method::Dc => (0..p)
            .into_par_iter()
            .map(|r| measures::dcor_score(x.column_samples(r), y_samples))
            .collect::<Result<_>>()?,
        Method::Hsic => {
            let bw_y = bandwidth_or_unit(y_samples)?;
            response_gamma = Some(bw_y.gamma());
            let gy = center(&gram(y_samples, bw_y));
            (0..p)
                .into_par_iter()
                .map(|r| {
                    let gx = center(&predictor_kernel(x, r)?);
                    Ok(DependenceScore {
                        value: measures::hsic_centered(&gx, &gy)?,
                        method: Method::Hsic,
                        epsilon: None,
                    })
                })
                .collect::<Result<_>>()?
        }
        Method::Kcca => {
            let bw_y = bandwidth_or_unit(y_samples)?;
            response_gamma = Some(bw_y.gamma());
            let ky = gram(y_samples, bw_y);
            let gy = CenteredGram::from_kernel(&ky, config.tol_rel)?;
            if gy.rank() == 0 {
                return Err(Error::DegenerateResponse);
            }
            let eps = match config.epsilon {
                EpsilonMode::Fixed(e) => e,
                EpsilonMode::Auto => {
                    let chosen = gcv_predictors(p, config.gcv_subsample, config.seed);
                    let problem =
                        GcvProblem::from_fn(&ky, chosen.len(), |i| predictor_kernel(x, chosen[i]))?;
                    let selection = tuning::select_epsilon_in(&problem, &config.grid)?;
                    let e = selection.epsilon;
                    tuning_result = Some(selection);
                    e
                }
            };
            epsilon = Some(eps);
            (0..p)
                .into_par_iter()
                .map(|r| {
                    let gx = CenteredGram::from_kernel(&predictor_kernel(x, r)?, config.tol_rel)?;
                    measures::kcca_score(&gx, &gy, eps)
                })
                .collect::<Result<_>>()?
        }
    };

    let values: Vec<f64> = scores.iter().map(|s| s.value).collect();
    let ranking = rank_by_score(&values)?;
    let m = config.rule.model_size(n, p, epsilon)?;
    let selected = ranking[..m].to_vec();
    Ok(ScreeningResult {
        method: config.method,
        scores,
        ranking,
        selected,
        m,
        epsilon,
        tuning: tuning_result,
        response_gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn auto_threshold_examples() {
        assert_eq!(auto_threshold(1.0, 16, 100), 3);
        assert_eq!(auto_threshold(0.01, 16, 100), 100);
        assert_eq!(auto_threshold(1e3, 200, 2000), 1);
        assert_eq!(auto_threshold(1e-5, 200, 7), 7);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_by_score(&[0.2, 0.9, 0.5]).unwrap(), vec![1, 2, 0]);
        assert_eq!(rank_by_score(&[0.3; 5]).unwrap(), vec![0, 1, 2, 3, 4]);
        assert!(matches!(
            rank_by_score(&[0.1, f64::NAN]),
            Err(Error::Data(_))
        ));
        assert!(rank_by_score(&[]).is_err());
    }

    #[test]
    fn threshold_rules() {
        assert_eq!(ThresholdRule::FixedM(5).model_size(10, 3, None).unwrap(), 3);
        assert!(ThresholdRule::FixedM(0).model_size(10, 3, None).is_err());
        assert!(ThresholdRule::Auto.model_size(10, 3, None).is_err());
        assert_eq!(
            ThresholdRule::Auto.model_size(16, 100, Some(1.0)).unwrap(),
            3
        );
        assert_eq!(
            ThresholdRule::Fraction(0.01)
                .model_size(130, 17568, None)
                .unwrap(),
            176
        );
        assert_eq!(
            ThresholdRule::Fraction(0.01)
                .model_size(10, 20, None)
                .unwrap(),
            1
        );
        assert!(ThresholdRule::Fraction(0.0)
            .model_size(10, 20, None)
            .is_err());
        assert!(ThresholdRule::Fraction(1.5)
            .model_size(10, 20, None)
            .is_err());
    }

    #[test]
    fn gcv_subsample_is_sorted_and_seeded() {
        assert_eq!(gcv_predictors(5, Some(200), 1), vec![0, 1, 2, 3, 4]);
        assert_eq!(gcv_predictors(5, None, 1), vec![0, 1, 2, 3, 4]);
        let a = gcv_predictors(1000, Some(50), 9);
        assert_eq!(a.len(), 50);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(a, gcv_predictors(1000, Some(50), 9));
        assert_ne!(a, gcv_predictors(1000, Some(50), 10));
    }

    proptest! {
        #[test]
        fn ranking_is_sorted_permutation(scores in prop::collection::vec(0f64..1.0, 1..1000)) {
            let order = rank_by_score(&scores).unwrap();
            let mut seen = vec![false; scores.len()];
            for &i in &order {
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
            for w in order.windows(2) {
                prop_assert!(scores[w[0]] > scores[w[1]] || (scores[w[0]] == scores[w[1]] && w[0] < w[1]));
            }
        }

        #[test]
        fn ranking_invariant_under_monotone_maps(raw in prop::collection::vec(0u32..10_000, 1..200)) {
            let scores: Vec<f64> = raw.iter().map(|&k| k as f64 / 1e4).collect();
            let base = rank_by_score(&scores).unwrap();
            let mapped: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
            prop_assert_eq!(&base, &rank_by_score(&mapped).unwrap());
            let cubed: Vec<f64> = scores.iter().map(|s| s * s * s).collect();
            prop_assert_eq!(&base, &rank_by_score(&cubed).unwrap());
        }

        #[test]
        fn auto_threshold_bounds(eps_pow in -5i32..=3, n in 1usize..5000, p in 1usize..5000) {
            let m = auto_threshold(10f64.powi(eps_pow), n, p);
            prop_assert!(m >= 1 && m <= p);
        }
    }
}
