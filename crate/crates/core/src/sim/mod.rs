//! Monte Carlo benchmark harness.
//!
//! Every replication draws fresh predictors and a fresh response, screens
//! them with each requested method on identical data, and records the minimum
//! model size needed to cover the active set.

mod generators;
mod metrics;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

pub use generators::{
    ar_gaussian, ar_gaussian_with, coefficient_floor, draw_coefficient, gen_sim1, gen_sim2,
    ModelInstance, ReplicationSeeds, StreamSeed, SIM1_ACTIVE, SIM1_CONSTANTS,
};
pub use metrics::{coverage_proportion, min_model_size, quantile};

use crate::error::{Error, Result};
use crate::measures::Method;
use crate::screening::{screen, ScreenConfig, ScreeningResult, ThresholdRule};

/// Default AR(1) correlation of neighbouring predictors.
pub const DEFAULT_AR_RHO: f64 = 0.8;

/// Quantile levels reported for the minimum model size.
pub const QUANTILES: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Scalar response, models 1–4.
    Sim1,
    /// Bivariate response with predictor-dependent correlation, models 1–2.
    Sim2,
}

impl Suite {
    pub fn models(self) -> std::ops::RangeInclusive<u8> {
        match self {
            Suite::Sim1 => 1..=4,
            Suite::Sim2 => 1..=2,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Sim1 => "sim1",
            Suite::Sim2 => "sim2",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sim1" | "1" => Ok(Suite::Sim1),
            "sim2" | "2" => Ok(Suite::Sim2),
            other => Err(Error::arg(format!(
                "unknown suite {other:?} (expected sim1 or sim2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSpec {
    pub suite: Suite,
    pub model: u8,
    pub n: usize,
    pub p: usize,
    pub reps: usize,
    pub seed: u64,
    pub ar_rho: f64,
}

impl SimulationSpec {
    pub fn new(suite: Suite, model: u8, n: usize, p: usize, reps: usize, seed: u64) -> Self {
        Self {
            suite,
            model,
            n,
            p,
            reps,
            seed,
            ar_rho: DEFAULT_AR_RHO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.suite.models().contains(&self.model) {
            return Err(Error::arg(format!(
                "{} has no model {}",
                self.suite, self.model
            )));
        }
        if self.reps == 0 {
            return Err(Error::arg("need at least one replication"));
        }
        if self.n < crate::screening::MIN_SAMPLES {
            return Err(Error::SampleSize {
                n: self.n,
                min: crate::screening::MIN_SAMPLES,
            });
        }
        let min_p = match self.suite {
            Suite::Sim1 => 22,
            Suite::Sim2 => 4,
        };
        if self.p < min_p {
            return Err(Error::arg(format!(
                "{} needs p >= {min_p}, got {}",
                self.suite, self.p
            )));
        }
        if self.ar_rho.is_nan() || self.ar_rho.abs() >= 1.0 {
            return Err(Error::arg(format!(
                "AR coefficient must satisfy |rho| < 1, got {}",
                self.ar_rho
            )));
        }
        Ok(())
    }

    /// `(d1, 2 d1, 3 d1)`; `d1 = floor(n / ln n)` for sim1 and the size of the
    /// active set for sim2.
    pub fn default_d_values(&self) -> [usize; 3] {
        let d1 = match (self.suite, self.model) {
            (Suite::Sim1, _) => (self.n as f64 / (self.n as f64).ln()).floor() as usize,
            (Suite::Sim2, 1) => 2,
            (Suite::Sim2, _) => 4,
        };
        [d1, 2 * d1, 3 * d1]
    }

    /// Draws the data of one replication.
    pub fn instance(&self, replication: usize) -> Result<ModelInstance> {
        let seeds = ReplicationSeeds::new(self.seed, replication);
        let x = ar_gaussian_with(self.n, self.p, self.ar_rho, &mut seeds.x.rng())?;
        let (mut beta, mut noise) = (seeds.beta.rng(), seeds.noise.rng());
        match self.suite {
            Suite::Sim1 => gen_sim1(x, self.model, &mut beta, &mut noise),
            Suite::Sim2 => gen_sim2(x, self.model, &mut beta, &mut noise),
        }
    }
}

/// Per-method summary over all replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodMetrics {
    pub method: Method,
    /// 25%, 50% and 75% quantiles of the minimum model size.
    pub s_quantiles: [f64; 3],
    /// Coverage proportions at d1, d2, d3.
    pub p_proportions: [f64; 3],
    pub min_model_sizes: Vec<usize>,
    /// Ridge parameter chosen in each replication (KCCA only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
}

impl MethodMetrics {
    fn from_runs(
        method: Method,
        sizes: Vec<usize>,
        epsilons: Option<Vec<f64>>,
        d: [usize; 3],
    ) -> Self {
        let as_f64: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
        Self {
            method,
            s_quantiles: QUANTILES.map(|q| quantile(&as_f64, q)),
            p_proportions: d.map(|dk| coverage_proportion(&sizes, dk)),
            min_model_sizes: sizes,
            epsilons,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub suite: Suite,
    pub model: u8,
    pub n: usize,
    pub p: usize,
    pub reps: usize,
    pub seed: u64,
    pub ar_rho: f64,
    pub d_values: [usize; 3],
    /// 0-based indices of the true active predictors.
    pub active: Vec<usize>,
    pub methods: Vec<MethodMetrics>,
}

impl MetricsReport {
    pub fn method(&self, method: Method) -> Option<&MethodMetrics> {
        self.methods.iter().find(|m| m.method == method)
    }

    /// Plain-text rendering laid out like the published tables.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} model {}  (n = {}, p = {}, reps = {}, d = {:?})",
            self.suite, self.model, self.n, self.p, self.reps, self.d_values
        );
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>9} {:>9} | {:>7} {:>7} {:>7}",
            "method", "S 25%", "S 50%", "S 75%", "P d1", "P d2", "P d3"
        );
        for m in &self.methods {
            let [a, b, c] = m.s_quantiles;
            let [p1, p2, p3] = m.p_proportions;
            let _ = writeln!(
                out,
                "{:<10} {a:>9.1} {b:>9.1} {c:>9.1} | {p1:>7.3} {p2:>7.3} {p3:>7.3}",
                m.method.label()
            );
        }
        out
    }
}

/// Screens one replication with every method.
pub fn run_replication(
    spec: &SimulationSpec,
    replication: usize,
    methods: &[Method],
) -> Result<(ModelInstance, Vec<ScreeningResult>)> {
    let inst = spec.instance(replication)?;
    let seeds = ReplicationSeeds::new(spec.seed, replication);
    let keep = spec.default_d_values()[2].min(spec.p);
    let results = methods
        .iter()
        .map(|&method| {
            let config = ScreenConfig::new(method)
                .with_rule(ThresholdRule::FixedM(keep))
                .with_seed(seeds.screen);
            screen(&inst.x, &inst.y, &config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((inst, results))
}

/// Runs all replications and summarizes them per method.
///
/// `d_values` overrides the default model sizes for the coverage proportions.
pub fn run_suite(
    spec: &SimulationSpec,
    methods: &[Method],
    d_values: Option<[usize; 3]>,
) -> Result<MetricsReport> {
    spec.validate()?;
    if methods.is_empty() {
        return Err(Error::arg("no screening methods requested"));
    }
    if spec.suite == Suite::Sim2 && methods.contains(&Method::Sis) {
        return Err(Error::UnsupportedMethod {
            method: Method::Sis.label().into(),
            reason: "the sim2 response is bivariate".into(),
        });
    }
    let d = d_values.unwrap_or_else(|| spec.default_d_values());

    let per_rep: Vec<(Vec<usize>, Vec<Option<f64>>)> = (0..spec.reps)
        .into_par_iter()
        .map(|rep| {
            let (inst, results) =
                run_replication(spec, rep, methods).map_err(|e| Error::Replication {
                    replication: rep,
                    source: Box::new(e),
                })?;
            let sizes = results
                .iter()
                .map(|r| min_model_size(&r.ranking, &inst.active))
                .collect::<Result<Vec<_>>>()?;
            Ok((sizes, results.iter().map(|r| r.epsilon).collect()))
        })
        .collect::<Result<_>>()?;

    let methods = methods
        .iter()
        .enumerate()
        .map(|(k, &method)| {
            let sizes: Vec<usize> = per_rep.iter().map(|(s, _)| s[k]).collect();
            let eps: Option<Vec<f64>> = per_rep.iter().map(|(_, e)| e[k]).collect();
            MethodMetrics::from_runs(method, sizes, eps, d)
        })
        .collect();

    let active = spec.instance(0)?.active;
    Ok(MetricsReport {
        suite: spec.suite,
        model: spec.model,
        n: spec.n,
        p: spec.p,
        reps: spec.reps,
        seed: spec.seed,
        ar_rho: spec.ar_rho,
        d_values: d,
        active,
        methods,
    })
}
