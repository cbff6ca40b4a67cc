//! Command-line front end: `screen` and `simulate`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::{load_csv, write_metrics, OutputFormat, ScreenReport};
use crate::measures::Method;
use crate::screening::{screen, EpsilonMode, ScreenConfig, ThresholdRule};
use crate::sim::{run_suite, SimulationSpec, Suite, DEFAULT_AR_RHO};
use crate::tuning::DEFAULT_SUBSAMPLE;

#[derive(Debug, Parser)]
#[command(
    name = "kcca-screen",
    version,
    about = "Kernel canonical correlation feature screening"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank the predictors of a CSV table against one or more response columns.
    Screen(ScreenArgs),
    /// Run a simulation suite and report model-size quantiles and coverage.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct ScreenArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Response column names or 1-based column numbers, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub response: Vec<String>,
    #[arg(long, default_value = "kcca", value_parser = parse_method)]
    pub method: Method,
    /// Ridge parameter for KCCA: `auto` (GCV) or a positive number.
    #[arg(long, default_value = "auto", value_parser = parse_epsilon)]
    pub epsilon: EpsilonMode,
    /// Model size: `auto`, an integer, or a percentage of p such as `1%`.
    #[arg(long, default_value = "1%", value_parser = parse_top)]
    pub top: ThresholdRule,
    /// Number of predictors used for GCV, or `all`.
    #[arg(long, default_value_t = Subsample(Some(DEFAULT_SUBSAMPLE)))]
    pub gcv_subsample: Subsample,
    /// Relative eigenvalue cutoff for the pseudo-inverse.
    #[arg(long, default_value_t = crate::kernel::DEFAULT_TOL_REL, value_parser = parse_tol)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long)]
    pub model: u8,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 2000)]
    pub p: usize,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    /// Methods to compare, comma separated. Defaults to every method valid for the suite.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// AR(1) correlation of the predictors.
    #[arg(long, default_value_t = DEFAULT_AR_RHO)]
    pub rho: f64,
    /// Override the three model-size cutoffs, e.g. `37,74,111`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub d: Option<Vec<usize>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `json` or `csv`; inferred from the output extension when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<OutputFormat>,
    /// Worker threads: a positive integer or `auto` (all cores).
    #[arg(long, default_value = "auto", value_parser = parse_threads)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subsample(pub Option<usize>);

impl FromStr for Subsample {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Subsample(None));
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(Subsample(Some(k))),
            _ => Err(format!("expected a positive integer or `all`, got {s:?}")),
        }
    }
}

impl std::fmt::Display for Subsample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(k) => write!(f, "{k}"),
            None => f.write_str("all"),
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse::<Suite>().map_err(|e| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse::<OutputFormat>().map_err(|e| e.to_string())
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// `auto` maps to 0, which rayon reads as "use the default".
fn parse_threads(s: &str) -> std::result::Result<usize, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(0);
    }
    match s.parse::<usize>() {
        Ok(k) if k > 0 => Ok(k),
        _ => Err(format!("expected a positive integer or `auto`, got {s:?}")),
    }
}

fn parse_epsilon(s: &str) -> std::result::Result<EpsilonMode, String> {
    if s.eq_ignore_ascii_case("auto") {
        Ok(EpsilonMode::Auto)
    } else {
        positive(s).map(EpsilonMode::Fixed)
    }
}

fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..1.0).contains(&v) => Ok(v),
        _ => Err(format!("expected a tolerance in [0, 1), got {s:?}")),
    }
}

fn parse_top(s: &str) -> std::result::Result<ThresholdRule, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(ThresholdRule::Auto);
    }
    if let Some(pct) = s.strip_suffix('%') {
        return match pct.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v <= 100.0 => Ok(ThresholdRule::Fraction(v / 100.0)),
            _ => Err(format!("expected a percentage in (0, 100], got {s:?}")),
        };
    }
    match s.parse::<usize>() {
        Ok(m) if m > 0 => Ok(ThresholdRule::FixedM(m)),
        _ => Err(format!(
            "expected `auto`, a positive integer or a percentage, got {s:?}"
        )),
    }
}

/// Validated settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Screen {
        input: PathBuf,
        response: Vec<String>,
        config: ScreenConfig,
        output: Output,
    },
    Simulate {
        spec: SimulationSpec,
        methods: Vec<Method>,
        d_values: Option<[usize; 3]>,
        output: Output,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: usize,
}

impl From<OutputArgs> for Output {
    fn from(a: OutputArgs) -> Self {
        let format = a
            .format
            .unwrap_or_else(|| OutputFormat::from_path(a.out.as_deref()));
        Output {
            path: a.out,
            format,
            threads: a.threads,
        }
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        match cli.command {
            Command::Screen(a) => {
                if a.top == ThresholdRule::Auto && a.method != Method::Kcca {
                    return Err(Error::arg(
                        "--top auto needs a ridge parameter and is only defined for kcca",
                    ));
                }
                if matches!(a.epsilon, EpsilonMode::Fixed(_)) && a.method != Method::Kcca {
                    log::warn!("--epsilon is ignored for {}", a.method.label());
                }
                let mut config = ScreenConfig::new(a.method)
                    .with_rule(a.top)
                    .with_epsilon(a.epsilon)
                    .with_seed(a.seed);
                config.gcv_subsample = a.gcv_subsample.0;
                config.tol_rel = a.tol;
                Ok(RunConfig::Screen {
                    input: a.input,
                    response: a.response,
                    config,
                    output: a.output.into(),
                })
            }
            Command::Simulate(a) => {
                let mut spec = SimulationSpec::new(a.suite, a.model, a.n, a.p, a.reps, a.seed);
                spec.ar_rho = a.rho;
                spec.validate()?;
                let methods = if a.methods.is_empty() {
                    Method::ALL
                        .into_iter()
                        .filter(|&m| a.suite == Suite::Sim1 || m != Method::Sis)
                        .collect()
                } else {
                    a.methods
                };
                let d_values = a.d.map(|d| [d[0], d[1], d[2]]);
                Ok(RunConfig::Simulate {
                    spec,
                    methods,
                    d_values,
                    output: a.output.into(),
                })
            }
        }
    }

    fn output(&self) -> &Output {
        match self {
            RunConfig::Screen { output, .. } | RunConfig::Simulate { output, .. } => output,
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

/// Executes a validated configuration inside a thread pool of the requested size.
pub fn run_command(config: &RunConfig) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.output().threads)
        .build()
        .map_err(|e| Error::arg(format!("cannot build thread pool: {e}")))?;
    pool.install(|| match config {
        RunConfig::Screen {
            input,
            response,
            config,
            output,
        } => {
            let start = Instant::now();
            let data = load_csv(input, response)?;
            let result = screen(&data.x, &data.y, config)?;
            let report = ScreenReport::new(
                &result,
                data.x.n(),
                &data.predictor_names,
                &data.response_names,
                config.rule,
                start.elapsed().as_secs_f64(),
            );
            log::info!(
                "{}: selected {} of {} predictors",
                config.method.label(),
                report.m,
                report.p
            );
            let mut w = open_output(output.path.as_deref())?;
            report.write(&mut w, output.format)?;
            w.flush()?;
            Ok(())
        }
        RunConfig::Simulate {
            spec,
            methods,
            d_values,
            output,
        } => {
            let report = run_suite(spec, methods, *d_values)?;
            if output.path.is_some() {
                eprint!("{}", report.render_table());
            }
            let mut w = open_output(output.path.as_deref())?;
            write_metrics(&report, &mut w, output.format)?;
            w.flush()?;
            Ok(())
        }
    })
}
