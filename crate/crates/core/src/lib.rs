//! Marginal feature screening for ultrahigh-dimensional data.
//!
//! Each predictor is scored against a (possibly multivariate) response with a
//! regularized kernel canonical correlation, and the top `m` predictors are
//! kept. Pearson (SIS), distance correlation (DC-SIS) and HSIC scores are
//! available as baselines, and [`sim`] reproduces the benchmark simulations.
//!
//! ```no_run
//! use kcca_screen::{screen, DataMatrix, Method, ScreenConfig, ThresholdRule};
//! # fn demo(x: DataMatrix, y: DataMatrix) -> kcca_screen::Result<()> {
//! let config = ScreenConfig::new(Method::Kcca).with_rule(ThresholdRule::FixedM(20));
//! let result = screen(&x, &y, &config)?;
//! println!("{:?}", result.selected);
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod io;
pub mod kernel;
mod linalg;
pub mod measures;
pub mod screening;
pub mod sim;
pub mod tuning;

pub use data::DataMatrix;
pub use error::{Error, Result};
pub use kernel::{Bandwidth, CenteredGram};
pub use measures::{DependenceScore, Method};
pub use screening::{screen, EpsilonMode, ScreenConfig, ScreeningResult, ThresholdRule};
pub use tuning::RidgeSelection;
