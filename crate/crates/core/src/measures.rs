//! Marginal dependence statistics: the regularized kernel canonical
//! correlation (KCCA), HSIC, distance correlation and absolute Pearson
//! correlation.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DMatrixView};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::CenteredGram;

/// Screening statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Absolute Pearson correlation (SIS).
    Sis,
    /// Distance correlation (DC-SIS).
    Dc,
    /// Hilbert–Schmidt independence criterion (HSIC-SIS).
    Hsic,
    /// Regularized kernel canonical correlation (KCCA-SIS).
    Kcca,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Sis, Method::Dc, Method::Hsic, Method::Kcca];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sis => "sis",
            Method::Dc => "dc",
            Method::Hsic => "hsic",
            Method::Kcca => "kcca",
        }
    }

    /// Table label, e.g. `KCCA-SIS`.
    pub fn label(self) -> &'static str {
        match self {
            Method::Sis => "SIS",
            Method::Dc => "DC-SIS",
            Method::Hsic => "HSIC-SIS",
            Method::Kcca => "KCCA-SIS",
        }
    }

    pub fn uses_kernels(self) -> bool {
        matches!(self, Method::Hsic | Method::Kcca)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sis" | "pearson" => Ok(Method::Sis),
            "dc" | "dc-sis" | "dcor" => Ok(Method::Dc),
            "hsic" | "hsic-sis" => Ok(Method::Hsic),
            "kcca" | "kcca-sis" => Ok(Method::Kcca),
            other => Err(Error::arg(format!(
                "unknown method {other:?} (expected kcca, hsic, dc or sis)"
            ))),
        }
    }
}

/// One predictor's dependence with the response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DependenceScore {
    pub value: f64,
    pub method: Method,
    /// Ridge parameter, present only for KCCA.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl DependenceScore {
    fn plain(value: f64, method: Method) -> Self {
        Self {
            value,
            method,
            epsilon: None,
        }
    }
}

fn check_same_n(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a,
            got: b,
        })
    }
}

/// Norm of the regularized empirical correlation operator.
///
/// In the eigen-coordinates of the two centered Grams the operator is
/// `(D_Y + eps)^{-1/2} D_Y^{1/2} U_Y^T U_X D_X^{1/2} (D_X + eps)^{-1/2}`; the
/// score is its largest singular value. Only retained eigenpairs contribute,
/// so the work after the decompositions is `O(n * rank_x * rank_y)`.
pub fn kcca_score(gx: &CenteredGram, gy: &CenteredGram, epsilon: f64) -> Result<DependenceScore> {
    check_same_n(gy.n(), gx.n())?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::arg(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let (rx, ry) = (gx.rank(), gy.rank());
    let mut score = DependenceScore {
        value: 0.0,
        method: Method::Kcca,
        epsilon: Some(epsilon),
    };
    if rx == 0 || ry == 0 {
        return Ok(score);
    }
    let shrink = |d: f64| (d / (d + epsilon)).sqrt();
    let ux = gx.eigenvectors().columns(0, rx);
    let uy = gy.eigenvectors().columns(0, ry);
    let mut m: DMatrix<f64> = uy.tr_mul(&ux);
    for j in 0..rx {
        let ax = shrink(gx.eigenvalues()[j]);
        for i in 0..ry {
            m[(i, j)] *= shrink(gy.eigenvalues()[i]) * ax;
        }
    }
    score.value = m.singular_values().max();
    if !score.value.is_finite() {
        return Err(Error::Numeric("non-finite KCCA score".into()));
    }
    Ok(score)
}

/// Biased HSIC `(1/n^2) tr(G_X G_Y)` on two centered Grams.
pub fn hsic_score(gx: &CenteredGram, gy: &CenteredGram) -> Result<DependenceScore> {
    Ok(DependenceScore::plain(
        hsic_centered(gx.matrix(), gy.matrix())?,
        Method::Hsic,
    ))
}

/// [`hsic_score`] on bare centered matrices, for callers that never need the
/// eigendecomposition.
pub fn hsic_centered(gx: &DMatrix<f64>, gy: &DMatrix<f64>) -> Result<f64> {
    check_same_n(gx.nrows(), gy.nrows())?;
    if !gx.is_square() || gx.shape() != gy.shape() {
        return Err(Error::arg(
            "centered Grams must be square and of equal size",
        ));
    }
    let n = gx.nrows() as f64;
    if n == 0.0 {
        return Ok(0.0);
    }
    // tr(G_X G_Y) = sum_ij G_X[i,j] G_Y[i,j] for symmetric G
    let value = gx.dot(gy) / (n * n);
    Ok(value.max(0.0))
}

fn centered_distances(samples: &DMatrixView<'_, f64>) -> DMatrix<f64> {
    let n = samples.nrows();
    let mut dist = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in (j + 1)..n {
            let sq: f64 = (0..samples.ncols())
                .map(|c| {
                    let diff = samples[(i, c)] - samples[(j, c)];
                    diff * diff
                })
                .sum();
            let v = sq.sqrt();
            dist[(i, j)] = v;
            dist[(j, i)] = v;
        }
    }
    crate::kernel::center(&dist)
}

/// Sample distance correlation from doubly-centered Euclidean distance
/// matrices. Zero when either variable is constant.
pub fn dcor_score(x: DMatrixView<'_, f64>, y: DMatrixView<'_, f64>) -> Result<DependenceScore> {
    check_same_n(x.nrows(), y.nrows())?;
    let n = x.nrows();
    if n < 2 {
        return Err(Error::SampleSize { n, min: 2 });
    }
    let a = centered_distances(&x);
    let b = centered_distances(&y);
    let dcov = a.dot(&b);
    let vx = a.dot(&a);
    let vy = b.dot(&b);
    let value = if vx <= 0.0 || vy <= 0.0 {
        0.0
    } else {
        (dcov.max(0.0) / (vx * vy).sqrt()).sqrt().min(1.0)
    };
    Ok(DependenceScore::plain(value, Method::Dc))
}

/// Absolute sample Pearson correlation. Zero when either variable is constant.
pub fn pearson_score(x: &[f64], y: &[f64]) -> Result<DependenceScore> {
    check_same_n(x.len(), y.len())?;
    let n = x.len();
    if n < 2 {
        return Err(Error::SampleSize { n, min: 2 });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    let value = if sxx <= 0.0 || syy <= 0.0 {
        0.0
    } else {
        (sxy.abs() / (sxx * syy).sqrt()).min(1.0)
    };
    Ok(DependenceScore::plain(value, Method::Sis))
}

/// Pearson score against a response given as an n×d view; SIS is univariate only.
pub fn pearson_score_view(x: &[f64], y: DMatrixView<'_, f64>) -> Result<DependenceScore> {
    if y.ncols() != 1 {
        return Err(Error::UnsupportedMethod {
            method: Method::Sis.label().into(),
            reason: format!(
                "the response has {} columns; Pearson screening needs a scalar response",
                y.ncols()
            ),
        });
    }
    let ys: Vec<f64> = y.column(0).iter().copied().collect();
    pearson_score(x, &ys)
}
