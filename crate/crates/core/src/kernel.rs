//! Gaussian kernel, data-driven bandwidth, Gram matrices and their centered
//! spectral decomposition.
//!
//! Samples are passed as an n×d matrix view whose rows are observations. A
//! single predictor is an n×1 view, a multivariate response an n×d view.

use nalgebra::{DMatrix, DMatrixView, DVector};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// Default relative cutoff below which Gram eigenvalues are treated as zero.
pub const DEFAULT_TOL_REL: f64 = 1e-10;

/// Absolute elementwise tolerance for accepting a kernel matrix as symmetric
/// (scaled by `max(1, max |k_ij|)`).
const SYMMETRY_TOL: f64 = 1e-10;

/// Inverse squared length-scale `gamma` of `k(x, y) = exp(-gamma * |x - y|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma > 0.0 {
            Ok(Self(gamma))
        } else {
            Err(Error::arg(format!(
                "bandwidth must be positive and finite, got {gamma}"
            )))
        }
    }

    /// The fallback used for constant features.
    pub fn unit() -> Self {
        Self(1.0)
    }

    pub fn gamma(self) -> f64 {
        self.0
    }
}

/// `exp(-gamma * |x - y|^2)`.
pub fn gaussian_kernel(x: &[f64], y: &[f64], bw: Bandwidth) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-bw.gamma() * sq).exp())
}

fn row_sq_distance(samples: &DMatrixView<'_, f64>, i: usize, j: usize) -> f64 {
    (0..samples.ncols())
        .map(|c| {
            let diff = samples[(i, c)] - samples[(j, c)];
            diff * diff
        })
        .sum()
}

/// Bandwidth from the mean pairwise Euclidean distance:
/// `1/sqrt(gamma) = 2*sqrt(2) / (n(n-1)) * sum_{i<j} |x_i - x_j|`.
///
/// Returns [`Error::DegenerateSamples`] when all samples coincide.
pub fn bandwidth(samples: DMatrixView<'_, f64>) -> Result<Bandwidth> {
    let n = samples.nrows();
    if n < 2 {
        return Err(Error::SampleSize { n, min: 2 });
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += row_sq_distance(&samples, i, j).sqrt();
        }
    }
    let width = 2.0 * std::f64::consts::SQRT_2 * total / (n as f64 * (n as f64 - 1.0));
    if width <= 0.0 {
        return Err(Error::DegenerateSamples);
    }
    Bandwidth::new(1.0 / (width * width))
}

/// [`bandwidth`], substituting gamma = 1 (with a warning) for constant samples.
pub fn bandwidth_or_unit(samples: DMatrixView<'_, f64>) -> Result<Bandwidth> {
    match bandwidth(samples) {
        Err(Error::DegenerateSamples) => {
            log::warn!("constant samples: using bandwidth gamma = 1");
            Ok(Bandwidth::unit())
        }
        other => other,
    }
}

/// Kernel matrix `K_ij = k(x_i, x_j)`.
pub fn gram(samples: DMatrixView<'_, f64>, bw: Bandwidth) -> DMatrix<f64> {
    let n = samples.nrows();
    let gamma = bw.gamma();
    let mut k = DMatrix::identity(n, n);
    for j in 0..n {
        for i in (j + 1)..n {
            let v = (-gamma * row_sq_distance(&samples, i, j)).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Double centering `Q K Q` with `Q = I - (1/n) 11^T`.
pub fn center(k: &DMatrix<f64>) -> DMatrix<f64> {
    let n = k.nrows();
    if n == 0 {
        return k.clone();
    }
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| k.row(i).sum() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| k.column(j).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    DMatrix::from_fn(n, n, |i, j| k[(i, j)] - row_means[i] - col_means[j] + grand)
}

fn check_symmetric(k: &DMatrix<f64>) -> Result<()> {
    if !k.is_square() {
        return Err(Error::arg(format!(
            "kernel matrix must be square, got {}x{}",
            k.nrows(),
            k.ncols()
        )));
    }
    let scale = k.amax().max(1.0);
    let n = k.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            if (k[(i, j)] - k[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::arg(format!(
                    "kernel matrix is not symmetric at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// A double-centered Gram matrix `G = QKQ` together with `G = U diag(d) U^T`.
///
/// Eigenvalues are sorted descending. Any eigenvalue below
/// `tol_rel * max(d_max, 1)` is stored as exactly zero, which fixes the rank
/// used by the pseudo-inverse powers.
#[derive(Debug, Clone)]
pub struct CenteredGram {
    g: DMatrix<f64>,
    u: DMatrix<f64>,
    d: DVector<f64>,
    tol: f64,
    rank: usize,
}

impl CenteredGram {
    /// Centers a symmetric PSD kernel matrix and decomposes it.
    pub fn from_kernel(k: &DMatrix<f64>, tol_rel: f64) -> Result<Self> {
        check_symmetric(k)?;
        if !(tol_rel >= 0.0 && tol_rel.is_finite()) {
            return Err(Error::arg(format!(
                "tolerance must be nonnegative, got {tol_rel}"
            )));
        }
        let mut g = center(k);
        // exact symmetry, so both triangles agree with what the solver reads
        let n = g.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                let v = 0.5 * (g[(i, j)] + g[(j, i)]);
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        let (mut d, u) = symmetric_eigen(&g)?;
        let top = d.iter().copied().fold(0.0_f64, f64::max);
        let tol = tol_rel * top.max(1.0);
        let mut rank = 0;
        for v in d.iter_mut() {
            if *v < tol || *v <= 0.0 {
                *v = 0.0;
            } else {
                rank += 1;
            }
        }
        Ok(Self { g, u, d, tol, rank })
    }

    /// Gaussian Gram of `samples` with bandwidth `bw`, centered and decomposed.
    pub fn from_samples(
        samples: DMatrixView<'_, f64>,
        bw: Bandwidth,
        tol_rel: f64,
    ) -> Result<Self> {
        Self::from_kernel(&gram(samples, bw), tol_rel)
    }

    pub fn n(&self) -> usize {
        self.g.nrows()
    }

    /// The centered matrix G.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Orthonormal eigenvectors as columns, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Clamped eigenvalues, descending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.d
    }

    /// Absolute cutoff that was applied to the eigenvalues.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Number of retained (nonzero) eigenvalues; they are the leading ones.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Moore–Penrose `D^+`: reciprocals of retained eigenvalues, zero elsewhere.
    pub fn pinv_eigenvalues(&self) -> DVector<f64> {
        self.d.map(|v| if v > 0.0 { 1.0 / v } else { 0.0 })
    }

    /// `D^{+1/2}`.
    pub fn pinv_sqrt_eigenvalues(&self) -> DVector<f64> {
        self.d.map(|v| if v > 0.0 { 1.0 / v.sqrt() } else { 0.0 })
    }

    /// `U diag(d) U^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.n(), self.n(), |i, j| self.u[(i, j)] * self.d[j]);
        scaled * self.u.transpose()
    }
}
