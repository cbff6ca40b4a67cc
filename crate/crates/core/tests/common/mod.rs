//! Reference implementations used as test oracles. They follow the textbook
//! formulas with dense matrices and share no code with the library beyond
//! the input types.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID: [f64; 9] = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2, 1e3];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, d, |_, _| rng.random_range(-2.0..2.0))
}

fn sq_dist(a: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    (a.row(i) - a.row(j)).norm_squared()
}

/// Gaussian gram with gamma from the mean pairwise distance rule.
pub fn gaussian_gram(samples: &DMatrix<f64>) -> DMatrix<f64> {
    let n = samples.nrows();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i < j {
                pairs.push(sq_dist(samples, i, j).sqrt());
            }
        }
    }
    let mean = pairs.iter().sum::<f64>() / pairs.len() as f64;
    let width = 2f64.sqrt() * mean;
    let gamma = 1.0 / (width * width);
    DMatrix::from_fn(n, n, |i, j| (-gamma * sq_dist(samples, i, j)).exp())
}

pub fn centering(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64)
}

pub fn centered(k: &DMatrix<f64>) -> DMatrix<f64> {
    let q = centering(k.nrows());
    &q * k * &q
}

/// `U f(D) U^T` over eigenvalues above the relative cutoff.
fn spectral_map(g: &DMatrix<f64>, tol_rel: f64, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(g.clone());
    let tol = tol_rel * eig.eigenvalues.max().max(1.0);
    let n = g.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (k, &d) in eig.eigenvalues.iter().enumerate() {
        if d > tol {
            let u = eig.eigenvectors.column(k);
            out += f(d) * u * u.transpose();
        }
    }
    out
}

/// `sqrt(lambda_max(S_X S_Y))` with `S = G (G + eps I)^{-1}` restricted to the
/// retained spectrum.
pub fn dense_kcca(kx: &DMatrix<f64>, ky: &DMatrix<f64>, epsilon: f64, tol_rel: f64) -> f64 {
    let (gx, gy) = (centered(kx), centered(ky));
    let sx_half = spectral_map(&gx, tol_rel, |d| (d / (d + epsilon)).sqrt());
    let sy = spectral_map(&gy, tol_rel, |d| d / (d + epsilon));
    let sym = &sx_half * sy * &sx_half;
    let sym = (&sym + sym.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.max().max(0.0).sqrt()
}

/// Biased HSIC written as the three-term double sum.
pub fn hsic_double_sum(k: &DMatrix<f64>, l: &DMatrix<f64>) -> f64 {
    let n = k.nrows();
    let nf = n as f64;
    let mut t1 = 0.0;
    let mut t3 = 0.0;
    for i in 0..n {
        for j in 0..n {
            t1 += k[(i, j)] * l[(i, j)];
            for q in 0..n {
                t3 += k[(i, j)] * l[(i, q)];
            }
        }
    }
    let t2 = k.sum() * l.sum();
    t1 / (nf * nf) + t2 / nf.powi(4) - 2.0 * t3 / nf.powi(3)
}

fn double_centered_distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let a = DMatrix::from_fn(n, n, |i, j| sq_dist(x, i, j).sqrt());
    let row: Vec<f64> = (0..n).map(|i| a.row(i).sum() / n as f64).collect();
    let col: Vec<f64> = (0..n).map(|j| a.column(j).sum() / n as f64).collect();
    let all = a.sum() / (n * n) as f64;
    DMatrix::from_fn(n, n, |i, j| a[(i, j)] - row[i] - col[j] + all)
}

/// Distance correlation, `sqrt(dCov^2 / sqrt(dVar_x^2 dVar_y^2))`.
pub fn brute_dcor(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let (a, b) = (double_centered_distances(x), double_centered_distances(y));
    let n2 = (x.nrows() * x.nrows()) as f64;
    let mean = |p: &DMatrix<f64>, q: &DMatrix<f64>| p.component_mul(q).sum() / n2;
    let (vx, vy) = (mean(&a, &a), mean(&b, &b));
    if vx <= 0.0 || vy <= 0.0 {
        return 0.0;
    }
    (mean(&a, &b) / (vx * vy).sqrt()).max(0.0).sqrt()
}

/// `[1; K]`, an (n+1)×n matrix.
fn stacked(k: &DMatrix<f64>) -> DMatrix<f64> {
    let n = k.nrows();
    DMatrix::from_fn(n + 1, n, |i, j| if i == 0 { 1.0 } else { k[(i - 1, j)] })
}

/// GCV assembled literally with (n+1)×(n+1) inverses.
pub fn dense_gcv(epsilon: f64, ky: &DMatrix<f64>, kxs: &[DMatrix<f64>]) -> f64 {
    let n = ky.nrows();
    let ly = stacked(ky);
    let mut total = 0.0;
    for kx in kxs {
        let lr = stacked(kx);
        let inv = (&lr * lr.transpose() + DMatrix::identity(n + 1, n + 1) * epsilon)
            .try_inverse()
            .expect("regularized system is invertible");
        let residual = &ly - &ly * lr.transpose() * &inv * &lr;
        let trace = (lr.transpose() * &inv * &lr).trace();
        let den = 1.0 - trace / n as f64;
        total += residual.norm_squared() / (den * den);
    }
    total
}

/// Minimum model size by scanning prefixes of the ranking.
pub fn prefix_min_model_size(ranking: &[usize], active: &[usize]) -> usize {
    (1..=ranking.len())
        .find(|&k| active.iter().all(|a| ranking[..k].contains(a)))
        .expect("ranking covers the active set")
}

/// Rank order by sorting (score desc, index asc) pairs.
pub fn sorted_order(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    idx
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
