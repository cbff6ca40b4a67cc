//! Synthetic designs: AR(1)-correlated Gaussian predictors and the response
//! models of the two simulation suites.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal};

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// `(c1, c2, c3, c4)` of the first suite.
pub const SIM1_CONSTANTS: [f64; 4] = [2.0, 0.5, 3.0, 2.0];

/// Probability of a negative sign in the random coefficients.
const SIGN_FLIP_PROB: f64 = 0.4;

/// Correlations are kept this far inside (-1, 1).
const CORRELATION_MARGIN: f64 = 1e-12;

/// A seed plus a ChaCha stream id; independent streams never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSeed {
    pub seed: u64,
    pub stream: u64,
}

impl StreamSeed {
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Per-replication random streams, all derived from `seed + replication`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicationSeeds {
    pub x: StreamSeed,
    pub beta: StreamSeed,
    pub noise: StreamSeed,
    /// Seed handed to screening (GCV subsample).
    pub screen: u64,
}

impl ReplicationSeeds {
    pub fn new(seed: u64, replication: usize) -> Self {
        let base = seed.wrapping_add(replication as u64);
        let stream = |s| StreamSeed {
            seed: base,
            stream: s,
        };
        Self {
            x: stream(0),
            beta: stream(1),
            noise: stream(2),
            screen: base,
        }
    }
}

/// n i.i.d. rows from `N(0, Sigma)` with `Sigma_ij = rho^|i-j|`, generated by
/// the recursion `X_j = rho X_{j-1} + sqrt(1 - rho^2) Z_j`.
pub fn ar_gaussian_with<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    rho: f64,
    rng: &mut R,
) -> Result<DataMatrix> {
    if rho.is_nan() || rho.abs() >= 1.0 {
        return Err(Error::arg(format!(
            "AR coefficient must satisfy |rho| < 1, got {rho}"
        )));
    }
    let innovation = (1.0 - rho * rho).sqrt();
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut prev = 0.0;
        for j in 0..p {
            let z: f64 = StandardNormal.sample(rng);
            prev = if j == 0 {
                z
            } else {
                rho * prev + innovation * z
            };
            x[(i, j)] = prev;
        }
    }
    DataMatrix::new(x)
}

pub fn ar_gaussian(n: usize, p: usize, rho: f64, seed: u64) -> Result<DataMatrix> {
    ar_gaussian_with(n, p, rho, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Design matrix, response, and the true active set (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInstance {
    pub x: DataMatrix,
    pub y: DataMatrix,
    pub active: Vec<usize>,
    /// Realized random coefficients (empty when the model has none).
    pub coefficients: Vec<f64>,
}

/// `a = 4 log(n) / sqrt(n)`.
pub fn coefficient_floor(n: usize) -> f64 {
    let n = n as f64;
    4.0 * n.ln() / n.sqrt()
}

/// `(-1)^U (a + |Z|)` with `U ~ Bernoulli(0.4)`, `Z ~ N(0, 1)`.
pub fn draw_coefficient<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let flip = Bernoulli::new(SIGN_FLIP_PROB)
        .expect("valid probability")
        .sample(rng);
    let z: f64 = StandardNormal.sample(rng);
    let magnitude = a + z.abs();
    if flip {
        -magnitude
    } else {
        magnitude
    }
}

/// Active predictors of the first suite: X1, X2, X12, X22.
pub const SIM1_ACTIVE: [usize; 4] = [0, 1, 11, 21];

/// Scalar responses of the first suite (models 1–4).
pub fn gen_sim1<R1, R2>(
    x: DataMatrix,
    model: u8,
    beta_rng: &mut R1,
    noise_rng: &mut R2,
) -> Result<ModelInstance>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    if !(1..=4).contains(&model) {
        return Err(Error::arg(format!(
            "simulation 1 has models 1-4, got {model}"
        )));
    }
    if x.p() < 22 {
        return Err(Error::arg(format!(
            "simulation 1 needs p >= 22, got {}",
            x.p()
        )));
    }
    let n = x.n();
    let [c1, c2, c3, c4] = SIM1_CONSTANTS;
    let coefficients: Vec<f64> = if model == 4 {
        Vec::new()
    } else {
        let a = coefficient_floor(n);
        (0..3).map(|_| draw_coefficient(a, beta_rng)).collect()
    };
    let b = |k: usize| coefficients[k];
    let ind = |v: f64| if v < 0.0 { 1.0 } else { 0.0 };
    let mut y = DMatrix::zeros(n, 1);
    for i in 0..n {
        let (x1, x2, x12, x22) = (
            x.matrix()[(i, 0)],
            x.matrix()[(i, 1)],
            x.matrix()[(i, 11)],
            x.matrix()[(i, 21)],
        );
        let e: f64 = StandardNormal.sample(noise_rng);
        y[(i, 0)] = match model {
            1 => c1 * b(0) * x1 * x2 + c3 * b(1) * ind(x12) + c4 * b(2) * x22 + e,
            2 => c1 * b(0) * x1 * x2 + c3 * b(1) * ind(x12) * x22 + e,
            3 => {
                c1 * b(0) * x1 + c2 * b(1) * x2 + c3 * b(2) * ind(x12) + (c4 * x22.abs()).exp() * e
            }
            _ => x1 / x2 + x12 * x12 / (1.0 + x22.cos()) + e,
        };
    }
    let y = DataMatrix::new(y)
        .map_err(|_| Error::Numeric("simulated response is not finite".into()))?;
    Ok(ModelInstance {
        x,
        y,
        active: SIM1_ACTIVE.to_vec(),
        coefficients,
    })
}

fn clamp_correlation(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        s.signum() * (1.0 - CORRELATION_MARGIN)
    } else {
        s
    }
}

/// Bivariate responses of the second suite: unit variances and a
/// correlation `sigma(X)` that depends on the predictors.
pub fn gen_sim2<R1, R2>(
    x: DataMatrix,
    model: u8,
    beta_rng: &mut R1,
    noise_rng: &mut R2,
) -> Result<ModelInstance>
where
    R1: Rng + ?Sized,
    R2: Rng + ?Sized,
{
    if !(1..=2).contains(&model) {
        return Err(Error::arg(format!(
            "simulation 2 has models 1-2, got {model}"
        )));
    }
    if x.p() < 4 {
        return Err(Error::arg(format!(
            "simulation 2 needs p >= 4, got {}",
            x.p()
        )));
    }
    let coefficients: Vec<f64> = match model {
        1 => vec![0.8, 0.6],
        _ => (0..4).map(|_| 2.0 - beta_rng.random::<f64>()).collect(),
    };
    let n = x.n();
    let mut y = DMatrix::zeros(n, 2);
    for i in 0..n {
        let t: f64 = coefficients
            .iter()
            .enumerate()
            .map(|(j, b)| b * x.matrix()[(i, j)])
            .sum();
        let sigma = clamp_correlation(match model {
            1 => t.sin(),
            // (e^t - 1) / (e^t + 1)
            _ => (0.5 * t).tanh(),
        });
        let z1: f64 = StandardNormal.sample(noise_rng);
        let z2: f64 = StandardNormal.sample(noise_rng);
        y[(i, 0)] = z1;
        y[(i, 1)] = sigma * z1 + (1.0 - sigma * sigma).sqrt() * z2;
    }
    Ok(ModelInstance {
        x,
        y: DataMatrix::new(y)?,
        active: (0..coefficients.len()).collect(),
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar_is_deterministic_per_seed() {
        assert_eq!(
            ar_gaussian(20, 5, 0.8, 3).unwrap(),
            ar_gaussian(20, 5, 0.8, 3).unwrap()
        );
        assert_ne!(
            ar_gaussian(20, 5, 0.8, 3).unwrap(),
            ar_gaussian(20, 5, 0.8, 4).unwrap()
        );
        assert!(ar_gaussian(5, 5, 1.0, 0).is_err());
        assert!(ar_gaussian(5, 5, f64::NAN, 0).is_err());
    }

    #[test]
    fn independent_columns_have_vanishing_means() {
        let x = ar_gaussian(4000, 3, 0.0, 1).unwrap();
        for r in 0..3 {
            let mean = x.column(r).iter().sum::<f64>() / 4000.0;
            assert!(mean.abs() < 0.06, "{mean}");
        }
    }

    #[test]
    fn coefficient_floor_at_200() {
        assert!((coefficient_floor(200) - 1.498590455505827).abs() < 1e-12);
    }

    #[test]
    fn coefficients_exceed_floor_in_magnitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let draws: Vec<f64> = (0..2000).map(|_| draw_coefficient(1.5, &mut rng)).collect();
        assert!(draws.iter().all(|b| b.abs() >= 1.5));
        let negative = draws.iter().filter(|b| **b < 0.0).count() as f64 / 2000.0;
        assert!((negative - 0.4).abs() < 0.04, "{negative}");
    }

    #[test]
    fn sim1_constants() {
        assert_eq!(SIM1_CONSTANTS, [2.0, 0.5, 3.0, 2.0]);
    }

    #[test]
    fn sim1_validation() {
        let small = ar_gaussian(10, 21, 0.8, 0).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(0);
        let mut s = ChaCha8Rng::seed_from_u64(1);
        assert!(gen_sim1(small, 1, &mut r, &mut s).is_err());
        let x = ar_gaussian(10, 30, 0.8, 0).unwrap();
        assert!(gen_sim1(x.clone(), 0, &mut r, &mut s).is_err());
        assert!(gen_sim1(x, 5, &mut r, &mut s).is_err());
    }

    #[test]
    fn sim1_active_set_and_shapes() {
        for model in 1..=4 {
            let x = ar_gaussian(30, 40, 0.8, 5).unwrap();
            let inst = gen_sim1(
                x,
                model,
                &mut ChaCha8Rng::seed_from_u64(1),
                &mut ChaCha8Rng::seed_from_u64(2),
            )
            .unwrap();
            assert_eq!(inst.active, vec![0, 1, 11, 21]);
            assert_eq!((inst.y.n(), inst.y.p()), (30, 1));
            assert_eq!(inst.coefficients.len(), if model == 4 { 0 } else { 3 });
        }
    }

    #[test]
    fn model_four_ignores_coefficient_stream() {
        let x = ar_gaussian(50, 25, 0.8, 9).unwrap();
        let a = gen_sim1(
            x.clone(),
            4,
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut ChaCha8Rng::seed_from_u64(7),
        )
        .unwrap();
        let b = gen_sim1(
            x,
            4,
            &mut ChaCha8Rng::seed_from_u64(99),
            &mut ChaCha8Rng::seed_from_u64(7),
        )
        .unwrap();
        assert_eq!(a.y, b.y);
    }

    #[test]
    fn model_one_uses_coefficient_stream() {
        let x = ar_gaussian(50, 25, 0.8, 9).unwrap();
        let a = gen_sim1(
            x.clone(),
            1,
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut ChaCha8Rng::seed_from_u64(7),
        )
        .unwrap();
        let b = gen_sim1(
            x,
            1,
            &mut ChaCha8Rng::seed_from_u64(99),
            &mut ChaCha8Rng::seed_from_u64(7),
        )
        .unwrap();
        assert_ne!(a.y, b.y);
    }

    #[test]
    fn sim2_models() {
        let x = ar_gaussian(40, 10, 0.8, 4).unwrap();
        let one = gen_sim2(
            x.clone(),
            1,
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut ChaCha8Rng::seed_from_u64(2),
        )
        .unwrap();
        assert_eq!(one.active, vec![0, 1]);
        assert_eq!(one.coefficients, vec![0.8, 0.6]);
        assert_eq!((one.y.n(), one.y.p()), (40, 2));
        let two = gen_sim2(
            x.clone(),
            2,
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut ChaCha8Rng::seed_from_u64(2),
        )
        .unwrap();
        assert_eq!(two.active, vec![0, 1, 2, 3]);
        assert!(two.coefficients.iter().all(|b| (1.0..=2.0).contains(b)));
        assert!(gen_sim2(
            x.clone(),
            3,
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut ChaCha8Rng::seed_from_u64(2)
        )
        .is_err());
        let narrow = ar_gaussian(10, 3, 0.8, 0).unwrap();
        assert!(gen_sim2(
            narrow,
            1,
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut ChaCha8Rng::seed_from_u64(2)
        )
        .is_err());
    }

    #[test]
    fn zero_index_gives_independent_coordinates() {
        // beta^T x = 0 for every row: second coordinate is pure fresh noise
        let x = DataMatrix::new(DMatrix::zeros(5, 6)).unwrap();
        let inst = gen_sim2(
            x,
            1,
            &mut ChaCha8Rng::seed_from_u64(1),
            &mut ChaCha8Rng::seed_from_u64(2),
        )
        .unwrap();
        let mut noise = ChaCha8Rng::seed_from_u64(2);
        for i in 0..5 {
            let z1: f64 = StandardNormal.sample(&mut noise);
            let z2: f64 = StandardNormal.sample(&mut noise);
            assert_eq!(inst.y.matrix()[(i, 0)], z1);
            assert_eq!(inst.y.matrix()[(i, 1)], z2);
        }
    }

    #[test]
    fn logistic_correlation_is_bounded() {
        for t in [-800.0, -20.0, -1.0, 0.0, 1.0, 20.0, 800.0] {
            let s = clamp_correlation((0.5f64 * t).tanh());
            assert!(s.abs() < 1.0);
            let direct = (t.exp() - 1.0) / (t.exp() + 1.0);
            if t.abs() < 30.0 {
                assert!((s - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn replication_streams_are_distinct() {
        let s = ReplicationSeeds::new(7, 3);
        assert_eq!(s.screen, 10);
        let a: u64 = s.x.rng().random();
        let b: u64 = s.beta.rng().random();
        let c: u64 = s.noise.rng().random();
        assert!(a != b && b != c && a != c);
        assert_eq!(ReplicationSeeds::new(7, 3), s);
    }
}
