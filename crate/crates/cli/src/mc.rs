//! Monte Carlo estimates of `E[(S_k)_{n,λ}]`.

use anyhow::{ensure, Result};
use probfubini::combinatorics::CombCache;
use probfubini::exact::to_f64;
use probfubini::probabilistic::{MomentProvider, ProbModel};
use probfubini::Rational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

pub const MIN_SAMPLES: u64 = 1000;

/// Largest Poisson rate drawn by sequential-search inversion.
const INVERSION_MAX_RATE: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub exact: Rational,
    /// `None` when the sample has zero spread.
    pub z_score: Option<f64>,
    pub samples: u64,
    pub seed: u64,
}

enum Sampler {
    Point(f64),
    Bernoulli(f64),
    PoissonInversion { rate: f64, p0: f64 },
    PoissonLarge(Poisson<f64>),
    Gamma(Gamma<f64>),
    Discrete { values: Vec<f64>, cdf: Vec<f64> },
}

impl Sampler {
    fn new(dist: &MomentProvider) -> Result<Self> {
        Ok(match dist {
            MomentProvider::PointMass(c) => Sampler::Point(to_f64(c)),
            MomentProvider::Bernoulli(p) => Sampler::Bernoulli(to_f64(p)),
            MomentProvider::Poisson(a) => {
                let rate = to_f64(a);
                if rate <= INVERSION_MAX_RATE {
                    Sampler::PoissonInversion {
                        rate,
                        p0: (-rate).exp(),
                    }
                } else {
                    Sampler::PoissonLarge(Poisson::new(rate)?)
                }
            }
            MomentProvider::Gamma { shape, rate } => {
                Sampler::Gamma(Gamma::new(to_f64(shape), 1.0 / to_f64(rate))?)
            }
            MomentProvider::FiniteDiscrete(atoms) => {
                let values = atoms.iter().map(|(v, _)| to_f64(v)).collect();
                let mut acc = 0.0;
                let mut cdf: Vec<f64> = atoms
                    .iter()
                    .map(|(_, w)| {
                        acc += to_f64(w);
                        acc
                    })
                    .collect();
                *cdf.last_mut().expect("nonempty") = 1.0;
                Sampler::Discrete { values, cdf }
            }
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Point(c) => *c,
            Sampler::Bernoulli(p) => {
                if rng.gen::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Sampler::PoissonInversion { rate, p0 } => {
                let u: f64 = rng.gen();
                let (mut x, mut p) = (0u32, *p0);
                let mut cdf = p;
                while u > cdf && p > 0.0 {
                    x += 1;
                    p *= rate / f64::from(x);
                    cdf += p;
                }
                f64::from(x)
            }
            Sampler::PoissonLarge(d) => d.sample(rng),
            Sampler::Gamma(d) => d.sample(rng),
            Sampler::Discrete { values, cdf } => {
                let u: f64 = rng.gen();
                let i = cdf.partition_point(|&c| c < u).min(values.len() - 1);
                values[i]
            }
        }
    }
}

/// `(x)_{n,λ}` in floating point.
pub fn degenerate_falling_f64(x: f64, n: usize, lambda: f64) -> f64 {
    (0..n).map(|i| x - i as f64 * lambda).product()
}

pub fn estimate(
    dist: &MomentProvider,
    k: usize,
    n: usize,
    lambda: &Rational,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    ensure!(
        samples >= MIN_SAMPLES,
        "samples must be at least {MIN_SAMPLES}, got {samples}"
    );
    let sampler = Sampler::new(dist)?;
    let lam = to_f64(lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Welford running mean and sum of squared deviations.
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for i in 1..=samples {
        let s: f64 = (0..k).map(|_| sampler.draw(&mut rng)).sum();
        let v = degenerate_falling_f64(s, n, lam);
        let delta = v - mean;
        mean += delta / i as f64;
        m2 += delta * (v - mean);
    }
    let sd = (m2 / (samples - 1) as f64).max(0.0).sqrt();
    let stderr = sd / (samples as f64).sqrt();

    let exact = ProbModel::new(CombCache::global(), dist.clone(), lambda.clone())
        .sum_degenerate_moment(k, n);
    let z_score = (stderr > 0.0).then(|| (mean - to_f64(&exact)) / stderr);
    Ok(McEstimate {
        estimate: mean,
        stderr,
        exact,
        z_score,
        samples,
        seed,
    })
}
