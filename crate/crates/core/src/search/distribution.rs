//! Independent-Gaussian search distribution and population sampling.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Independent Gaussian over each coordinate: mean `mu`, standard deviation
/// `sigma`. Equivalently an exponential-family model with sufficient
/// statistics `T(theta) = [theta, theta^2]` and natural parameters
/// `[mu/sigma^2, -1/(2 sigma^2)]` per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDistribution {
    mean: Vec<f64>,
    stddev: Vec<f64>,
}

impl SearchDistribution {
    pub fn new(mean: Vec<f64>, stddev: Vec<f64>) -> Result<Self> {
        if mean.len() != stddev.len() {
            return Err(Error::invalid_argument(format!(
                "mean/stddev length mismatch: {} vs {}",
                mean.len(),
                stddev.len()
            )));
        }
        if mean.is_empty() {
            return Err(Error::invalid_argument("dimension must be at least 1"));
        }
        if !mean.iter().all(|m| m.is_finite()) {
            return Err(Error::invalid_argument("mean entries must be finite"));
        }
        if !stddev.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::invalid_argument("stddev entries must be positive"));
        }
        Ok(SearchDistribution { mean, stddev })
    }

    /// Same standard deviation on every coordinate.
    pub fn isotropic(mean: Vec<f64>, sigma: f64) -> Result<Self> {
        let n = mean.len();
        Self::new(mean, vec![sigma; n])
    }

    /// Standard normal N(0, I).
    pub fn standard(dim: usize) -> Self {
        SearchDistribution {
            mean: vec![0.0; dim],
            stddev: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn stddev(&self) -> &[f64] {
        &self.stddev
    }
}

/// One evaluated sample: the parameter vector, its raw episode return, and
/// the shaped weight assigned by the fitness-shaping function.
#[derive(Debug, Clone)]
pub struct ScoredSample {
    pub theta: Vec<f64>,
    pub raw_return: f64,
    pub shaped_weight: f64,
}

/// Draw `count` parameter vectors `mu + sigma .* eps_i`.
///
/// Sample `i` comes from its own substream keyed by `(seed, i)`, so the
/// population is independent of evaluation order and identical across
/// repeated calls.
pub fn sample_population(
    dist: &SearchDistribution,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if count < 2 {
        return Err(Error::invalid_argument(format!(
            "population size must be at least 2, got {count}"
        )));
    }
    Ok((0..count)
        .map(|i| {
            let mut rng = rng::stream(seed, &[i as u64]);
            dist.mean
                .iter()
                .zip(&dist.stddev)
                .map(|(&m, &s)| {
                    let eps: f64 = rng.sample(StandardNormal);
                    m + s * eps
                })
                .collect()
        })
        .collect())
}

/// Draw `count` standard-normal noise vectors of length `dim`.
///
/// With `antithetic` set, noise comes in mirrored pairs `(+e, -e)`; pair
/// `p` is keyed by `(seed, p)` and an odd trailing sample gets its own
/// stream. Without it, sample `i` is keyed by `(seed, i)` exactly as in
/// [`sample_population`].
pub fn sample_epsilons(
    dim: usize,
    count: usize,
    seed: u64,
    antithetic: bool,
) -> Result<Vec<Vec<f64>>> {
    if count < 2 {
        return Err(Error::invalid_argument(format!(
            "population size must be at least 2, got {count}"
        )));
    }
    let draw = |tag: u64| -> Vec<f64> {
        let mut rng = rng::stream(seed, &[tag]);
        (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    };
    let mut out = Vec::with_capacity(count);
    if antithetic {
        for p in 0..count.div_ceil(2) {
            let eps = draw(p as u64);
            if out.len() < count {
                out.push(eps.clone());
            }
            if out.len() < count {
                out.push(eps.into_iter().map(|e| -e).collect());
            }
        }
    } else {
        for i in 0..count {
            out.push(draw(i as u64));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishing_variance_collapses_to_mean() {
        let dist = SearchDistribution::new(vec![1.0, 2.0], vec![1e-12, 1e-12]).unwrap();
        let pop = sample_population(&dist, 3, 0).unwrap();
        for theta in pop {
            assert!((theta[0] - 1.0).abs() < 1e-9);
            assert!((theta[1] - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let dist = SearchDistribution::isotropic(vec![0.0; 4], 1.0).unwrap();
        let a = sample_population(&dist, 5, 42).unwrap();
        let b = sample_population(&dist, 5, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_population(&dist, 5, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn large_population_matches_moments() {
        let dist = SearchDistribution::new(vec![0.0], vec![1.0]).unwrap();
        let pop = sample_population(&dist, 1_000_000, 7).unwrap();
        let n = pop.len() as f64;
        let mean = pop.iter().map(|t| t[0]).sum::<f64>() / n;
        let var = pop.iter().map(|t| (t[0] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.01, "sample mean {mean}");
        assert!((var.sqrt() - 1.0).abs() < 0.01, "sample stddev {}", var.sqrt());
    }

    #[test]
    fn count_below_two_is_rejected() {
        let dist = SearchDistribution::standard(2);
        assert!(sample_population(&dist, 1, 0).is_err());
        assert!(sample_epsilons(2, 0, 0, false).is_err());
    }

    #[test]
    fn zero_or_negative_stddev_is_rejected() {
        assert!(SearchDistribution::new(vec![0.0], vec![0.0]).is_err());
        assert!(SearchDistribution::new(vec![0.0], vec![-1.0]).is_err());
        assert!(SearchDistribution::new(vec![0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn antithetic_pairs_mirror() {
        let eps = sample_epsilons(3, 6, 9, true).unwrap();
        for p in 0..3 {
            for j in 0..3 {
                assert_eq!(eps[2 * p][j], -eps[2 * p + 1][j]);
            }
        }
        // Odd count: last vector unpaired.
        let eps = sample_epsilons(3, 5, 9, true).unwrap();
        assert_eq!(eps.len(), 5);
    }
}
