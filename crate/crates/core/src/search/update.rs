//! GASS, ES, and CEM update rules.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::search::adam::{adam_step, AdamConfig, AdamState};
use crate::search::distribution::{ScoredSample, SearchDistribution};
use crate::search::variance::estimate_variance_2x2;

/// Floor for recovered standard deviations. A natural-parameter step can
/// push a coordinate's variance to zero or below; it is clamped here so the
/// distribution stays valid.
pub const SIGMA_MIN: f64 = 1e-6;

/// Per-iteration summary emitted by the optimizer.
#[derive(Debug, Clone, Serialize)]
pub struct UpdateReport {
    pub iteration: u64,
    pub alpha: f64,
    pub sample_size: usize,
    pub mean_return: f64,
    pub max_return: f64,
    pub update_norm: f64,
}

fn check_samples(dist: &SearchDistribution, samples: &[ScoredSample]) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::invalid_argument(format!(
            "update needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    for s in samples {
        if s.theta.len() != dist.dim() {
            return Err(Error::invalid_argument(format!(
                "sample dimension {} does not match distribution dimension {}",
                s.theta.len(),
                dist.dim()
            )));
        }
    }
    Ok(())
}

/// Recover `(mu, sigma)` from natural parameters `(w1, w2)`.
///
/// `sigma^2 = -1/(2 w2)` whenever that is valid; otherwise (w2 >= 0, or a
/// variance below the floor) the variance is clamped to `SIGMA_MIN^2`. The
/// mean is recovered as `w1 * sigma^2` using the clamped variance, keeping
/// the returned pair a consistent point of the natural-parameter map.
fn recover_mean_stddev(w1: f64, w2: f64) -> (f64, f64) {
    let mut var = if w2 < 0.0 { -1.0 / (2.0 * w2) } else { f64::NAN };
    if !(var > SIGMA_MIN * SIGMA_MIN) {
        var = SIGMA_MIN * SIGMA_MIN;
    }
    (w1 * var, var.sqrt())
}

/// Second-order natural-parameter ascent, independently per coordinate.
///
/// For each coordinate: form the 2x2 variance `V = V_hat + gamma*I` of the
/// sufficient statistics, accumulate the weighted residual
/// `sum_i w_i ([theta_i, theta_i^2] - [mu, sigma^2 + mu^2])`, take the step
/// `alpha/eta * V^-1 * residual` on `omega = [mu/sigma^2, -1/(2 sigma^2)]`,
/// and convert back. `eta = sum_i w_i` must be positive, which
/// [`positive_rank_shape`](crate::search::positive_rank_shape) guarantees.
pub fn gass_update(
    dist: &SearchDistribution,
    samples: &[ScoredSample],
    alpha: f64,
    gamma: f64,
) -> Result<SearchDistribution> {
    check_samples(dist, samples)?;
    if !(gamma > 0.0) {
        return Err(Error::invalid_argument("gamma must be positive"));
    }
    let eta: f64 = samples.iter().map(|s| s.shaped_weight).sum();
    if !(eta > 0.0) {
        return Err(Error::invalid_state(format!(
            "normalizer eta = {eta} is not positive; GASS requires a strictly positive shaping function"
        )));
    }

    let n = dist.dim();
    let mut new_mean = Vec::with_capacity(n);
    let mut new_stddev = Vec::with_capacity(n);
    let mut coord = Vec::with_capacity(samples.len());
    for j in 0..n {
        coord.clear();
        coord.extend(samples.iter().map(|s| s.theta[j]));
        let vhat = estimate_variance_2x2(&coord)?;
        let v = [[vhat[0][0] + gamma, vhat[0][1]], [vhat[1][0], vhat[1][1] + gamma]];

        let mu = dist.mean()[j];
        let sigma = dist.stddev()[j];
        let second_moment = sigma * sigma + mu * mu;
        let mut r0 = 0.0;
        let mut r1 = 0.0;
        for s in samples {
            let t = s.theta[j];
            r0 += s.shaped_weight * (t - mu);
            r1 += s.shaped_weight * (t * t - second_moment);
        }

        // Solve V x = r; det > 0 because V_hat is PSD and gamma > 0.
        let det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
        let x0 = (v[1][1] * r0 - v[0][1] * r1) / det;
        let x1 = (-v[1][0] * r0 + v[0][0] * r1) / det;

        let scale = alpha / eta;
        let w1 = mu / (sigma * sigma) + scale * x0;
        let w2 = -0.5 / (sigma * sigma) + scale * x1;
        let (m, s) = recover_mean_stddev(w1, w2);
        new_mean.push(m);
        new_stddev.push(s);
    }
    SearchDistribution::new(new_mean, new_stddev)
}

/// First-order mean-only variant of the GASS step.
///
/// The variance preconditioner is replaced by `(1/gamma^2) * I` on the mean
/// block, the normalizer by the sample count, and sigma is left untouched:
///
/// ```text
/// mu' = mu + alpha/(N*gamma^2) * sum_i w_i (theta_i - mu)
/// ```
///
/// With samples `theta_i = mu + gamma*eps_i` and the same weights this
/// equals the ADAM-free [`es_update`] step exactly, which is how the ES
/// algorithm drops out of the GASS rule when the variance terms are ignored.
pub fn gass_update_first_order(
    dist: &SearchDistribution,
    samples: &[ScoredSample],
    alpha: f64,
    gamma: f64,
) -> Result<SearchDistribution> {
    check_samples(dist, samples)?;
    if !(gamma > 0.0) {
        return Err(Error::invalid_argument("gamma must be positive"));
    }
    let n_samples = samples.len() as f64;
    let mut new_mean = Vec::with_capacity(dist.dim());
    for j in 0..dist.dim() {
        let mu = dist.mean()[j];
        let mut acc = 0.0;
        for s in samples {
            acc += s.shaped_weight * (s.theta[j] - mu);
        }
        new_mean.push(mu + alpha / (n_samples * gamma * gamma) * acc);
    }
    SearchDistribution::new(new_mean, dist.stddev().to_vec())
}

/// ES step: gradient estimate `g = 1/(N*gamma) * sum_i w_i eps_i`, applied
/// either through ADAM (when a state is supplied) or directly as
/// `theta + alpha*g`.
pub fn es_update(
    theta: &[f64],
    epsilons: &[Vec<f64>],
    weights: &[f64],
    alpha: f64,
    gamma: f64,
    adam: Option<(&mut AdamState, &AdamConfig)>,
) -> Result<Vec<f64>> {
    if epsilons.len() < 2 {
        return Err(Error::invalid_argument(format!(
            "update needs at least 2 samples, got {}",
            epsilons.len()
        )));
    }
    if epsilons.len() != weights.len() {
        return Err(Error::invalid_argument(format!(
            "{} noise vectors but {} weights",
            epsilons.len(),
            weights.len()
        )));
    }
    if let Some(eps) = epsilons.iter().find(|e| e.len() != theta.len()) {
        return Err(Error::invalid_argument(format!(
            "noise dimension {} does not match parameter dimension {}",
            eps.len(),
            theta.len()
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::invalid_argument("gamma must be positive"));
    }

    let scale = 1.0 / (epsilons.len() as f64 * gamma);
    let mut grad = vec![0.0; theta.len()];
    for (eps, &w) in epsilons.iter().zip(weights) {
        for (g, &e) in grad.iter_mut().zip(eps) {
            *g += w * e;
        }
    }
    for g in &mut grad {
        *g *= scale;
    }

    let step: Vec<f64> = match adam {
        Some((state, config)) => adam_step(&grad, alpha, state, config)?,
        None => grad.iter().map(|g| alpha * g).collect(),
    };
    Ok(theta.iter().zip(&step).map(|(t, s)| t + s).collect())
}

/// CEM: refit the Gaussian to the top `ceil(elite_frac * N)` samples by raw
/// return (ties by ascending input index). Per coordinate the new mean and
/// stddev are the elite sample mean and (N-1)-normalized sample stddev,
/// floored at [`SIGMA_MIN`].
pub fn cem_update(
    dist: &SearchDistribution,
    samples: &[ScoredSample],
    elite_frac: f64,
) -> Result<SearchDistribution> {
    check_samples(dist, samples)?;
    if !(elite_frac > 0.0 && elite_frac <= 1.0) {
        return Err(Error::invalid_argument(format!(
            "elite_frac must lie in (0, 1], got {elite_frac}"
        )));
    }
    if samples.iter().any(|s| s.raw_return.is_nan()) {
        return Err(Error::invalid_argument("NaN return passed to cem_update"));
    }
    // Small epsilon absorbs representation error (0.2 * 10 slightly above 2).
    let elite_count = (elite_frac * samples.len() as f64 - 1e-9).ceil().max(1.0) as usize;
    let elite_count = elite_count.min(samples.len());
    if elite_count < 2 {
        return Err(Error::invalid_argument(format!(
            "elite count {elite_count} is below 2; raise elite_frac or the sample size"
        )));
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        samples[b]
            .raw_return
            .partial_cmp(&samples[a].raw_return)
            .unwrap()
            .then(a.cmp(&b))
    });
    let elites = &order[..elite_count];

    let ec = elite_count as f64;
    let mut new_mean = Vec::with_capacity(dist.dim());
    let mut new_stddev = Vec::with_capacity(dist.dim());
    for j in 0..dist.dim() {
        let mean = elites.iter().map(|&i| samples[i].theta[j]).sum::<f64>() / ec;
        let var = elites
            .iter()
            .map(|&i| (samples[i].theta[j] - mean).powi(2))
            .sum::<f64>()
            / (ec - 1.0);
        new_mean.push(mean);
        new_stddev.push(var.sqrt().max(SIGMA_MIN));
    }
    SearchDistribution::new(new_mean, new_stddev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::shaping::{positive_rank_shape, rank_shape};
    use crate::search::{sample_population, sample_epsilons};

    fn scored(thetas: Vec<Vec<f64>>, returns: Vec<f64>, weights: Vec<f64>) -> Vec<ScoredSample> {
        thetas
            .into_iter()
            .zip(returns)
            .zip(weights)
            .map(|((theta, raw_return), shaped_weight)| ScoredSample {
                theta,
                raw_return,
                shaped_weight,
            })
            .collect()
    }

    #[test]
    fn gass_update_near_fixed_point_is_bounded() {
        // All samples exactly at the mean: the residual reduces to
        // [0, -sigma^2] per coordinate, so the mean moves by at most
        // alpha*sigma^2/gamma * (sum w)/eta = alpha*sigma^2/gamma.
        let sigma = 0.1;
        let alpha = 0.05;
        let gamma = 0.5;
        let dist = SearchDistribution::new(vec![1.0, -2.0], vec![sigma, sigma]).unwrap();
        let samples = scored(
            vec![vec![1.0, -2.0]; 4],
            vec![0.0; 4],
            vec![0.3, 0.3, 0.3, 0.3],
        );
        let next = gass_update(&dist, &samples, alpha, gamma).unwrap();
        let bound = alpha * sigma * sigma / gamma;
        for j in 0..2 {
            assert!(
                (next.mean()[j] - dist.mean()[j]).abs() <= bound + 1e-12,
                "moved {} > bound {bound}",
                (next.mean()[j] - dist.mean()[j]).abs()
            );
        }
    }

    #[test]
    fn gass_moves_mean_toward_optimum() {
        // J(theta) = -(theta - 3)^2, mu = 0: the mean must move right in
        // at least 19 of 20 seeds.
        let mut passes = 0;
        for seed in 0..20u64 {
            let dist = SearchDistribution::new(vec![0.0], vec![1.0]).unwrap();
            let thetas = sample_population(&dist, 200, seed).unwrap();
            let returns: Vec<f64> = thetas.iter().map(|t| -(t[0] - 3.0).powi(2)).collect();
            let weights = positive_rank_shape(&returns).unwrap();
            let samples = scored(thetas, returns, weights);
            let next = gass_update(&dist, &samples, 0.05, 0.1).unwrap();
            if next.mean()[0] > 0.0 {
                passes += 1;
            }
        }
        assert!(passes >= 19, "only {passes}/20 seeds moved toward the optimum");
    }

    /// Independent straight-line transcription of the per-coordinate rule,
    /// scalar case, used as the oracle for a hand-picked 3-sample instance.
    fn gass_oracle_1d(
        mu: f64,
        sigma: f64,
        thetas: &[f64],
        weights: &[f64],
        alpha: f64,
        gamma: f64,
    ) -> (f64, f64) {
        let n = thetas.len() as f64;
        let t: Vec<[f64; 2]> = thetas.iter().map(|&x| [x, x * x]).collect();
        let mut vhat = [[0.0; 2]; 2];
        for ti in &t {
            for r in 0..2 {
                for c in 0..2 {
                    vhat[r][c] += ti[r] * ti[c];
                }
            }
        }
        let mut s = [0.0; 2];
        for ti in &t {
            s[0] += ti[0];
            s[1] += ti[1];
        }
        for r in 0..2 {
            for c in 0..2 {
                vhat[r][c] = vhat[r][c] / (n - 1.0) - s[r] * s[c] / (n * n - n);
            }
        }
        let v = [[vhat[0][0] + gamma, vhat[0][1]], [vhat[1][0], vhat[1][1] + gamma]];
        let eta: f64 = weights.iter().sum();
        let mut r = [0.0; 2];
        for (ti, &w) in t.iter().zip(weights) {
            r[0] += w * (ti[0] - mu);
            r[1] += w * (ti[1] - (sigma * sigma + mu * mu));
        }
        let det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
        let x = [
            (v[1][1] * r[0] - v[0][1] * r[1]) / det,
            (-v[1][0] * r[0] + v[0][0] * r[1]) / det,
        ];
        let w1 = mu / (sigma * sigma) + alpha / eta * x[0];
        let w2 = -0.5 / (sigma * sigma) + alpha / eta * x[1];
        let mut var = if w2 < 0.0 { -1.0 / (2.0 * w2) } else { f64::NAN };
        if !(var > SIGMA_MIN * SIGMA_MIN) {
            var = SIGMA_MIN * SIGMA_MIN;
        }
        (w1 * var, var.sqrt())
    }

    #[test]
    fn gass_matches_reference_transcription() {
        let thetas = [0.4, -0.9, 1.7];
        let weights = [0.1, 0.6, 1.1];
        let dist = SearchDistribution::new(vec![0.2], vec![0.8]).unwrap();
        let samples = scored(
            thetas.iter().map(|&t| vec![t]).collect(),
            vec![0.0; 3],
            weights.to_vec(),
        );
        let next = gass_update(&dist, &samples, 0.3, 0.05).unwrap();
        let (mu, sigma) = gass_oracle_1d(0.2, 0.8, &thetas, &weights, 0.3, 0.05);
        assert!((next.mean()[0] - mu).abs() < 1e-10, "{} vs {mu}", next.mean()[0]);
        assert!((next.stddev()[0] - sigma).abs() < 1e-10);
    }

    #[test]
    fn gass_rejects_nonpositive_normalizer() {
        let dist = SearchDistribution::new(vec![0.0], vec![1.0]).unwrap();
        let samples = scored(vec![vec![0.1], vec![-0.1]], vec![0.0; 2], vec![-0.5, 0.5]);
        let err = gass_update(&dist, &samples, 0.1, 0.1).unwrap_err();
        assert!(matches!(err, Error::InvalidState(_)));
    }

    #[test]
    fn es_antisymmetric_cancellation() {
        let theta = vec![1.0, 2.0];
        let eps = vec![vec![0.3, -0.7], vec![-0.3, 0.7]];
        let next = es_update(&theta, &eps, &[0.4, 0.4], 0.5, 0.1, None).unwrap();
        assert_eq!(next, theta);
    }

    #[test]
    fn es_hand_case() {
        let theta = vec![0.0, 0.0];
        let eps = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        let next = es_update(&theta, &eps, &[0.5, -0.5], 1.0, 0.5, None).unwrap();
        assert!((next[0] - 1.0).abs() < 1e-12, "{next:?}");
        assert!(next[1].abs() < 1e-12);
    }

    #[test]
    fn es_estimates_smoothed_gradient_direction() {
        // J(theta) = -||theta||^2 at theta0 = [1, 1]; the estimate must point
        // roughly along -theta0.
        let theta = vec![1.0, 1.0];
        let gamma = 0.1;
        let eps = sample_epsilons(2, 10_000, 11, false).unwrap();
        let returns: Vec<f64> = eps
            .iter()
            .map(|e| {
                let p0 = theta[0] + gamma * e[0];
                let p1 = theta[1] + gamma * e[1];
                -(p0 * p0 + p1 * p1)
            })
            .collect();
        let w = rank_shape(&returns).unwrap();
        let next = es_update(&theta, &eps, &w, 1.0, gamma, None).unwrap();
        let g = [next[0] - theta[0], next[1] - theta[1]];
        let target = [-theta[0], -theta[1]];
        let cos = (g[0] * target[0] + g[1] * target[1])
            / ((g[0] * g[0] + g[1] * g[1]).sqrt() * (target[0] * target[0] + target[1] * target[1]).sqrt());
        assert!(cos > 0.95, "cosine {cos}");
    }

    #[test]
    fn es_rejects_mismatched_lengths() {
        let theta = vec![0.0];
        assert!(es_update(&theta, &[vec![1.0], vec![1.0]], &[0.1], 0.1, 0.1, None).is_err());
        assert!(es_update(&theta, &[vec![1.0, 2.0], vec![1.0, 2.0]], &[0.1, 0.2], 0.1, 0.1, None).is_err());
    }

    #[test]
    fn cem_full_population_refit() {
        let thetas = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let dist = SearchDistribution::new(vec![0.0], vec![1.0]).unwrap();
        let samples = scored(thetas, vec![5.0, 6.0, 7.0, 8.0], vec![0.0; 4]);
        let next = cem_update(&dist, &samples, 1.0).unwrap();
        assert!((next.mean()[0] - 1.5).abs() < 1e-12);
        // (N-1)-normalized stddev of {0,1,2,3}.
        let want = (f64::from(5) / 3.0).sqrt();
        assert!((next.stddev()[0] - want).abs() < 1e-12);
    }

    #[test]
    fn cem_hand_case_top_half() {
        let thetas = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let dist = SearchDistribution::new(vec![0.0], vec![1.0]).unwrap();
        let samples = scored(thetas, vec![0.0, 1.0, 2.0, 3.0], vec![0.0; 4]);
        let next = cem_update(&dist, &samples, 0.5).unwrap();
        assert!((next.mean()[0] - 2.5).abs() < 1e-12);
        assert!((next.stddev()[0] - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cem_identical_elites_floor_sigma() {
        let dist = SearchDistribution::new(vec![0.0], vec![1.0]).unwrap();
        let samples = scored(
            vec![vec![2.0], vec![2.0], vec![0.0]],
            vec![9.0, 9.0, 1.0],
            vec![0.0; 3],
        );
        let next = cem_update(&dist, &samples, 0.5).unwrap();
        assert_eq!(next.stddev()[0], SIGMA_MIN);
        assert!((next.mean()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cem_rejects_tiny_elite_sets() {
        let dist = SearchDistribution::new(vec![0.0], vec![1.0]).unwrap();
        let samples = scored(vec![vec![0.0], vec![1.0]], vec![0.0, 1.0], vec![0.0; 2]);
        assert!(cem_update(&dist, &samples, 0.4).is_err());
    }
}
