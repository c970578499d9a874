//! Mode-dispatching optimizer facade used by the training harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::adam::AdamState;
use crate::search::config::{Mode, OptimizerConfig};
use crate::search::distribution::{
    sample_epsilons, sample_population, ScoredSample, SearchDistribution,
};
use crate::search::shaping::{positive_rank_shape, rank_shape};
use crate::search::update::{cem_update, es_update, gass_update, UpdateReport};

/// Serializable optimizer state; exactly what a checkpoint stores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OptimizerState {
    Es { theta: Vec<f64>, adam: AdamState },
    Gass { dist: SearchDistribution },
    Cem { dist: SearchDistribution },
}

impl OptimizerState {
    pub fn mode(&self) -> Mode {
        match self {
            OptimizerState::Es { .. } => Mode::Es,
            OptimizerState::Gass { .. } => Mode::Gass,
            OptimizerState::Cem { .. } => Mode::Cem,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean().len()
    }

    /// Current central parameter vector (theta for ES, mu otherwise).
    pub fn mean(&self) -> &[f64] {
        match self {
            OptimizerState::Es { theta, .. } => theta,
            OptimizerState::Gass { dist } | OptimizerState::Cem { dist } => dist.mean(),
        }
    }
}

/// A proposed population: candidate parameter vectors plus, for ES, the
/// noise vectors that generated them. Pass it back to [`Optimizer::update`]
/// together with the returns, in proposal order.
#[derive(Debug, Clone)]
pub struct Population {
    thetas: Vec<Vec<f64>>,
    epsilons: Option<Vec<Vec<f64>>>,
}

impl Population {
    pub fn thetas(&self) -> &[Vec<f64>] {
        &self.thetas
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

/// One optimizer instance: configuration plus current state. Owned by a
/// single coordinator and updated serially; all methods are deterministic
/// functions of their arguments.
#[derive(Debug, Clone)]
pub struct Optimizer {
    config: OptimizerConfig,
    state: OptimizerState,
}

impl Optimizer {
    /// Fresh optimizer centered at `init`. ES starts with zeroed ADAM
    /// moments; GASS/CEM start from an isotropic `initial_sigma` Gaussian.
    pub fn new(config: OptimizerConfig, init: Vec<f64>) -> Result<Self> {
        config.validate()?;
        let state = match config.mode {
            Mode::Es => OptimizerState::Es {
                adam: AdamState::new(init.len()),
                theta: init,
            },
            Mode::Gass => OptimizerState::Gass {
                dist: SearchDistribution::isotropic(init, config.initial_sigma)?,
            },
            Mode::Cem => OptimizerState::Cem {
                dist: SearchDistribution::isotropic(init, config.initial_sigma)?,
            },
        };
        Ok(Optimizer { config, state })
    }

    /// Resume from a checkpointed state.
    pub fn from_state(config: OptimizerConfig, state: OptimizerState) -> Result<Self> {
        config.validate()?;
        if config.mode != state.mode() {
            return Err(Error::invalid_config(format!(
                "configured mode {} does not match checkpoint mode {}",
                config.mode,
                state.mode()
            )));
        }
        Ok(Optimizer { config, state })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn state(&self) -> &OptimizerState {
        &self.state
    }

    pub fn into_state(self) -> OptimizerState {
        self.state
    }

    pub fn mean(&self) -> &[f64] {
        self.state.mean()
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// Propose `count` candidate parameter vectors from substreams keyed by
    /// `(seed, sample index)`.
    pub fn propose(&self, count: usize, seed: u64) -> Result<Population> {
        match &self.state {
            OptimizerState::Es { theta, .. } => {
                let eps = sample_epsilons(theta.len(), count, seed, self.config.antithetic)?;
                let thetas = eps
                    .iter()
                    .map(|e| {
                        theta
                            .iter()
                            .zip(e)
                            .map(|(t, n)| t + self.config.gamma * n)
                            .collect()
                    })
                    .collect();
                Ok(Population { thetas, epsilons: Some(eps) })
            }
            OptimizerState::Gass { dist } | OptimizerState::Cem { dist } => {
                let thetas = if self.config.antithetic {
                    let eps = sample_epsilons(dist.dim(), count, seed, true)?;
                    eps.iter()
                        .map(|e| {
                            dist.mean()
                                .iter()
                                .zip(dist.stddev())
                                .zip(e)
                                .map(|((m, s), n)| m + s * n)
                                .collect()
                        })
                        .collect()
                } else {
                    sample_population(dist, count, seed)?
                };
                Ok(Population { thetas, epsilons: None })
            }
        }
    }

    /// Apply one update from the returns of a proposed population.
    pub fn update(
        &mut self,
        iteration: u64,
        population: &Population,
        returns: &[f64],
        alpha: f64,
    ) -> Result<UpdateReport> {
        if returns.len() != population.len() {
            return Err(Error::invalid_argument(format!(
                "{} returns for a population of {}",
                returns.len(),
                population.len()
            )));
        }
        let before: Vec<f64> = self.state.mean().to_vec();
        match &mut self.state {
            OptimizerState::Es { theta, adam } => {
                let weights = rank_shape(returns)?;
                let eps = population
                    .epsilons
                    .as_ref()
                    .ok_or_else(|| Error::invalid_state("population lacks ES noise vectors"))?;
                let adam_cfg = self.config.adam();
                *theta = es_update(
                    theta,
                    eps,
                    &weights,
                    alpha,
                    self.config.gamma,
                    Some((adam, &adam_cfg)),
                )?;
            }
            OptimizerState::Gass { dist } => {
                let weights = positive_rank_shape(returns)?;
                let samples = scored_samples(population, returns, &weights);
                *dist = gass_update(dist, &samples, alpha, self.config.gamma)?;
            }
            OptimizerState::Cem { dist } => {
                let samples = scored_samples(population, returns, returns);
                *dist = cem_update(dist, &samples, self.config.elite_frac)?;
            }
        }
        let update_norm = self
            .state
            .mean()
            .iter()
            .zip(&before)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let mean_return = returns.iter().sum::<f64>() / returns.len() as f64;
        let max_return = returns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(UpdateReport {
            iteration,
            alpha,
            sample_size: returns.len(),
            mean_return,
            max_return,
            update_norm,
        })
    }
}

fn scored_samples(population: &Population, returns: &[f64], weights: &[f64]) -> Vec<ScoredSample> {
    population
        .thetas
        .iter()
        .zip(returns)
        .zip(weights)
        .map(|((theta, &raw_return), &shaped_weight)| ScoredSample {
            theta: theta.clone(),
            raw_return,
            shaped_weight,
        })
        .collect()
}
