//! Training loop: perturbation sampling, parallel episode evaluation with a
//! deterministic reduction, optimizer updates, self-play, and evaluation.

mod evaluate;
mod train;

pub use evaluate::{evaluate, evaluate_teams, ScoreStats};
pub use train::{train_selfplay, train_single, Resume, TrainHooks, TrainOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{OptimizerConfig, UpdateReport};

/// Full specification of one training run. Everything a run produces is a
/// pure function of this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub optimizer: OptimizerConfig,
    /// Built-in scenario name.
    pub scenario: String,
    pub scale: f64,
    /// Policy layer widths `[input, hidden..., output]`.
    pub policy_shape: Vec<usize>,
    /// Number of optimizer iterations K.
    pub iterations: u64,
    /// Episodes averaged per perturbation.
    pub episodes_per_perturbation: usize,
    /// Evaluate the unperturbed parameters every this many iterations
    /// (0 disables evaluation).
    pub eval_cadence: u64,
    pub eval_episodes: usize,
    /// Emit a checkpoint every this many iterations (a final checkpoint is
    /// always emitted; 0 disables intermediate ones).
    pub checkpoint_cadence: u64,
    pub master_seed: u64,
    /// Worker threads for episode evaluation; 0 = all available cores. The
    /// trained output never depends on this value.
    pub parallelism: usize,
    /// Reuse one environment seed per iteration across all perturbations.
    pub common_random_numbers: bool,
    /// Standard deviation of the random initial parameters (0 = zeros).
    pub init_stddev: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            optimizer: OptimizerConfig::default(),
            scenario: "base_attack".into(),
            scale: 0.1,
            policy_shape: vec![102, 32, 3],
            iterations: 100,
            episodes_per_perturbation: 1,
            eval_cadence: 1,
            eval_episodes: 2,
            checkpoint_cadence: 25,
            master_seed: 7,
            parallelism: 0,
            common_random_numbers: false,
            init_stddev: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.optimizer.validate()?;
        if self.iterations < 1 {
            return Err(Error::invalid_config("iterations must be at least 1"));
        }
        if self.episodes_per_perturbation < 1 {
            return Err(Error::invalid_config("episodes_per_perturbation must be at least 1"));
        }
        if self.eval_cadence > 0 && self.eval_episodes < 1 {
            return Err(Error::invalid_config("eval_episodes must be at least 1"));
        }
        if self.init_stddev < 0.0 {
            return Err(Error::invalid_config("init_stddev must be nonnegative"));
        }
        Ok(())
    }

    pub fn worker_threads(&self) -> usize {
        if self.parallelism == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.parallelism
        }
    }
}

/// Per-team record of one training iteration.
#[derive(Debug, Clone, Serialize)]
pub struct TeamIteration {
    /// Raw returns of the perturbed policies, in perturbation order.
    pub returns: Vec<f64>,
    pub report: UpdateReport,
}

/// One training iteration: shared schedule values plus per-team results and
/// optional evaluation statistics of the unperturbed parameters.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub k: u64,
    pub alpha: f64,
    pub sample_size: usize,
    pub teams: Vec<TeamIteration>,
    pub eval: Option<Vec<ScoreStats>>,
}
