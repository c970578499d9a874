//! Single-team training and two-team self-play.
//!
//! Seed layout: with master seed `m`, iteration `k` draws its perturbations
//! from `(m, [PERT, k, team])` and episode `i` (repeat `e`) from
//! `(m, [EPISODE, k, i, e])`, so no two episodes in a run share an
//! environment seed and a resumed run replays exactly the same draws.
//! Episode results are collected into perturbation-index order before any
//! reduction, which makes the trained output independent of the worker
//! thread count.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::evaluate::{evaluate_teams, ScoreStats};
use crate::harness::{IterationRecord, TeamIteration, TrainConfig};
use crate::policy::{PolicyParams, PolicyShape};
use crate::rng;
use crate::scenario::{self, PolicyKind, ScenarioConfig};
use crate::search::{schedule, Optimizer, OptimizerState};
use crate::sim::{run_episode, TeamParams};

const PURPOSE_INIT: u64 = 10;
const PURPOSE_PERT: u64 = 11;
const PURPOSE_EPISODE: u64 = 12;
const PURPOSE_EVAL: u64 = 13;

/// Metrics and checkpoint callbacks; both optional.
#[derive(Default)]
pub struct TrainHooks<'a> {
    pub on_record: Option<&'a mut dyn FnMut(&IterationRecord) -> Result<()>>,
    pub on_checkpoint: Option<&'a mut dyn FnMut(u64, &[OptimizerState]) -> Result<()>>,
}

/// Checkpoint to resume from: the iteration it was taken at plus one state
/// per learned team.
#[derive(Debug, Clone)]
pub struct Resume {
    pub iteration: u64,
    pub states: Vec<OptimizerState>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Final optimizer state per learned team.
    pub states: Vec<OptimizerState>,
    pub records: Vec<IterationRecord>,
}

fn initial_vector(config: &TrainConfig, dim: usize, team: u64) -> Vec<f64> {
    if config.init_stddev > 0.0 {
        let mut stream = rng::stream(config.master_seed, &[PURPOSE_INIT, team]);
        (0..dim)
            .map(|_| config.init_stddev * stream.sample::<f64, _>(StandardNormal))
            .collect()
    } else {
        vec![0.0; dim]
    }
}

fn build_pool(config: &TrainConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.worker_threads())
        .build()
        .map_err(|e| Error::invalid_config(format!("failed to build worker pool: {e}")))
}

struct Session {
    config: TrainConfig,
    scenario: ScenarioConfig,
    shape: PolicyShape,
    learned_teams: Vec<usize>,
    optimizers: Vec<Optimizer>,
    start_iteration: u64,
}

impl Session {
    fn new(config: &TrainConfig, resume: Option<Resume>, selfplay: bool) -> Result<Self> {
        config.validate()?;
        let scenario = scenario::by_name(&config.scenario, config.scale)?;
        let learned_teams = scenario.learned_team_indices();
        let expected = if selfplay { 2 } else { 1 };
        if learned_teams.len() != expected {
            return Err(Error::invalid_config(format!(
                "scenario '{}' has {} learned team(s); this loop needs exactly {expected}",
                config.scenario,
                learned_teams.len()
            )));
        }
        let shape = PolicyShape::new(config.policy_shape.clone())?;
        let dim = shape.param_count();

        let (optimizers, start_iteration) = match resume {
            Some(resume) => {
                if resume.states.len() != expected {
                    return Err(Error::invalid_config(format!(
                        "resume carries {} state(s), need {expected}",
                        resume.states.len()
                    )));
                }
                let optimizers = resume
                    .states
                    .into_iter()
                    .map(|state| {
                        if state.dim() != dim {
                            return Err(Error::invalid_config(format!(
                                "checkpoint dimension {} does not match policy shape (expects {dim})",
                                state.dim()
                            )));
                        }
                        Optimizer::from_state(config.optimizer.clone(), state)
                    })
                    .collect::<Result<_>>()?;
                (optimizers, resume.iteration)
            }
            None => {
                let optimizers = (0..expected)
                    .map(|team| {
                        Optimizer::new(
                            config.optimizer.clone(),
                            initial_vector(config, dim, team as u64),
                        )
                    })
                    .collect::<Result<_>>()?;
                (optimizers, 0)
            }
        };

        Ok(Session {
            config: config.clone(),
            scenario,
            shape,
            learned_teams,
            optimizers,
            start_iteration,
        })
    }

    /// Bind per-team policies for one episode: learned team `t` gets
    /// `per_team[t]`, scripted teams get none.
    fn bindings<'a>(&self, per_team: &'a [PolicyParams]) -> Vec<TeamParams<'a>> {
        let mut slot = 0;
        self.scenario
            .teams
            .iter()
            .map(|spec| match spec.policy {
                PolicyKind::Learned => {
                    let b = TeamParams::Learned(&per_team[slot]);
                    slot += 1;
                    b
                }
                PolicyKind::ScriptedDefender => TeamParams::Scripted,
            })
            .collect()
    }

    fn episode_seed(&self, k: u64, i: usize, e: usize) -> u64 {
        let sample_tag = if self.config.common_random_numbers { 0 } else { i as u64 };
        rng::derive_seed(
            self.config.master_seed,
            &[PURPOSE_EPISODE, k, sample_tag, e as u64],
        )
    }

    fn eval_stats(&self, pool: &rayon::ThreadPool, k: u64) -> Result<Vec<ScoreStats>> {
        let means: Vec<PolicyParams> = self
            .optimizers
            .iter()
            .map(|opt| PolicyParams::new(self.shape.clone(), opt.mean().to_vec()))
            .collect::<Result<_>>()?;
        let mut slots: Vec<Option<&PolicyParams>> = vec![None; self.scenario.teams.len()];
        for (team, params) in self.learned_teams.iter().zip(&means) {
            slots[*team] = Some(params);
        }
        pool.install(|| {
            evaluate_teams(
                &slots,
                &self.scenario,
                self.config.eval_episodes,
                rng::derive_seed(self.config.master_seed, &[PURPOSE_EVAL, k]),
            )
        })
    }

    fn run(mut self, hooks: &mut TrainHooks) -> Result<TrainOutcome> {
        let pool = build_pool(&self.config)?;
        let mut records = Vec::new();
        let repeats = self.config.episodes_per_perturbation;

        for k in self.start_iteration + 1..=self.config.iterations {
            let (alpha, n) = schedule(k, &self.config.optimizer)?;

            // Per-team populations, drawn from per-team substreams.
            let populations: Vec<_> = self
                .optimizers
                .iter()
                .enumerate()
                .map(|(team, opt)| {
                    opt.propose(
                        n,
                        rng::derive_seed(self.config.master_seed, &[PURPOSE_PERT, k, team as u64]),
                    )
                })
                .collect::<Result<_>>()?;

            // Materialize policy parameters for every perturbation.
            let candidate_params: Vec<Vec<PolicyParams>> = (0..n)
                .map(|i| {
                    populations
                        .iter()
                        .map(|pop| {
                            PolicyParams::new(self.shape.clone(), pop.thetas()[i].clone())
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;

            // Episode i pits each team's i-th perturbation; returns come
            // back indexed by (perturbation, team).
            let per_sample: Vec<Vec<f64>> = pool.install(|| {
                (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let bindings = self.bindings(&candidate_params[i]);
                        let mut acc = vec![0.0; self.learned_teams.len()];
                        for e in 0..repeats {
                            let result =
                                run_episode(&self.scenario, &bindings, self.episode_seed(k, i, e))?;
                            for (slot, team) in self.learned_teams.iter().enumerate() {
                                acc[slot] += result.team_returns[*team];
                            }
                        }
                        for v in &mut acc {
                            *v /= repeats as f64;
                        }
                        Ok(acc)
                    })
                    .collect::<Result<_>>()
            })?;

            let mut teams = Vec::with_capacity(self.optimizers.len());
            for (slot, (optimizer, population)) in
                self.optimizers.iter_mut().zip(&populations).enumerate()
            {
                let returns: Vec<f64> = per_sample.iter().map(|r| r[slot]).collect();
                let report = optimizer.update(k, population, &returns, alpha)?;
                teams.push(TeamIteration { returns, report });
            }

            let eval = if self.config.eval_cadence > 0 && k % self.config.eval_cadence == 0 {
                Some(self.eval_stats(&pool, k)?)
            } else {
                None
            };

            let record = IterationRecord { k, alpha, sample_size: n, teams, eval };
            if let Some(on_record) = hooks.on_record.as_deref_mut() {
                on_record(&record)?;
            }
            let cadence_hit =
                self.config.checkpoint_cadence > 0 && k % self.config.checkpoint_cadence == 0;
            if cadence_hit || k == self.config.iterations {
                if let Some(on_checkpoint) = hooks.on_checkpoint.as_deref_mut() {
                    let states: Vec<OptimizerState> =
                        self.optimizers.iter().map(|o| o.state().clone()).collect();
                    on_checkpoint(k, &states)?;
                }
            }
            records.push(record);
        }

        Ok(TrainOutcome {
            states: self.optimizers.into_iter().map(Optimizer::into_state).collect(),
            records,
        })
    }
}

/// Train the single learned team of the configured scenario.
pub fn train_single(
    config: &TrainConfig,
    resume: Option<Resume>,
    hooks: &mut TrainHooks,
) -> Result<TrainOutcome> {
    Session::new(config, resume, false)?.run(hooks)
}

/// Concurrent self-play: both learned teams draw their own perturbations
/// each iteration, episode `i` pits team 0's i-th perturbation against team
/// 1's, and each team updates from its own returns.
pub fn train_selfplay(
    config: &TrainConfig,
    resume: Option<Resume>,
    hooks: &mut TrainHooks,
) -> Result<TrainOutcome> {
    Session::new(config, resume, true)?.run(hooks)
}
