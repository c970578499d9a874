//! Evaluation of unperturbed parameters over seeded episodes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::PolicyParams;
use crate::rng;
use crate::scenario::{PolicyKind, ScenarioConfig};
use crate::sim::{run_episode, TeamParams};

/// Order statistics of a batch of episode scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub min: f64,
    pub max: f64,
}

impl ScoreStats {
    pub fn from_scores(scores: &[f64]) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::invalid_argument("cannot summarize zero scores"));
        }
        let mut sorted = scores.to_vec();
        sorted.sort_by(|a, b| a.total_cmp(b));
        Ok(ScoreStats {
            n: sorted.len(),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            median: quantile(&sorted, 0.5),
            q25: quantile(&sorted, 0.25),
            q75: quantile(&sorted, 0.75),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Linear-interpolation quantile of an already-sorted slice.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Run `n_episodes` seeded episodes with each learned team bound to its
/// entry of `team_params`; returns per-learned-team score statistics in
/// team order. Episode `j` uses the seed derived from `(seed, j)`.
pub fn evaluate_teams(
    team_params: &[Option<&PolicyParams>],
    scenario: &ScenarioConfig,
    n_episodes: usize,
    seed: u64,
) -> Result<Vec<ScoreStats>> {
    if n_episodes < 1 {
        return Err(Error::invalid_argument("n_episodes must be at least 1"));
    }
    if team_params.len() != scenario.teams.len() {
        return Err(Error::invalid_argument(format!(
            "{} parameter slots for {} teams",
            team_params.len(),
            scenario.teams.len()
        )));
    }
    let bindings: Vec<TeamParams> = scenario
        .teams
        .iter()
        .zip(team_params)
        .map(|(spec, p)| match (spec.policy, p) {
            (PolicyKind::Learned, Some(params)) => Ok(TeamParams::Learned(*params)),
            (PolicyKind::ScriptedDefender, None) => Ok(TeamParams::Scripted),
            (kind, _) => Err(Error::invalid_argument(format!(
                "parameter slot does not match policy kind {kind:?}"
            ))),
        })
        .collect::<Result<_>>()?;

    let results: Vec<Vec<f64>> = (0..n_episodes)
        .into_par_iter()
        .map(|j| {
            run_episode(scenario, &bindings, rng::derive_seed(seed, &[j as u64]))
                .map(|r| r.team_returns)
        })
        .collect::<Result<_>>()?;

    scenario
        .learned_team_indices()
        .into_iter()
        .map(|team| {
            let scores: Vec<f64> = results.iter().map(|r| r[team]).collect();
            ScoreStats::from_scores(&scores)
        })
        .collect()
}

/// Evaluate one parameter vector: every learned team in the scenario uses
/// `params` (a two-learned-team scenario becomes a mirror match). Returns
/// the statistics of the first learned team.
pub fn evaluate(
    params: &PolicyParams,
    scenario: &ScenarioConfig,
    n_episodes: usize,
    seed: u64,
) -> Result<ScoreStats> {
    let slots: Vec<Option<&PolicyParams>> = scenario
        .teams
        .iter()
        .map(|t| (t.policy == PolicyKind::Learned).then_some(params))
        .collect();
    let stats = evaluate_teams(&slots, scenario, n_episodes, seed)?;
    stats
        .into_iter()
        .next()
        .ok_or_else(|| Error::invalid_config("scenario has no learned team"))
}
