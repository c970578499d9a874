//! The episode loop: per step, encode observations, run policies, apply the
//! safety override and PID, step dynamics, resolve weapons, then collisions.
//!
//! Determinism: all stochasticity flows from the episode seed through
//! per-(purpose, step, agent) substreams, and weapon shots are resolved
//! simultaneously against the post-dynamics snapshot, so the result is a
//! pure function of `(scenario, params, seed)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::policy::{
    encode_observation, forward, heading_from_output, normalize_observation, pid_control,
    safety_override, PidState, PolicyParams, OBS_LEN,
};
use crate::rng;
use crate::scenario::{spawn_agents, PolicyKind, ScenarioConfig};
use crate::sim::dynamics::{step_fixed_wing, step_quadcopter, StepNoise};
use crate::sim::{
    collision_check, defender_policy, weapons_check, Event, EventLog, TeamCounts, WorldState,
};

// Substream purposes.
const PURPOSE_SPAWN: u64 = 0;
const PURPOSE_WIND: u64 = 1;
const PURPOSE_CONTROL: u64 = 2;
const PURPOSE_WEAPON: u64 = 3;

/// Per-team policy binding for one episode.
#[derive(Debug, Clone, Copy)]
pub enum TeamParams<'a> {
    Learned(&'a PolicyParams),
    Scripted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeResult {
    /// Per-team raw return `J`.
    pub team_returns: Vec<f64>,
    pub team_counts: Vec<TeamCounts>,
    pub events: EventLog,
    pub steps: u32,
    pub duration: f64,
}

/// One trajectory sample: agents alive at the start of a step produce one
/// row each after that step (plus a t=0 row per agent).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub agent: u32,
    pub team: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub alive: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub rows: Vec<TraceRow>,
}

enum Command {
    FixedWing(crate::policy::ControlCommand),
    Quad(crate::sim::dynamics::QuadCommand),
}

pub fn run_episode(
    scenario: &ScenarioConfig,
    params: &[TeamParams],
    seed: u64,
) -> Result<EpisodeResult> {
    run(scenario, params, seed, None).map(|(result, _)| result)
}

/// As [`run_episode`], additionally recording the trajectory.
pub fn run_episode_traced(
    scenario: &ScenarioConfig,
    params: &[TeamParams],
    seed: u64,
) -> Result<(EpisodeResult, Trace)> {
    let mut trace = Trace::default();
    let (result, _) = run(scenario, params, seed, Some(&mut trace))?;
    Ok((result, trace))
}

fn validate_params(scenario: &ScenarioConfig, params: &[TeamParams]) -> Result<()> {
    if params.len() != scenario.teams.len() {
        return Err(Error::invalid_argument(format!(
            "{} parameter slots for {} teams",
            params.len(),
            scenario.teams.len()
        )));
    }
    for (team, (spec, p)) in scenario.teams.iter().zip(params).enumerate() {
        match (spec.policy, p) {
            (PolicyKind::Learned, TeamParams::Learned(params)) => {
                if params.shape().input_dim() != OBS_LEN {
                    return Err(Error::invalid_argument(format!(
                        "team {team}: policy input width {} != observation length {OBS_LEN}",
                        params.shape().input_dim()
                    )));
                }
                if params.shape().output_dim() != 3 {
                    return Err(Error::invalid_argument(format!(
                        "team {team}: policy output width {} != 3",
                        params.shape().output_dim()
                    )));
                }
            }
            (PolicyKind::ScriptedDefender, TeamParams::Scripted) => {}
            (expected, _) => {
                return Err(Error::invalid_argument(format!(
                    "team {team}: parameter slot does not match policy kind {expected:?}"
                )));
            }
        }
    }
    Ok(())
}

fn run(
    scenario: &ScenarioConfig,
    params: &[TeamParams],
    seed: u64,
    mut trace: Option<&mut Trace>,
) -> Result<(EpisodeResult, ())> {
    scenario.validate()?;
    validate_params(scenario, params)?;

    let agents = spawn_agents(scenario, rng::derive_seed(seed, &[PURPOSE_SPAWN]))?;
    let bases = scenario.teams.iter().map(|t| t.base).collect();
    let mut world = WorldState::new(scenario.world.clone(), agents, bases)?;
    let mut pid_states = vec![PidState::default(); world.agents.len()];

    if let Some(trace) = trace.as_deref_mut() {
        record_rows(trace, &world);
    }

    let dt = world.config.dt;
    let total_steps = world.config.steps();
    let mut steps_run = 0u32;

    for step in 0..total_steps {
        // Policies read the consistent pre-step world.
        let mut commands: Vec<Option<Command>> = Vec::with_capacity(world.agents.len());
        let mut alive_at_start = vec![false; world.agents.len()];
        for idx in 0..world.agents.len() {
            let agent = &world.agents[idx];
            if !agent.alive {
                commands.push(None);
                continue;
            }
            alive_at_start[idx] = true;
            let cmd = match params[agent.team] {
                TeamParams::Learned(policy) => {
                    let obs = encode_observation(&world, agent.id, &scenario.safety)?;
                    let net_out = forward(policy, &normalize_observation(&obs))?;
                    let target = heading_from_output(&net_out)?;
                    let target = safety_override(&target, agent, &world.agents, &scenario.safety);
                    let (ctrl, pid_next) =
                        pid_control(&target, agent, &pid_states[idx], &scenario.pid, dt)?;
                    pid_states[idx] = pid_next;
                    Command::FixedWing(ctrl)
                }
                TeamParams::Scripted => {
                    Command::Quad(defender_policy(agent, &world, &scenario.defender))
                }
            };
            commands.push(Some(cmd));
        }

        // Dynamics.
        for idx in 0..world.agents.len() {
            let Some(cmd) = &commands[idx] else { continue };
            let noise = draw_noise(&world, seed, step, idx as u64);
            let agent = &world.agents[idx];
            world.agents[idx] = match cmd {
                Command::FixedWing(ctrl) => step_fixed_wing(agent, ctrl, dt, &noise)?,
                Command::Quad(qcmd) => step_quadcopter(agent, qcmd, dt, &noise)?,
            };
        }
        world.time = f64::from(step + 1) * dt;
        steps_run = step + 1;

        // Weapons: all eligible shooters fire simultaneously against the
        // post-dynamics snapshot; deaths apply afterwards in attacker-id
        // order (the hit flag reflects the draw, a kill requires the victim
        // to still be alive when applied).
        let mut shots = Vec::new();
        for idx in 0..world.agents.len() {
            let attacker = &world.agents[idx];
            if !attacker.alive
                || world.time - world.last_fire[idx] < scenario.weapon.fire_period - 1e-9
            {
                continue;
            }
            let draw: f64 = rng::stream(seed, &[PURPOSE_WEAPON, step as u64, idx as u64]).random();
            if let Some(outcome) = weapons_check(attacker, &world.agents, &scenario.weapon, draw) {
                shots.push((attacker.id, outcome));
            }
        }
        for (attacker, outcome) in shots {
            world.last_fire[attacker.index()] = world.time;
            world.events.push(Event::Shot {
                t: world.time,
                attacker,
                target: outcome.target,
                hit: outcome.hit,
            });
            if outcome.hit && world.agents[outcome.target.index()].alive {
                world.agents[outcome.target.index()].alive = false;
                world.events.push(Event::Kill { t: world.time, victim: outcome.target, attacker });
            }
        }

        // Collisions.
        let collisions = collision_check(&world);
        for event in &collisions {
            match *event {
                Event::GroundCollision { agent, .. } | Event::BaseCollision { agent, .. } => {
                    world.agents[agent.index()].alive = false;
                }
                Event::MidairCollision { a, b, .. } => {
                    world.agents[a.index()].alive = false;
                    world.agents[b.index()].alive = false;
                }
                _ => {}
            }
        }
        world.events.extend(collisions);

        if let Some(trace) = trace.as_deref_mut() {
            for idx in 0..world.agents.len() {
                if alive_at_start[idx] {
                    record_row(trace, &world, idx);
                }
            }
        }

        // Termination: episode length, or any side eliminated.
        if (0..world.team_count()).any(|t| world.alive_count(t) == 0) {
            break;
        }
    }

    let result = summarize(&world, steps_run);
    Ok((result, ()))
}

fn draw_noise(world: &WorldState, seed: u64, step: u32, agent: u64) -> StepNoise {
    let mut noise = StepNoise::zero();
    let cfg = &world.config;
    if cfg.wind_stddev > 0.0 {
        let mut rng = rng::stream(seed, &[PURPOSE_WIND, step as u64, agent]);
        noise.wind.x = cfg.wind_stddev * rng.sample::<f64, _>(StandardNormal);
        noise.wind.y = cfg.wind_stddev * rng.sample::<f64, _>(StandardNormal);
        noise.wind.z = cfg.wind_stddev * rng.sample::<f64, _>(StandardNormal);
    }
    if cfg.control_stddev > 0.0 {
        let mut rng = rng::stream(seed, &[PURPOSE_CONTROL, step as u64, agent]);
        for c in &mut noise.control {
            *c = cfg.control_stddev * rng.sample::<f64, _>(StandardNormal);
        }
    }
    noise
}

fn record_rows(trace: &mut Trace, world: &WorldState) {
    for idx in 0..world.agents.len() {
        record_row(trace, world, idx);
    }
}

fn record_row(trace: &mut Trace, world: &WorldState, idx: usize) {
    let a = &world.agents[idx];
    trace.rows.push(TraceRow {
        t: world.time,
        agent: a.id.0,
        team: a.team,
        x: a.pos.x,
        y: a.pos.y,
        z: a.pos.z,
        alive: a.alive,
    });
}

fn summarize(world: &WorldState, steps: u32) -> EpisodeResult {
    let n_teams = world.team_count();
    let mut kills = vec![0u32; n_teams];
    let mut base_hits = vec![0u32; n_teams];
    for event in &world.events {
        match *event {
            Event::Kill { attacker, .. } => {
                kills[world.agents[attacker.index()].team] += 1;
            }
            Event::BaseCollision { agent, .. } => {
                base_hits[world.agents[agent.index()].team] += 1;
            }
            _ => {}
        }
    }

    let mut team_counts = Vec::with_capacity(n_teams);
    let mut team_returns = Vec::with_capacity(n_teams);
    for team in 0..n_teams {
        // Dead agents never move, so their current position is the death
        // position and this mean freezes their distance at death.
        let mean_final_distance = match world.enemy_base(team) {
            Some(base) => {
                let members: Vec<f64> = world
                    .agents
                    .iter()
                    .filter(|a| a.team == team)
                    .map(|a| a.pos.dist(base.pos))
                    .collect();
                members.iter().sum::<f64>() / members.len().max(1) as f64
            }
            None => 0.0,
        };
        let counts = TeamCounts {
            kills: kills[team],
            base_collisions: base_hits[team],
            mean_final_distance,
        };
        team_returns.push(counts.reward());
        team_counts.push(counts);
    }

    EpisodeResult {
        team_returns,
        team_counts,
        events: world.events.clone(),
        steps,
        duration: world.time,
    }
}
