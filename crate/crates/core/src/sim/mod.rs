//! Deterministic-given-seed multi-agent world.
//!
//! Agent and world state types live here; dynamics, weapons, collisions,
//! reward, the scripted defender, and the episode loop are submodules.

mod collisions;
mod defender;
pub mod dynamics;
mod episode;
mod export;
mod reward;
mod weapons;

pub use collisions::collision_check;
pub use defender::{defender_policy, DefenderConfig};
pub use dynamics::{step_fixed_wing, step_quadcopter, QuadCommand, StepNoise};
pub use episode::{run_episode, run_episode_traced, EpisodeResult, TeamParams, Trace, TraceRow};
pub use export::{write_events_jsonl, write_trajectory_csv};
pub use reward::{compute_reward, TeamCounts};
pub use weapons::{presented_area, weapons_check, ShotOutcome, WeaponSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Stable agent handle; equals the agent's index in `WorldState::agents`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub u32);

impl AgentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type TeamId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VehicleKind {
    FixedWing,
    Quadcopter,
}

impl VehicleKind {
    /// Length of the canonical state vector for this vehicle model.
    pub fn state_len(self) -> usize {
        match self {
            VehicleKind::FixedWing => 10,
            VehicleKind::Quadcopter => 12,
        }
    }
}

/// Full kinematic state of one agent.
///
/// The fixed-wing model's primary states are `(pos, speed, yaw, pitch, roll,
/// rates.x, rates.y, throttle)`; its world-frame `vel` is derived each step.
/// The quadcopter's primary states are `(pos, vel, attitude, rates)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub id: AgentId,
    pub team: TeamId,
    pub kind: VehicleKind,
    pub alive: bool,
    pub pos: Vec3,
    pub vel: Vec3,
    /// Roll, pitch (flight-path angle for fixed wings), yaw.
    pub attitude: Vec3,
    /// Roll/pitch/yaw rate proxies.
    pub rates: Vec3,
    /// Scalar airspeed (fixed-wing primary state).
    pub speed: f64,
    /// Throttle lag state in [0, 1].
    pub throttle: f64,
}

impl AgentState {
    pub fn altitude(&self) -> f64 {
        self.pos.z
    }

    pub fn roll(&self) -> f64 {
        self.attitude.x
    }

    pub fn pitch(&self) -> f64 {
        self.attitude.y
    }

    pub fn yaw(&self) -> f64 {
        self.attitude.z
    }

    /// Unit vector out of the vehicle's nose, from yaw and pitch.
    pub fn nose_dir(&self) -> Vec3 {
        let (sp, cp) = self.pitch().sin_cos();
        let (sy, cy) = self.yaw().sin_cos();
        Vec3::new(cp * cy, cp * sy, sp)
    }

    /// Canonical state vector; length 10 (fixed wing) or 12 (quadcopter).
    pub fn state_vector(&self) -> Vec<f64> {
        match self.kind {
            VehicleKind::FixedWing => vec![
                self.pos.x,
                self.pos.y,
                self.pos.z,
                self.speed,
                self.yaw(),
                self.pitch(),
                self.roll(),
                self.rates.x,
                self.rates.y,
                self.throttle,
            ],
            VehicleKind::Quadcopter => vec![
                self.pos.x,
                self.pos.y,
                self.pos.z,
                self.vel.x,
                self.vel.y,
                self.vel.z,
                self.attitude.x,
                self.attitude.y,
                self.attitude.z,
                self.rates.x,
                self.rates.y,
                self.rates.z,
            ],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.pos.is_finite()
            && self.vel.is_finite()
            && self.attitude.is_finite()
            && self.rates.is_finite()
            && self.speed.is_finite()
            && self.throttle.is_finite()
    }
}

/// World stepping parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    /// Simulation step (s).
    pub dt: f64,
    /// Episode length (s); must be a positive multiple of `dt`.
    pub episode_len: f64,
    /// Wind velocity noise per axis per step (m/s, std dev).
    pub wind_stddev: f64,
    /// Actuator noise per channel per step (std dev, normalized units).
    pub control_stddev: f64,
    /// Arena dimensions (m); used for scenario construction.
    pub arena: Vec3,
    /// Two agents closer than this collide mid-air (m).
    pub collision_radius: f64,
    /// Enemy detection range; `None` = unlimited (nearest-5 truncation only).
    pub sensor_range: Option<f64>,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            dt: 0.1,
            episode_len: 200.0,
            wind_stddev: 0.5,
            control_stddev: 0.02,
            arena: Vec3::new(2000.0, 2000.0, 500.0),
            collision_radius: 3.0,
            sensor_range: None,
        }
    }
}

impl WorldConfig {
    pub fn steps(&self) -> u32 {
        (self.episode_len / self.dt).round() as u32
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::invalid_config("dt must be positive"));
        }
        let steps = (self.episode_len / self.dt).round();
        if steps < 1.0 || (steps * self.dt - self.episode_len).abs() > 1e-6 {
            return Err(Error::invalid_config(
                "episode_len must be a positive multiple of dt",
            ));
        }
        if self.wind_stddev < 0.0 || self.control_stddev < 0.0 {
            return Err(Error::invalid_config("noise stddevs must be nonnegative"));
        }
        if !(self.collision_radius > 0.0) {
            return Err(Error::invalid_config("collision_radius must be positive"));
        }
        Ok(())
    }
}

/// A team's base: a scoring sphere centered at `pos`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Base {
    pub pos: Vec3,
    pub radius: f64,
}

/// Timestamped episode events, strictly ordered by (time, emission order);
/// emission order within a step is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Shot { t: f64, attacker: AgentId, target: AgentId, hit: bool },
    Kill { t: f64, victim: AgentId, attacker: AgentId },
    GroundCollision { t: f64, agent: AgentId },
    MidairCollision { t: f64, a: AgentId, b: AgentId },
    BaseCollision { t: f64, agent: AgentId, base: TeamId },
}

impl Event {
    pub fn time(&self) -> f64 {
        match *self {
            Event::Shot { t, .. }
            | Event::Kill { t, .. }
            | Event::GroundCollision { t, .. }
            | Event::MidairCollision { t, .. }
            | Event::BaseCollision { t, .. } => t,
        }
    }
}

pub type EventLog = Vec<Event>;

/// All mutable world state for one episode.
#[derive(Debug, Clone)]
pub struct WorldState {
    pub time: f64,
    pub config: WorldConfig,
    pub agents: Vec<AgentState>,
    /// One base per team, indexed by team id.
    pub bases: Vec<Base>,
    pub events: EventLog,
    /// Last weapon fire time per agent; `-inf` when the agent never fired.
    pub last_fire: Vec<f64>,
}

impl WorldState {
    pub fn new(config: WorldConfig, agents: Vec<AgentState>, bases: Vec<Base>) -> Result<Self> {
        config.validate()?;
        for (i, a) in agents.iter().enumerate() {
            if a.id.index() != i {
                return Err(Error::invalid_argument(format!(
                    "agent id {} at index {i}; ids must equal their index",
                    a.id.0
                )));
            }
            if a.team >= bases.len() {
                return Err(Error::invalid_argument(format!(
                    "agent {} references team {} but only {} bases exist",
                    a.id.0,
                    a.team,
                    bases.len()
                )));
            }
        }
        let n = agents.len();
        Ok(WorldState {
            time: 0.0,
            config,
            agents,
            bases,
            events: Vec::new(),
            last_fire: vec![f64::NEG_INFINITY; n],
        })
    }

    pub fn agent(&self, id: AgentId) -> Option<&AgentState> {
        self.agents.get(id.index())
    }

    pub fn team_count(&self) -> usize {
        self.bases.len()
    }

    pub fn alive_count(&self, team: TeamId) -> usize {
        self.agents.iter().filter(|a| a.team == team && a.alive).count()
    }

    /// The opposing team's base in a two-team world.
    pub fn enemy_base(&self, team: TeamId) -> Option<&Base> {
        if self.bases.len() == 2 {
            self.bases.get(1 - team)
        } else {
            None
        }
    }

    /// Position of this agent among its teammates, in ascending-id order.
    /// Membership is fixed at spawn, so the slot is stable for dead or
    /// alive agents.
    pub fn team_slot(&self, id: AgentId) -> (usize, usize) {
        let team = self.agents[id.index()].team;
        let mut slot = 0;
        let mut count = 0;
        for a in &self.agents {
            if a.team == team {
                if a.id < id {
                    slot += 1;
                }
                count += 1;
            }
        }
        (slot, count)
    }
}
