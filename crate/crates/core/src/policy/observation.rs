//! Fixed-layout 102-dimensional policy observation.
//!
//! Layout (all positions/velocities relative to the observing agent, all
//! slots nearest-first, dead agents excluded, unused slots zero-filled):
//!
//! | range     | content |
//! |-----------|---------|
//! | 0..9      | own state: altitude, vx, vy, vz, roll, pitch, yaw, speed, altitude above the safety floor |
//! | 9..59     | 5 ally slots x 10: dx, dy, dz, distance, dvx, dvy, dvz, sin/cos of relative heading, ally speed |
//! | 59..94    | 5 enemy slots x 7: dx, dy, dz, distance, dvx, dvy, dvz |
//! | 94..102   | home then enemy base: sin/cos of relative bearing, relative altitude, distance |

use crate::error::{Error, Result};
use crate::policy::safety::SafetyConfig;
use crate::sim::{AgentId, AgentState, WorldState};
use crate::vec3::wrap_angle;

pub const OBS_LEN: usize = 102;
pub const ALLY_SLOTS: usize = 5;
pub const ENEMY_SLOTS: usize = 5;
const OWN_LEN: usize = 9;
const ALLY_LEN: usize = 10;
const ENEMY_LEN: usize = 7;
const BASE_BLOCK: usize = 94;

#[derive(Debug, Clone, PartialEq)]
pub struct Observation(pub [f64; OBS_LEN]);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Nearest `k` members of `candidates` by distance to `origin`, ties by
/// agent id (candidates are already in ascending-id order, so the stable
/// sort keeps id order on equal distances).
fn nearest<'a>(origin: &AgentState, candidates: Vec<&'a AgentState>, k: usize) -> Vec<&'a AgentState> {
    let mut with_dist: Vec<(f64, &AgentState)> = candidates
        .into_iter()
        .map(|a| (origin.pos.dist(a.pos), a))
        .collect();
    with_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    with_dist.truncate(k);
    with_dist.into_iter().map(|(_, a)| a).collect()
}

/// Encode the observation for a living agent.
pub fn encode_observation(
    world: &WorldState,
    agent_id: AgentId,
    safety: &SafetyConfig,
) -> Result<Observation> {
    let me = world
        .agent(agent_id)
        .ok_or_else(|| Error::invalid_argument(format!("unknown agent id {}", agent_id.0)))?;
    if !me.alive {
        return Err(Error::invalid_argument(format!(
            "cannot encode observation for dead agent {}",
            agent_id.0
        )));
    }

    let mut obs = [0.0f64; OBS_LEN];

    obs[0] = me.altitude();
    obs[1] = me.vel.x;
    obs[2] = me.vel.y;
    obs[3] = me.vel.z;
    obs[4] = me.roll();
    obs[5] = me.pitch();
    obs[6] = me.yaw();
    obs[7] = me.speed;
    obs[8] = me.altitude() - safety.min_altitude;

    let allies: Vec<&AgentState> = world
        .agents
        .iter()
        .filter(|a| a.alive && a.team == me.team && a.id != me.id)
        .collect();
    for (slot, ally) in nearest(me, allies, ALLY_SLOTS).into_iter().enumerate() {
        let base = OWN_LEN + slot * ALLY_LEN;
        let rel = ally.pos - me.pos;
        let dvel = ally.vel - me.vel;
        let rel_heading = wrap_angle(ally.yaw() - me.yaw());
        obs[base] = rel.x;
        obs[base + 1] = rel.y;
        obs[base + 2] = rel.z;
        obs[base + 3] = rel.norm();
        obs[base + 4] = dvel.x;
        obs[base + 5] = dvel.y;
        obs[base + 6] = dvel.z;
        obs[base + 7] = rel_heading.sin();
        obs[base + 8] = rel_heading.cos();
        obs[base + 9] = ally.speed;
    }

    let enemies: Vec<&AgentState> = world
        .agents
        .iter()
        .filter(|a| {
            a.alive
                && a.team != me.team
                && world
                    .config
                    .sensor_range
                    .map_or(true, |r| me.pos.dist(a.pos) <= r)
        })
        .collect();
    for (slot, enemy) in nearest(me, enemies, ENEMY_SLOTS).into_iter().enumerate() {
        let base = OWN_LEN + ALLY_SLOTS * ALLY_LEN + slot * ENEMY_LEN;
        let rel = enemy.pos - me.pos;
        let dvel = enemy.vel - me.vel;
        obs[base] = rel.x;
        obs[base + 1] = rel.y;
        obs[base + 2] = rel.z;
        obs[base + 3] = rel.norm();
        obs[base + 4] = dvel.x;
        obs[base + 5] = dvel.y;
        obs[base + 6] = dvel.z;
    }

    let mut write_base = |offset: usize, base: &crate::sim::Base| {
        let rel = base.pos - me.pos;
        let bearing = wrap_angle(rel.y.atan2(rel.x) - me.yaw());
        obs[offset] = bearing.sin();
        obs[offset + 1] = bearing.cos();
        obs[offset + 2] = rel.z;
        obs[offset + 3] = rel.norm();
    };
    if let Some(home) = world.bases.get(me.team) {
        write_base(BASE_BLOCK, home);
    }
    if let Some(enemy_base) = world.enemy_base(me.team) {
        write_base(BASE_BLOCK + 4, enemy_base);
    }

    Ok(Observation(obs))
}

/// Fixed per-entry scaling that brings the physical units into a range the
/// tanh network can use: positions and distances /500, velocities and
/// speeds /50, altitudes /100, angles and sin/cos unchanged.
pub fn normalize_observation(obs: &Observation) -> [f64; OBS_LEN] {
    const POS: f64 = 1.0 / 500.0;
    const VEL: f64 = 1.0 / 50.0;
    const ALT: f64 = 1.0 / 100.0;
    let mut out = [0.0f64; OBS_LEN];
    let scale_of = |i: usize| -> f64 {
        match i {
            0 => ALT,
            1..=3 => VEL,
            4..=6 => 1.0,
            7 => VEL,
            8 => ALT,
            i if i < OWN_LEN + ALLY_SLOTS * ALLY_LEN => match (i - OWN_LEN) % ALLY_LEN {
                0..=3 => POS,
                4..=6 => VEL,
                7 | 8 => 1.0,
                _ => VEL,
            },
            i if i < BASE_BLOCK => match (i - OWN_LEN - ALLY_SLOTS * ALLY_LEN) % ENEMY_LEN {
                0..=3 => POS,
                _ => VEL,
            },
            i => match (i - BASE_BLOCK) % 4 {
                0 | 1 => 1.0,
                2 => ALT,
                _ => POS,
            },
        }
    };
    for (i, v) in obs.0.iter().enumerate() {
        out[i] = v * scale_of(i);
    }
    out
}
