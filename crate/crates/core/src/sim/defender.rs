//! Scripted quadcopter base defender.
//!
//! Without a detectable enemy, each defender holds a slot on a ring around
//! its own base (slots spread uniformly by the agent's position within the
//! team). When an enemy comes within the engagement range the defender
//! pursues the closest one, commands its own altitude to the enemy's, and
//! keeps its nose on the target so the weapons pass can fire every cooldown.

use serde::{Deserialize, Serialize};

use crate::sim::dynamics::{QuadCommand, QUAD_SPEED_MAX};
use crate::sim::{AgentState, WorldState};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefenderConfig {
    /// Enemies beyond this range are ignored (m).
    pub engage_range: f64,
    /// Guard ring radius around the base (m).
    pub ring_radius: f64,
    /// Guard altitude above the base (m).
    pub guard_altitude: f64,
}

impl Default for DefenderConfig {
    fn default() -> Self {
        DefenderConfig { engage_range: 250.0, ring_radius: 60.0, guard_altitude: 30.0 }
    }
}

/// Proportional gain from position error to commanded velocity (1/s).
const SLOT_GAIN: f64 = 0.5;
const PURSUIT_SPEED: f64 = QUAD_SPEED_MAX;

pub fn defender_policy(agent: &AgentState, world: &WorldState, config: &DefenderConfig) -> QuadCommand {
    let nearest_enemy = world
        .agents
        .iter()
        .filter(|a| a.alive && a.team != agent.team)
        .map(|a| (agent.pos.dist(a.pos), a))
        .filter(|(d, _)| *d <= config.engage_range)
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.id.cmp(&b.1.id)));

    if let Some((_, enemy)) = nearest_enemy {
        let chase = (enemy.pos - agent.pos).horizontal();
        let target_vel = chase.normalized().map_or(Vec3::ZERO, |d| d * PURSUIT_SPEED);
        return QuadCommand {
            target_vel,
            target_alt: Some(enemy.pos.z),
            aim: Some(enemy.pos - agent.pos),
        };
    }

    // Guard slot: uniform angles by team slot index.
    let base = world.bases[agent.team];
    let (slot, count) = world.team_slot(agent.id);
    let angle = std::f64::consts::TAU * slot as f64 / count.max(1) as f64;
    let slot_pos = base.pos
        + Vec3::new(
            config.ring_radius * angle.cos(),
            config.ring_radius * angle.sin(),
            config.guard_altitude,
        );
    QuadCommand {
        target_vel: ((slot_pos - agent.pos) * SLOT_GAIN).clamp_norm(QUAD_SPEED_MAX),
        target_alt: None,
        aim: None,
    }
}
