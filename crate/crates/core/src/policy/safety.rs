//! Deterministic collision-avoidance override on the network heading.
//!
//! Two independent triggers, both evaluated on current state only (never on
//! the incoming target, which makes the override idempotent):
//!
//! * **Ground**: if the altitude extrapolated along the current velocity
//!   over the lookahead horizon drops below the floor, the vertical
//!   component is replaced by a climb reference.
//! * **Neighbor**: if the closest approach to any living neighbor within
//!   the horizon falls inside the avoidance radius, the lateral components
//!   are replaced by a radial escape away from the nearest such neighbor.

use serde::{Deserialize, Serialize};

use crate::policy::network::HeadingTarget;
use crate::sim::AgentState;
use crate::vec3::Vec3;

/// Extra height above the floor the climb reference aims for (m).
const CLIMB_MARGIN: f64 = 10.0;
/// Escape magnitude as a multiple of the avoidance radius.
const ESCAPE_SCALE: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SafetyConfig {
    /// Altitude floor (m).
    pub min_altitude: f64,
    /// Neighbor avoidance radius (m).
    pub avoid_radius: f64,
    /// Straight-line extrapolation horizon (s).
    pub lookahead: f64,
}

impl Default for SafetyConfig {
    fn default() -> Self {
        SafetyConfig { min_altitude: 20.0, avoid_radius: 10.0, lookahead: 3.0 }
    }
}

/// Distance of closest approach between two constant-velocity agents over
/// the horizon [0, t_max].
fn closest_approach(rel_pos: Vec3, rel_vel: Vec3, t_max: f64) -> f64 {
    let vv = rel_vel.norm_sq();
    let t = if vv < 1e-12 {
        0.0
    } else {
        (-rel_pos.dot(rel_vel) / vv).clamp(0.0, t_max)
    };
    (rel_pos + rel_vel * t).norm()
}

pub fn safety_override(
    target: &HeadingTarget,
    agent: &AgentState,
    neighbors: &[AgentState],
    config: &SafetyConfig,
) -> HeadingTarget {
    let mut out = *target;

    // Ground trigger.
    let predicted_alt = agent.pos.z + agent.vel.z * config.lookahead;
    if predicted_alt < config.min_altitude || agent.pos.z < config.min_altitude {
        let climb = (config.min_altitude + CLIMB_MARGIN - agent.pos.z).max(1.0);
        out.z = climb;
    }

    // Neighbor trigger: nearest (by current distance) neighbor whose
    // extrapolated closest approach violates the avoidance radius.
    let mut threat: Option<(f64, &AgentState)> = None;
    for n in neighbors {
        if !n.alive || n.id == agent.id {
            continue;
        }
        let rel_pos = n.pos - agent.pos;
        let rel_vel = n.vel - agent.vel;
        if closest_approach(rel_pos, rel_vel, config.lookahead) < config.avoid_radius {
            let d = rel_pos.norm();
            if threat.map_or(true, |(best, _)| d < best) {
                threat = Some((d, n));
            }
        }
    }
    if let Some((_, n)) = threat {
        // World-frame horizontal escape direction, rotated into the
        // agent-local frame of the heading target.
        let away = (agent.pos - n.pos).horizontal();
        let dir = away.normalized().unwrap_or(Vec3::new(-agent.yaw().cos(), -agent.yaw().sin(), 0.0));
        let (sy, cy) = agent.yaw().sin_cos();
        let local_x = dir.x * cy + dir.y * sy;
        let local_y = -dir.x * sy + dir.y * cy;
        let mag = ESCAPE_SCALE * config.avoid_radius;
        out.x = mag * local_x;
        out.y = mag * local_y;
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{AgentId, VehicleKind};

    fn agent(id: u32, pos: Vec3, vel: Vec3, yaw: f64) -> AgentState {
        AgentState {
            id: AgentId(id),
            team: 0,
            kind: VehicleKind::FixedWing,
            alive: true,
            pos,
            vel,
            attitude: Vec3::new(0.0, 0.0, yaw),
            rates: Vec3::ZERO,
            speed: vel.norm(),
            throttle: 0.5,
        }
    }

    #[test]
    fn high_and_clear_passes_through() {
        let t = HeadingTarget { x: 100.0, y: -50.0, z: 10.0 };
        let a = agent(0, Vec3::new(0.0, 0.0, 200.0), Vec3::new(30.0, 0.0, 0.0), 0.0);
        let out = safety_override(&t, &a, &[], &SafetyConfig::default());
        assert_eq!(out, t);
    }

    #[test]
    fn low_altitude_forces_climb() {
        let t = HeadingTarget { x: 100.0, y: 0.0, z: -40.0 };
        let a = agent(0, Vec3::new(0.0, 0.0, 12.0), Vec3::new(30.0, 0.0, 0.0), 0.0);
        let out = safety_override(&t, &a, &[], &SafetyConfig::default());
        assert!(out.z > 0.0, "climb reference {}", out.z);
        assert_eq!(out.x, t.x);
        assert_eq!(out.y, t.y);
    }

    #[test]
    fn predicted_descent_also_triggers() {
        let t = HeadingTarget { x: 100.0, y: 0.0, z: 0.0 };
        // 60 m up but descending 15 m/s: 60 - 45 = 15 < 20.
        let a = agent(0, Vec3::new(0.0, 0.0, 60.0), Vec3::new(30.0, 0.0, -15.0), 0.0);
        let out = safety_override(&t, &a, &[], &SafetyConfig::default());
        assert!(out.z > 0.0);
    }

    #[test]
    fn head_on_pair_escapes_in_opposite_directions() {
        let cfg = SafetyConfig::default();
        let a = agent(0, Vec3::new(0.0, 0.0, 100.0), Vec3::new(30.0, 0.0, 0.0), 0.0);
        let b = agent(1, Vec3::new(60.0, 0.0, 100.0), Vec3::new(-30.0, 0.0, 0.0), std::f64::consts::PI);
        let t = HeadingTarget { x: 50.0, y: 0.0, z: 0.0 };
        let out_a = safety_override(&t, &a, std::slice::from_ref(&b), &cfg);
        let out_b = safety_override(&t, &b, std::slice::from_ref(&a), &cfg);

        // Convert local x back to world x: for a (yaw 0) world dx = out.x;
        // for b (yaw pi) world dx = -out.x.
        let world_a = out_a.x;
        let world_b = -out_b.x;
        assert!(world_a < 0.0, "agent a should flee -x, got {world_a}");
        assert!(world_b > 0.0, "agent b should flee +x, got {world_b}");
    }

    #[test]
    fn override_is_idempotent() {
        let cfg = SafetyConfig::default();
        let a = agent(0, Vec3::new(0.0, 0.0, 8.0), Vec3::new(30.0, 0.0, -5.0), 0.3);
        let b = agent(1, Vec3::new(20.0, 1.0, 8.0), Vec3::new(-28.0, 0.0, 0.0), 3.0);
        let t = HeadingTarget { x: 77.0, y: -3.0, z: -9.0 };
        let once = safety_override(&t, &a, std::slice::from_ref(&b), &cfg);
        let twice = safety_override(&once, &a, std::slice::from_ref(&b), &cfg);
        assert_eq!(once, twice);
    }

    #[test]
    fn dead_neighbors_are_ignored() {
        let cfg = SafetyConfig::default();
        let a = agent(0, Vec3::new(0.0, 0.0, 100.0), Vec3::new(30.0, 0.0, 0.0), 0.0);
        let mut b = agent(1, Vec3::new(5.0, 0.0, 100.0), Vec3::ZERO, 0.0);
        b.alive = false;
        let t = HeadingTarget { x: 50.0, y: 0.0, z: 0.0 };
        assert_eq!(safety_override(&t, &a, std::slice::from_ref(&b), &cfg), t);
    }
}
