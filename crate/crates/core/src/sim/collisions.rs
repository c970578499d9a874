//! Ground, mid-air, and base collision detection.
//!
//! All three conditions are evaluated against the same world snapshot in a
//! fixed precedence (ground, then mid-air by id pair, then base by id); an
//! agent claimed by an earlier event is excluded from later ones, so every
//! death maps to exactly one event. The caller applies the deaths.

use crate::sim::{Event, WorldState};

pub fn collision_check(world: &WorldState) -> Vec<Event> {
    let t = world.time;
    let mut events = Vec::new();
    let mut dead = vec![false; world.agents.len()];

    for a in &world.agents {
        if a.alive && a.pos.z <= 0.0 {
            dead[a.id.index()] = true;
            events.push(Event::GroundCollision { t, agent: a.id });
        }
    }

    for i in 0..world.agents.len() {
        let a = &world.agents[i];
        if !a.alive || dead[i] {
            continue;
        }
        for j in (i + 1)..world.agents.len() {
            let b = &world.agents[j];
            if !b.alive || dead[j] {
                continue;
            }
            if a.pos.dist(b.pos) <= world.config.collision_radius {
                dead[i] = true;
                dead[j] = true;
                events.push(Event::MidairCollision { t, a: a.id, b: b.id });
                break;
            }
        }
    }

    for a in &world.agents {
        if !a.alive || dead[a.id.index()] {
            continue;
        }
        if let Some(base) = world.enemy_base(a.team) {
            if a.pos.dist(base.pos) <= base.radius {
                dead[a.id.index()] = true;
                events.push(Event::BaseCollision { t, agent: a.id, base: 1 - a.team });
            }
        }
    }

    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{AgentId, AgentState, Base, VehicleKind, WorldConfig, WorldState};
    use crate::vec3::Vec3;

    fn agent(id: u32, team: usize, pos: Vec3) -> AgentState {
        AgentState {
            id: AgentId(id),
            team,
            kind: VehicleKind::FixedWing,
            alive: true,
            pos,
            vel: Vec3::ZERO,
            attitude: Vec3::ZERO,
            rates: Vec3::ZERO,
            speed: 30.0,
            throttle: 0.5,
        }
    }

    fn two_bases() -> Vec<Base> {
        vec![
            Base { pos: Vec3::new(0.0, 0.0, 0.0), radius: 30.0 },
            Base { pos: Vec3::new(500.0, 0.0, 0.0), radius: 30.0 },
        ]
    }

    #[test]
    fn below_ground_collides() {
        let world = WorldState::new(
            WorldConfig::default(),
            vec![agent(0, 0, Vec3::new(100.0, 100.0, -0.1))],
            vec![Base { pos: Vec3::ZERO, radius: 30.0 }],
        )
        .unwrap();
        let events = collision_check(&world);
        assert_eq!(events, vec![Event::GroundCollision { t: 0.0, agent: AgentId(0) }]);
    }

    #[test]
    fn coincident_pair_yields_one_midair_event() {
        let p = Vec3::new(100.0, 100.0, 50.0);
        let world = WorldState::new(
            WorldConfig::default(),
            vec![agent(0, 0, p), agent(1, 0, p)],
            vec![Base { pos: Vec3::ZERO, radius: 30.0 }],
        )
        .unwrap();
        let events = collision_check(&world);
        assert_eq!(events, vec![Event::MidairCollision { t: 0.0, a: AgentId(0), b: AgentId(1) }]);
    }

    #[test]
    fn entering_enemy_base_scores_once() {
        let world = WorldState::new(
            WorldConfig::default(),
            vec![agent(0, 0, Vec3::new(500.0, 0.0, 20.0))],
            two_bases(),
        )
        .unwrap();
        let events = collision_check(&world);
        assert_eq!(events, vec![Event::BaseCollision { t: 0.0, agent: AgentId(0), base: 1 }]);
    }

    #[test]
    fn own_base_does_not_trigger() {
        let world = WorldState::new(
            WorldConfig::default(),
            vec![agent(0, 0, Vec3::new(0.0, 0.0, 20.0))],
            two_bases(),
        )
        .unwrap();
        assert!(collision_check(&world).is_empty());
    }

    #[test]
    fn ground_takes_precedence_over_base() {
        let world = WorldState::new(
            WorldConfig::default(),
            vec![agent(0, 0, Vec3::new(500.0, 0.0, -1.0))],
            two_bases(),
        )
        .unwrap();
        let events = collision_check(&world);
        assert_eq!(events.len(), 1);
        assert!(matches!(events[0], Event::GroundCollision { .. }));
    }
}
