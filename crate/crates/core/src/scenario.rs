//! Concrete experiment definitions with desk-scale shrinking.
//!
//! `base_attack(1.0)` is the headline setup: 50 learned fixed-wing
//! attackers against 20 scripted quadcopter defenders. `two_team(1.0)` pits
//! two learned fixed-wing teams of 50 against each other. A scale factor
//! `s` multiplies team counts by `s` (rounded up) and arena linear
//! dimensions by `sqrt(s)`, keeping agent density roughly constant, so the
//! same scenarios run on a desk.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{PidGains, SafetyConfig};
use crate::rng;
use crate::sim::dynamics::rest_state;
use crate::sim::{AgentId, AgentState, Base, DefenderConfig, VehicleKind, WeaponSpec, WorldConfig};
use crate::vec3::Vec3;

/// Axis-aligned spawn region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3 {
    pub min: Vec3,
    pub max: Vec3,
}

impl Box3 {
    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Learned,
    ScriptedDefender,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamSpec {
    pub count: usize,
    pub kind: VehicleKind,
    pub policy: PolicyKind,
    pub base: Base,
    pub spawn_box: Box3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub scale: f64,
    pub teams: Vec<TeamSpec>,
    pub world: WorldConfig,
    pub pid: PidGains,
    pub safety: SafetyConfig,
    pub weapon: WeaponSpec,
    pub defender: DefenderConfig,
}

impl ScenarioConfig {
    pub fn learned_team_indices(&self) -> Vec<usize> {
        self.teams
            .iter()
            .enumerate()
            .filter(|(_, t)| t.policy == PolicyKind::Learned)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0) {
            return Err(Error::invalid_argument("scale must be positive"));
        }
        if self.teams.is_empty() || self.teams.len() > 2 {
            return Err(Error::invalid_config(format!(
                "scenarios support 1 or 2 teams, got {}",
                self.teams.len()
            )));
        }
        self.world.validate()?;
        let arena = self.world.arena;
        for (i, team) in self.teams.iter().enumerate() {
            if team.count < 1 {
                return Err(Error::invalid_argument(format!("team {i} has no agents")));
            }
            let b = &team.spawn_box;
            let inside = b.min.x >= 0.0
                && b.min.y >= 0.0
                && b.min.z >= 0.0
                && b.max.x <= arena.x
                && b.max.y <= arena.y
                && b.max.z <= arena.z;
            if !inside || b.min.x >= b.max.x || b.min.y >= b.max.y || b.min.z >= b.max.z {
                return Err(Error::invalid_config(format!(
                    "team {i} spawn box {b:?} is degenerate or outside the arena"
                )));
            }
            if !(team.base.radius > 0.0) {
                return Err(Error::invalid_config(format!("team {i} base radius must be positive")));
            }
        }
        if !(self.weapon.half_angle > 0.0 && self.weapon.half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::invalid_config("weapon half-angle must lie in (0, pi/2)"));
        }
        if !(self.weapon.max_range > 0.0 && self.weapon.fire_period > 0.0 && self.weapon.a_ref > 0.0) {
            return Err(Error::invalid_config("weapon range, period, and a_ref must be positive"));
        }
        if !(self.weapon.p_max > 0.0 && self.weapon.p_max <= 1.0) {
            return Err(Error::invalid_config("weapon p_max must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// `ceil(base * scale)` with an epsilon absorbing f64 representation error
/// (so 50 * 0.08 gives 4, not 5).
pub fn scaled_count(base: usize, scale: f64) -> usize {
    ((base as f64 * scale) - 1e-9).ceil().max(1.0) as usize
}

/// Shared geometry: arena scaled by sqrt(s), bases on the diagonal through
/// the center, 800*sqrt(s) meters apart.
struct Geometry {
    arena: Vec3,
    base: [Base; 2],
    lin: f64,
}

fn geometry(scale: f64) -> Geometry {
    let lin = scale.sqrt();
    let arena = Vec3::new(2000.0 * lin, 2000.0 * lin, 500.0 * lin);
    let center = Vec3::new(arena.x * 0.5, arena.y * 0.5, 0.0);
    let diag = Vec3::new(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let half_sep = 400.0 * lin;
    Geometry {
        arena,
        base: [
            Base { pos: center - diag * half_sep, radius: 30.0 },
            Base { pos: center + diag * half_sep, radius: 30.0 },
        ],
        lin,
    }
}

/// Fixed-wing spawn region: horizontal square around the team base, at an
/// altitude band kept above the safety floor and inside the arena.
fn fixed_wing_box(geo: &Geometry, base: &Base) -> Box3 {
    let half = 150.0 * geo.lin;
    let z_hi = (120.0 * geo.lin).max(70.0).min(0.8 * geo.arena.z);
    let z_lo = (80.0 * geo.lin).max(45.0).min(z_hi - 10.0);
    Box3 {
        min: Vec3::new(base.pos.x - half, base.pos.y - half, z_lo),
        max: Vec3::new(base.pos.x + half, base.pos.y + half, z_hi),
    }
}

fn quad_box(geo: &Geometry, base: &Base) -> Box3 {
    let half = 100.0 * geo.lin;
    Box3 {
        min: Vec3::new(base.pos.x - half, base.pos.y - half, 20.0),
        max: Vec3::new(base.pos.x + half, base.pos.y + half, 40.0),
    }
}

/// Learned fixed-wing attackers versus scripted quadcopter defenders
/// guarding their base. Scale 1 is 50 vs 20.
pub fn base_attack(scale: f64) -> Result<ScenarioConfig> {
    if !(scale > 0.0) {
        return Err(Error::invalid_argument("scale must be positive"));
    }
    let geo = geometry(scale);
    let config = ScenarioConfig {
        name: "base_attack".into(),
        scale,
        teams: vec![
            TeamSpec {
                count: scaled_count(50, scale),
                kind: VehicleKind::FixedWing,
                policy: PolicyKind::Learned,
                base: geo.base[0],
                spawn_box: fixed_wing_box(&geo, &geo.base[0]),
            },
            TeamSpec {
                count: scaled_count(20, scale),
                kind: VehicleKind::Quadcopter,
                policy: PolicyKind::ScriptedDefender,
                base: geo.base[1],
                spawn_box: quad_box(&geo, &geo.base[1]),
            },
        ],
        world: WorldConfig { arena: geo.arena, ..WorldConfig::default() },
        pid: PidGains::default(),
        safety: SafetyConfig::default(),
        weapon: WeaponSpec::default(),
        defender: DefenderConfig {
            engage_range: (250.0 * geo.lin).max(120.0),
            ..DefenderConfig::default()
        },
    };
    config.validate()?;
    Ok(config)
}

/// Two learned fixed-wing teams with mirrored spawn regions and bases;
/// suicide-attack scoring is active for both sides. Scale 1 is 50 vs 50.
pub fn two_team(scale: f64) -> Result<ScenarioConfig> {
    if !(scale > 0.0) {
        return Err(Error::invalid_argument("scale must be positive"));
    }
    let geo = geometry(scale);
    let count = scaled_count(50, scale);
    let team = |idx: usize| TeamSpec {
        count,
        kind: VehicleKind::FixedWing,
        policy: PolicyKind::Learned,
        base: geo.base[idx],
        spawn_box: fixed_wing_box(&geo, &geo.base[idx]),
    };
    let config = ScenarioConfig {
        name: "two_team".into(),
        scale,
        teams: vec![team(0), team(1)],
        world: WorldConfig { arena: geo.arena, ..WorldConfig::default() },
        pid: PidGains::default(),
        safety: SafetyConfig::default(),
        weapon: WeaponSpec::default(),
        defender: DefenderConfig::default(),
    };
    config.validate()?;
    Ok(config)
}

/// Look up a built-in scenario by name.
pub fn by_name(name: &str, scale: f64) -> Result<ScenarioConfig> {
    match name {
        "base_attack" => base_attack(scale),
        "two_team" => two_team(scale),
        other => Err(Error::invalid_config(format!(
            "unknown scenario '{other}' (known: base_attack, two_team)"
        ))),
    }
}

/// Spawn all agents: positions uniform in each team's box, headings toward
/// the enemy base (or the arena center for single-team setups), fixed wings
/// at trim speed, quadcopters at rest. Agent ids are team-major and equal
/// their index.
pub fn spawn_agents(config: &ScenarioConfig, seed: u64) -> Result<Vec<AgentState>> {
    config.validate()?;
    let mut agents = Vec::new();
    let mut next_id = 0u32;
    for (team_idx, team) in config.teams.iter().enumerate() {
        let face_toward = if config.teams.len() == 2 {
            config.teams[1 - team_idx].base.pos
        } else {
            Vec3::new(config.world.arena.x * 0.5, config.world.arena.y * 0.5, 0.0)
        };
        for _ in 0..team.count {
            let mut stream = rng::stream(seed, &[u64::from(next_id)]);
            let b = &team.spawn_box;
            let pos = Vec3::new(
                stream.random_range(b.min.x..=b.max.x),
                stream.random_range(b.min.y..=b.max.y),
                stream.random_range(b.min.z..=b.max.z),
            );
            let yaw = (face_toward.y - pos.y).atan2(face_toward.x - pos.x);
            agents.push(rest_state(AgentId(next_id), team_idx, team.kind, pos, yaw));
            next_id += 1;
        }
    }
    Ok(agents)
}
